#pragma once

#include "mcvad/datagen/scene.hpp"

namespace mcvad::datagen {

/// Five consecutive object-level frames sharing one 32x32 crop window
/// (centered on the sprite's t5 position): four inputs plus the t5 target.
struct ObjectCube {
  MatF frames;  // (5, 3072), rows t1..t5, CHW per row
  std::string video_id;
  int64_t frame_index = 0;  // index of t5 in the source video
  std::string track_id;
  int label = 0;
};

struct FlowMap {
  VecF values;  // 2*32*32: x-displacement plane then y-displacement plane
  std::string video_id;
  int64_t frame_index = 0;
  std::string track_id;
};

enum class FlowMode { ground_truth, frame_diff };
const char* to_string(FlowMode m);
FlowMode flow_mode_from_string(const std::string& s);

struct ExtractStats {
  int cubes = 0;
  int skipped_short = 0;   // in-frame runs shorter than 5 observations
  int skipped_bounds = 0;  // crops that would leave the canvas
};

/// Integer crop origin for a track at frame t; false when the 32x32 window
/// centered on the sprite would leave the canvas.
bool crop_origin(const SpriteTrack& track, int t, int canvas, int* x0, int* y0);

/// Sliding window of stride 1 over every in-frame run of every track.
std::vector<ObjectCube> extract_cubes(const Scene& scene, ExtractStats* stats = nullptr);

/// Per-pixel displacement for the crop at frame_index. ground_truth paints
/// the sprite's exact displacement over its support mask; frame_diff stores
/// the signed grayscale difference of the two crops on both channels.
FlowMap compute_flow(const Scene& scene, const SpriteTrack& track, int frame_index, FlowMode mode);

}  // namespace mcvad::datagen
