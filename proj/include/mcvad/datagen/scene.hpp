#pragma once

#include <array>
#include <string>
#include <vector>

#include "mcvad/core/common.hpp"
#include "mcvad/core/rng.hpp"

namespace mcvad::datagen {

enum class ShapeKind { square, circle, triangle };
enum class AnomalyTag { none, fast, reverse, novel_shape };

const char* to_string(ShapeKind k);
const char* to_string(AnomalyTag t);

struct SpriteSpec {
  ShapeKind shape = ShapeKind::square;
  int size_px = 10;  // 6..20, fits inside the 32x32 crop
  std::array<float, 3> color{1.0f, 1.0f, 1.0f};
  double vx = 1.0, vy = 0.0;  // px/frame
  AnomalyTag anomaly = AnomalyTag::none;
};

struct SpriteTrack {
  SpriteSpec spec;
  std::string track_id;
  int reverse_at = -1;  // frame at which velocity flips for reverse anomalies
  std::vector<std::array<double, 2>> centers;  // (x, y) per frame

  /// Exact displacement between frames t-1 and t.
  std::array<double, 2> displacement_at(int t) const {
    return {centers[static_cast<size_t>(t)][0] - centers[static_cast<size_t>(t - 1)][0],
            centers[static_cast<size_t>(t)][1] - centers[static_cast<size_t>(t - 1)][1]};
  }

  bool in_frame(int t, int canvas) const {
    const auto& c = centers[static_cast<size_t>(t)];
    return c[0] >= 0.0 && c[0] < canvas && c[1] >= 0.0 && c[1] < canvas;
  }
};

struct SceneConfig {
  int n_frames = 32;
  int n_sprites = 3;
  double anomaly_rate = 0.0;
  int canvas = 64;
  bool train_split = true;

  // sprite population
  double speed_min = 0.8, speed_max = 1.3;
  int size_min = 8, size_max = 16;
  double fast_multiplier = 3.0;
  std::array<double, 3> anomaly_mix{0.4, 0.3, 0.3};  // fast, reverse, novel_shape
  // benchmark-style test scenes: every test video contains at least one
  // anomalous object (disable for rate-calibration studies)
  bool ensure_test_anomaly = true;
  float background = 0.08f;
};

struct Scene {
  SceneConfig config;
  std::string video_id;
  std::vector<VecF> frames;  // 3 * canvas * canvas each, CHW
  std::vector<SpriteTrack> tracks;
};

/// Sprite placement: the path is anchored at mid-scene and follows the spec
/// velocity, flipping direction at reverse_at when set.
struct SpriteDef {
  SpriteSpec spec;
  double anchor_x = 32.0, anchor_y = 32.0;  // position at frame n_frames/2
  int reverse_at = -1;
};

/// Builds tracks from explicit sprite definitions and renders all frames.
Scene assemble_scene(const SceneConfig& config, const std::vector<SpriteDef>& sprites,
                     const std::string& video_id);

/// Pure function of (config, seed): sprites with constant velocity, test-only
/// anomalies that run fast, reverse direction mid-scene, or use a shape
/// absent from training.
Scene generate_scene(const SceneConfig& config, uint64_t seed, const std::string& video_id = "");

/// Coverage predicate of a sprite at a float center, sampled at pixel centers.
bool sprite_covers(const SpriteSpec& spec, double cx, double cy, int px, int py);

/// Fraction of the pixel covered by the sprite (4x4 supersampling). Frames
/// are rendered anti-aliased so sub-pixel motion is visible between frames.
double sprite_coverage(const SpriteSpec& spec, double cx, double cy, int px, int py);

/// Whether the track's anomaly is observable inside the window [t1, t5].
bool track_window_anomalous(const SpriteTrack& track, int t1, int t5);

}  // namespace mcvad::datagen
