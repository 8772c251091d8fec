#include "mcvad/datagen/cubes.hpp"

#include <cmath>

namespace mcvad::datagen {

const char* to_string(FlowMode m) {
  return m == FlowMode::ground_truth ? "ground_truth" : "frame_diff";
}

FlowMode flow_mode_from_string(const std::string& s) {
  if (s == "ground_truth") return FlowMode::ground_truth;
  if (s == "frame_diff") return FlowMode::frame_diff;
  throw Error("unknown flow mode: " + s);
}

bool crop_origin(const SpriteTrack& track, int t, int canvas, int* x0, int* y0) {
  const auto& c = track.centers[static_cast<size_t>(t)];
  int cx = static_cast<int>(std::lround(c[0]));
  int cy = static_cast<int>(std::lround(c[1]));
  *x0 = cx - kFrameSize / 2;
  *y0 = cy - kFrameSize / 2;
  return *x0 >= 0 && *y0 >= 0 && *x0 + kFrameSize <= canvas && *y0 + kFrameSize <= canvas;
}

namespace {

void copy_crop(const VecF& frame, int canvas, int x0, int y0, float* dst) {
  const int plane = canvas * canvas;
  for (int c = 0; c < kFrameChannels; ++c)
    for (int y = 0; y < kFrameSize; ++y)
      for (int x = 0; x < kFrameSize; ++x)
        dst[(c * kFrameSize + y) * kFrameSize + x] =
            frame[c * plane + (y0 + y) * canvas + (x0 + x)];
}

}  // namespace

std::vector<ObjectCube> extract_cubes(const Scene& scene, ExtractStats* stats) {
  const int canvas = scene.config.canvas;
  const int n = scene.config.n_frames;
  ExtractStats local;
  std::vector<ObjectCube> cubes;

  for (const auto& track : scene.tracks) {
    // consecutive in-frame runs
    int run_start = -1;
    for (int t = 0; t <= n; ++t) {
      bool inside = t < n && track.in_frame(t, canvas);
      if (inside && run_start < 0) run_start = t;
      if (!inside && run_start >= 0) {
        int run_len = t - run_start;
        if (run_len < kCubeFrames) {
          ++local.skipped_short;
        } else {
          for (int t5 = run_start + kCubeFrames - 1; t5 < t; ++t5) {
            int x0, y0;
            if (!crop_origin(track, t5, canvas, &x0, &y0)) {
              ++local.skipped_bounds;
              continue;
            }
            ObjectCube cube;
            cube.frames.resize(kCubeFrames, kFrameDim);
            for (int k = 0; k < kCubeFrames; ++k)
              copy_crop(scene.frames[static_cast<size_t>(t5 - kCubeFrames + 1 + k)], canvas, x0,
                        y0, cube.frames.row(k).data());
            cube.video_id = scene.video_id;
            cube.frame_index = t5;
            cube.track_id = track.track_id;
            cube.label = scene.config.train_split
                             ? 0
                             : (track_window_anomalous(track, t5 - kCubeFrames + 1, t5) ? 1 : 0);
            cubes.push_back(std::move(cube));
            ++local.cubes;
          }
        }
        run_start = -1;
      }
    }
  }
  if (stats) *stats = local;
  return cubes;
}

FlowMap compute_flow(const Scene& scene, const SpriteTrack& track, int frame_index,
                     FlowMode mode) {
  require(frame_index > 0, "compute_flow: frame " + std::to_string(frame_index) +
                               " has no previous frame");
  require(frame_index < scene.config.n_frames, "compute_flow: frame index out of range");

  const int canvas = scene.config.canvas;
  int x0, y0;
  require(crop_origin(track, frame_index, canvas, &x0, &y0),
          "compute_flow: crop leaves the canvas at frame " + std::to_string(frame_index));

  FlowMap flow;
  flow.video_id = scene.video_id;
  flow.frame_index = frame_index;
  flow.track_id = track.track_id;
  flow.values = VecF::Zero(kFlowDim);
  const int plane = kFrameSize * kFrameSize;

  if (mode == FlowMode::ground_truth) {
    auto d = track.displacement_at(frame_index);
    const auto& c = track.centers[static_cast<size_t>(frame_index)];
    for (int y = 0; y < kFrameSize; ++y)
      for (int x = 0; x < kFrameSize; ++x)
        if (sprite_coverage(track.spec, c[0], c[1], x0 + x, y0 + y) >= 0.5) {
          flow.values[y * kFrameSize + x] = static_cast<float>(d[0]);
          flow.values[plane + y * kFrameSize + x] = static_cast<float>(d[1]);
        }
  } else {
    const VecF& cur = scene.frames[static_cast<size_t>(frame_index)];
    const VecF& prev = scene.frames[static_cast<size_t>(frame_index - 1)];
    const int cplane = canvas * canvas;
    for (int y = 0; y < kFrameSize; ++y)
      for (int x = 0; x < kFrameSize; ++x) {
        int p = (y0 + y) * canvas + (x0 + x);
        float gc = (cur[p] + cur[cplane + p] + cur[2 * cplane + p]) / 3.0f;
        float gp = (prev[p] + prev[cplane + p] + prev[2 * cplane + p]) / 3.0f;
        float diff = gc - gp;
        flow.values[y * kFrameSize + x] = diff;
        flow.values[plane + y * kFrameSize + x] = diff;
      }
  }
  return flow;
}

}  // namespace mcvad::datagen
