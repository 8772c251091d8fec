#pragma once

#include <array>

#include "mcvad/datagen/cubes.hpp"

namespace mcvad::datagen {

struct ManifestEntry {
  std::string cube_path;  // relative to the dataset root
  std::string flow_path;
  std::string video_id;
  int64_t frame_index = 0;
  std::string track_id;
  int label = 0;
};

struct DatasetManifest {
  int format_version = 1;
  std::string split;      // "train" | "test"
  std::string flow_mode;  // "ground_truth" | "frame_diff"
  std::array<double, 3> pixel_mean{};
  std::array<double, 3> pixel_std{};
  std::vector<ManifestEntry> entries;
};

// Root layout: manifest.json, cubes/<video>_<frame>_<track>.bin,
// flows/<video>_<frame>_<track>.bin. Any directory matching this layout is
// accepted, so externally converted benchmark cubes can be dropped in.

/// Writes all arrays plus the manifest. Computes per-channel pixel stats,
/// sorts entries by (video, frame, track), refuses to overwrite an existing
/// manifest unless force is set, and rejects labeled cubes in a train split.
void write_dataset(const std::vector<ObjectCube>& cubes, const std::vector<FlowMap>& flows,
                   const std::string& split, FlowMode flow_mode, const std::string& root,
                   bool force = false);

/// Lazy handle: the manifest is parsed and file presence validated eagerly;
/// arrays load on demand with shape checks.
class Dataset {
 public:
  std::string root;
  DatasetManifest manifest;

  size_t size() const { return manifest.entries.size(); }
  ObjectCube load_cube(size_t index) const;
  VecF load_flow(size_t index) const;
};

Dataset read_dataset(const std::string& root);

/// Fully materialized split for the optimization loops.
struct LoadedDataset {
  std::vector<ManifestEntry> entries;
  std::string flow_mode;
  MatF cubes;  // (N, 5*3072)
  MatF flows;  // (N, 2048)
};

LoadedDataset load_all(const Dataset& dataset);

}  // namespace mcvad::datagen
