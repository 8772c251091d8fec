#pragma once

#include <json.hpp>

#include "mcvad/datagen/scene.hpp"
#include "mcvad/eval/evaluate.hpp"
#include "mcvad/model/context_vit.hpp"
#include "mcvad/model/motion_cae.hpp"
#include "mcvad/train/train.hpp"

namespace mcvad::cli {

struct DataConfig {
  std::string root = "data/run";
  int train_scenes = 40;
  int test_scenes = 12;
  int frames_per_scene = 30;
  int sprites_per_scene = 3;
  double anomaly_rate = 0.4;
  int canvas = 64;
  std::string flow_mode = "ground_truth";
  double speed_min = 0.8, speed_max = 1.3;
  int size_min = 8, size_max = 16;
  double fast_multiplier = 3.0;
  std::array<double, 3> anomaly_mix{0.4, 0.3, 0.3};
  bool ensure_test_anomaly = true;
  bool force = false;
};

struct EvalOptions {
  ScoreWeights weights;  // (2.0, 1.0) by default
  int mask_draws = 1;
  uint64_t mask_seed = 0;
  std::string aggregation = "max";
  bool normalize_per_video = true;
};

struct AblateOptions {
  std::vector<uint64_t> seeds{1, 2, 3};
  int epochs = 6;
};

/// Merged per-run configuration: JSON file over defaults, CLI flags on top.
struct RunConfig {
  uint64_t seed = 1;
  std::string out = "runs/run";
  bool motion = true;
  DataConfig data;
  VitConfig model;
  train::TrainConfig train;
  int motion_epochs = 20;
  EvalOptions eval;
  AblateOptions ablate;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);

  /// Resolved snapshot every command drops into its output directory.
  void write_snapshot(const std::string& dir) const;
};

StreamSet parse_streams(const std::string& csv);
std::string streams_to_string(const StreamSet& s);

}  // namespace mcvad::cli
