#pragma once

#include "mcvad/cli/run_config.hpp"

namespace mcvad::pipeline {

/// Train-from-scratch then score the test split; models are discarded and
/// the scored records (with all loss components) returned for re-fusion
/// under any weights.
struct RunOutcome {
  std::vector<eval::ScoreRecord> records;
  std::vector<train::EpochLog> appearance_log;
  std::vector<train::EpochLog> motion_log;
};

RunOutcome train_and_score(const VitConfig& vit_cfg, const train::TrainConfig& appearance_cfg,
                           bool with_motion, const CaeConfig& cae_cfg,
                           const train::TrainConfig& motion_cfg,
                           const datagen::LoadedDataset& train_data,
                           const datagen::LoadedDataset& test_data, const ScoreWeights& weights,
                           const eval::MaskPolicy& policy);

struct AblationRow {
  std::string name;
  StreamSet streams;
};

/// The four stream settings of the ablation table, weakest to strongest.
const std::vector<AblationRow>& ablation_rows();

}  // namespace mcvad::pipeline
