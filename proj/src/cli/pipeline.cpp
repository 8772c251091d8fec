#include "mcvad/cli/pipeline.hpp"

namespace mcvad::pipeline {

RunOutcome train_and_score(const VitConfig& vit_cfg, const train::TrainConfig& appearance_cfg,
                           bool with_motion, const CaeConfig& cae_cfg,
                           const train::TrainConfig& motion_cfg,
                           const datagen::LoadedDataset& train_data,
                           const datagen::LoadedDataset& test_data, const ScoreWeights& weights,
                           const eval::MaskPolicy& policy) {
  RunOutcome outcome;
  auto appearance = train::train_appearance(vit_cfg, appearance_cfg, train_data);
  outcome.appearance_log = appearance.log;

  if (with_motion) {
    auto motion = train::train_motion(cae_cfg, motion_cfg, train_data);
    outcome.motion_log = motion.log;
    outcome.records =
        eval::score_dataset(appearance.model, &motion.model, test_data, weights, policy);
  } else {
    outcome.records = eval::score_dataset(appearance.model, nullptr, test_data, weights, policy);
  }
  return outcome;
}

const std::vector<AblationRow>& ablation_rows() {
  static const std::vector<AblationRow> rows = {
      {"none", StreamSet{false, false, false}},
      {"masked", StreamSet{true, false, false}},
      {"masked_whole", StreamSet{true, true, false}},
      {"all", StreamSet{true, true, true}},
  };
  return rows;
}

}  // namespace mcvad::pipeline
