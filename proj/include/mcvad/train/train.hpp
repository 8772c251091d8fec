#pragma once

#include "mcvad/datagen/dataset.hpp"
#include "mcvad/model/context_vit.hpp"
#include "mcvad/model/motion_cae.hpp"
#include "mcvad/nn/optim.hpp"
#include "mcvad/objectives/losses.hpp"

namespace mcvad::train {

struct TrainConfig {
  double lr = 1.5e-4;
  double weight_decay = 0.05;
  double eps = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double min_lr = 1e-5;
  int batch_size = 128;
  int epochs = 20;
  int t0_epochs = 5;  // first cosine restart period
  int t_mult = 2;
  double clip_norm = 1.0;  // <= 0 disables clipping
  double masking_ratio = 0.5;
  uint64_t seed = 1;

  void validate() const {
    require(lr > min_lr && min_lr > 0.0, "TrainConfig: lr > min_lr > 0 required");
    require(batch_size >= 1, "TrainConfig: batch_size must be at least 1");
    require(epochs >= 1, "TrainConfig: epochs must be at least 1");
    require(t0_epochs >= 1 && t_mult >= 1, "TrainConfig: bad restart schedule");
  }
};

/// One record per epoch: step is the global step count at the epoch's end,
/// lr the rate used at its last step, losses are epoch means.
struct EpochLog {
  int epoch = 0;
  int64_t step = 0;
  double lr = 0.0;
  double l_whole = 0.0, l_partial = 0.0, l_masked = 0.0, l_recon = 0.0;
  double loss = 0.0;
};

nn::CosineRestartSchedule make_schedule(const TrainConfig& cfg, Eigen::Index n_samples);

struct AppearanceTrainResult {
  ContextVit<float> model;
  std::vector<EpochLog> log;
};

/// Trains the contextual-appearance branch from scratch on an anomaly-free
/// split. A fresh mask is drawn per cube per step. Deterministic in
/// (config, data, seed) on one platform.
AppearanceTrainResult train_appearance(const VitConfig& model_cfg, const TrainConfig& cfg,
                                       const datagen::LoadedDataset& data);

struct MotionTrainResult {
  MotionCae<float> model;
  std::vector<EpochLog> log;
};

MotionTrainResult train_motion(const CaeConfig& model_cfg, const TrainConfig& cfg,
                               const datagen::LoadedDataset& data);

/// Line-delimited JSON records {step, epoch, lr, loss terms}.
void write_loss_log(const std::string& path, const std::vector<EpochLog>& log);

}  // namespace mcvad::train
