#include "mcvad/train/train.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

namespace mcvad::train {

namespace {

void require_all_normal(const datagen::LoadedDataset& data) {
  for (const auto& e : data.entries)
    require(e.label == 0, "training data must be anomaly-free, found label=1 for " + e.video_id +
                              ":" + std::to_string(e.frame_index));
  require(data.cubes.rows() > 0, "training data is empty");
}

std::string batch_identifier(const datagen::LoadedDataset& data,
                             const std::vector<Eigen::Index>& order, Eigen::Index begin) {
  const auto& e = data.entries[static_cast<size_t>(order[static_cast<size_t>(begin)])];
  return e.video_id + ":" + std::to_string(e.frame_index) + ":" + e.track_id;
}

}  // namespace

nn::CosineRestartSchedule make_schedule(const TrainConfig& cfg, Eigen::Index n_samples) {
  int64_t steps_per_epoch =
      (static_cast<int64_t>(n_samples) + cfg.batch_size - 1) / cfg.batch_size;
  nn::CosineRestartSchedule sched;
  sched.max_lr = cfg.lr;
  sched.min_lr = cfg.min_lr;
  sched.period0 = std::max<int64_t>(1, cfg.t0_epochs * steps_per_epoch);
  sched.t_mult = cfg.t_mult;
  return sched;
}

AppearanceTrainResult train_appearance(const VitConfig& model_cfg, const TrainConfig& cfg,
                                       const datagen::LoadedDataset& data) {
  cfg.validate();
  require_all_normal(data);
  if (model_cfg.masking_enabled())
    require(model_cfg.mask_ratio == cfg.masking_ratio,
            "train_appearance: model mask_ratio and TrainConfig.masking_ratio disagree");

  AppearanceTrainResult result{ContextVit<float>(model_cfg), {}};
  ContextVit<float>& model = result.model;
  model.init_params(cfg.seed);
  nn::ParamList<float> params = model.params();

  nn::AdamW<float> opt({cfg.weight_decay, cfg.beta1, cfg.beta2, cfg.eps});
  nn::CosineRestartSchedule sched = make_schedule(cfg, data.cubes.rows());

  Rng order_rng(cfg.seed, /*stream=*/0x07de);
  Rng mask_rng(cfg.seed, /*stream=*/0x3a5c);

  const Eigen::Index n = data.cubes.rows();
  const Eigen::Index in_width = static_cast<Eigen::Index>(kCubeInputs) * kFrameDim;
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  typename ContextVit<float>::State state;
  int64_t step = 0;
  double lr = sched.lr_at(0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double ew = 0.0, ep = 0.0, em = 0.0;
    for (Eigen::Index begin = 0; begin < n; begin += cfg.batch_size) {
      const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n - begin);
      Mat<float> inputs(bs, in_width);
      Mat<float> targets(bs, kFrameDim);
      std::vector<MaskPattern> masks;
      for (Eigen::Index b = 0; b < bs; ++b) {
        Eigen::Index idx = order[static_cast<size_t>(begin + b)];
        inputs.row(b) = data.cubes.row(idx).segment(0, in_width);
        targets.row(b) = data.cubes.row(idx).segment(in_width, kFrameDim);
        if (model_cfg.masking_enabled())
          masks.push_back(sample_mask(model_cfg.mask_ratio, mask_rng));
      }

      auto out = model.forward(inputs, masks, state);
      typename ContextVit<float>::Outputs grads;
      auto terms = pred_loss_batch<float>(out, targets, inputs, masks, model_cfg.streams,
                                          model_cfg.has_whole_head(), &grads);
      if (!std::isfinite(terms.total()))
        throw Error("train_appearance: non-finite loss at step " + std::to_string(step) +
                    ", batch starting with " + batch_identifier(data, order, begin));

      nn::zero_grads(params);
      model.backward(grads, state);
      nn::clip_grad_norm(params, cfg.clip_norm);
      lr = sched.lr_at(step);
      opt.step(params, lr);
      ++step;

      double w = static_cast<double>(bs) / static_cast<double>(n);
      ew += terms.l_whole * w;
      ep += terms.l_partial * w;
      em += terms.l_masked * w;
    }
    EpochLog log;
    log.epoch = epoch;
    log.step = step;
    log.lr = lr;
    log.l_whole = ew;
    log.l_partial = ep;
    log.l_masked = em;
    log.loss = ew + ep + em;
    result.log.push_back(log);
  }
  require(nn::all_params_finite(params), "train_appearance: non-finite parameters after training");
  return result;
}

MotionTrainResult train_motion(const CaeConfig& model_cfg, const TrainConfig& cfg,
                               const datagen::LoadedDataset& data) {
  cfg.validate();
  require_all_normal(data);

  MotionTrainResult result{MotionCae<float>(model_cfg), {}};
  MotionCae<float>& model = result.model;
  model.init_params(cfg.seed);
  nn::ParamList<float> params = model.params();

  nn::AdamW<float> opt({cfg.weight_decay, cfg.beta1, cfg.beta2, cfg.eps});
  nn::CosineRestartSchedule sched = make_schedule(cfg, data.flows.rows());

  Rng order_rng(cfg.seed, /*stream=*/0x07de);
  const Eigen::Index n = data.flows.rows();
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  typename MotionCae<float>::State state;
  int64_t step = 0;
  double lr = sched.lr_at(0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double er = 0.0;
    for (Eigen::Index begin = 0; begin < n; begin += cfg.batch_size) {
      const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n - begin);
      Mat<float> batch(bs, kFlowDim);
      for (Eigen::Index b = 0; b < bs; ++b)
        batch.row(b) = data.flows.row(order[static_cast<size_t>(begin + b)]);

      Mat<float> recon = model.forward(batch, state);
      Mat<float> grad;
      double loss = flow_loss_batch<float>(recon, batch, &grad);
      if (!std::isfinite(loss))
        throw Error("train_motion: non-finite loss at step " + std::to_string(step) +
                    ", batch starting with " + batch_identifier(data, order, begin));

      nn::zero_grads(params);
      model.backward(grad, state);
      nn::clip_grad_norm(params, cfg.clip_norm);
      lr = sched.lr_at(step);
      opt.step(params, lr);
      ++step;

      er += loss * static_cast<double>(bs) / static_cast<double>(n);
    }
    EpochLog log;
    log.epoch = epoch;
    log.step = step;
    log.lr = lr;
    log.l_recon = er;
    log.loss = er;
    result.log.push_back(log);
  }
  require(nn::all_params_finite(params), "train_motion: non-finite parameters after training");
  return result;
}

void write_loss_log(const std::string& path, const std::vector<EpochLog>& log) {
  std::ofstream out(path);
  require(out.good(), "write_loss_log: cannot open " + path);
  for (const auto& e : log) {
    nlohmann::json j = {{"step", e.step},       {"epoch", e.epoch},
                        {"lr", e.lr},           {"l_whole", e.l_whole},
                        {"l_partial", e.l_partial}, {"l_masked", e.l_masked},
                        {"l_recon", e.l_recon}, {"loss", e.loss}};
    out << j.dump() << "\n";
  }
}

}  // namespace mcvad::train
