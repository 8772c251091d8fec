#include "mcvad/objectives/losses.hpp"

#include <cmath>

namespace mcvad {

double mse(const float* pred, const float* target, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    acc += d * d;
  }
  require(std::isfinite(acc), "mse: non-finite inputs");
  return acc / static_cast<double>(n);
}

LossBreakdown pred_loss(const PredictionBundle& bundle, const MatF& cube_frames) {
  require(cube_frames.rows() == kCubeFrames && cube_frames.cols() == kFrameDim,
          "pred_loss: cube must be 5 frames of " + std::to_string(kFrameDim) + " values");
  LossBreakdown out;
  const float* t5 = cube_frames.row(kCubeFrames - 1).data();
  if (bundle.whole.size() > 0) {
    require(bundle.whole.size() == kFrameDim, "pred_loss: whole prediction has wrong shape");
    out.l_whole = mse(bundle.whole.data(), t5, kFrameDim);
  }
  if (bundle.partial.size() > 0) {
    require(bundle.partial.size() == kFrameDim, "pred_loss: partial prediction has wrong shape");
    out.l_partial = mse(bundle.partial.data(), t5, kFrameDim);
  }
  for (const auto& [pos, recon] : bundle.masked_recons) {
    require(pos >= 0 && pos < kCubeInputs, "pred_loss: masked position out of range");
    require(recon.size() == kFrameDim, "pred_loss: masked reconstruction has wrong shape");
    out.l_masked += mse(recon.data(), cube_frames.row(pos).data(), kFrameDim);
  }
  out.l_pred = out.l_whole + out.l_partial + out.l_masked;
  return out;
}

double flow_loss(const VecF& recon, const VecF& ground_truth) {
  require(recon.size() == ground_truth.size() && recon.size() == kFlowDim,
          "flow_loss: flow maps must both be " + std::to_string(kFlowDim) + " values");
  return mse(recon.data(), ground_truth.data(), recon.size());
}

double anomaly_score(double l_pred, double l_recon, const ScoreWeights& w) {
  require(std::isfinite(l_pred) && std::isfinite(l_recon), "anomaly_score: non-finite loss");
  require(l_pred >= 0.0 && l_recon >= 0.0, "anomaly_score: losses must be non-negative");
  require(w.lambda_a >= 0.0 && w.lambda_o >= 0.0, "anomaly_score: weights must be non-negative");
  require(w.lambda_a > 0.0 || w.lambda_o > 0.0, "anomaly_score: weights must not both be zero");
  return w.lambda_a * l_pred + w.lambda_o * l_recon;
}

}  // namespace mcvad
