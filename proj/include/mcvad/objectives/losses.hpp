#pragma once

#include "mcvad/model/context_vit.hpp"

namespace mcvad {

/// The three prediction-loss terms plus the flow-reconstruction term.
/// Every term is a mean-squared error per element, so appearance (3072-dim)
/// and flow (2048-dim) losses share one scale.
struct LossBreakdown {
  double l_whole = 0.0;
  double l_partial = 0.0;
  double l_masked = 0.0;
  double l_pred = 0.0;  // l_whole + l_partial + l_masked
  double l_recon = 0.0;
};

struct ScoreWeights {
  double lambda_a = 2.0;
  double lambda_o = 1.0;
};

/// Mean squared error with double accumulation; rejects NaN inputs.
double mse(const float* pred, const float* target, Eigen::Index n);

/// Eq.-style prediction loss of one cube: whole/partial future terms against
/// the t5 frame and the masked term summed over m in M.
LossBreakdown pred_loss(const PredictionBundle& bundle, const MatF& cube_frames);

/// Flow reconstruction error (mean squared per element).
double flow_loss(const VecF& recon, const VecF& ground_truth);

/// Weighted anomaly score: lambda_a * l_pred + lambda_o * l_recon.
double anomaly_score(double l_pred, double l_recon, const ScoreWeights& w);

// ---------------------------------------------------------------------------
// Batched loss used by the optimization loops and the gradient oracles.
// The batch loss is the mean over cubes of the per-cube loss, so the
// gradients below carry a 1/(dim * batch) factor.

template <typename T>
struct BatchLossTerms {
  double l_whole = 0.0, l_partial = 0.0, l_masked = 0.0;
  double total() const { return l_whole + l_partial + l_masked; }
};

/// Computes the batch-mean prediction loss and, when grads is non-null, the
/// loss gradients w.r.t. the model outputs (zero rows for unmasked frames).
template <typename T>
BatchLossTerms<T> pred_loss_batch(const typename ContextVit<T>::Outputs& out,
                                  const Mat<T>& targets_t5, const Mat<T>& input_frames,
                                  const std::vector<MaskPattern>& masks, const StreamSet& streams,
                                  bool whole_head_present,
                                  typename ContextVit<T>::Outputs* grads) {
  const Eigen::Index batch = targets_t5.rows();
  const double dim_norm = static_cast<double>(kFrameDim) * static_cast<double>(batch);
  BatchLossTerms<T> terms;

  const bool use_whole = whole_head_present;  // plain future prediction trains this term too
  if (use_whole) {
    Mat<T> diff = out.whole - targets_t5;
    terms.l_whole = static_cast<double>(diff.template cast<double>().squaredNorm()) / dim_norm;
    if (grads) grads->whole = (T(2) / static_cast<T>(dim_norm)) * diff;
  }
  if (streams.partial) {
    Mat<T> diff = out.partial - targets_t5;
    terms.l_partial = static_cast<double>(diff.template cast<double>().squaredNorm()) / dim_norm;
    if (grads) grads->partial = (T(2) / static_cast<T>(dim_norm)) * diff;
  }
  if (streams.masked) {
    if (grads) grads->decoded = Mat<T>::Zero(batch * kCubeInputs, kFrameDim);
    double acc = 0.0;
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int i : masks[static_cast<size_t>(b)].masked_indices()) {
        Eigen::Index row = b * kCubeInputs + i;
        Mat<T> diff = out.decoded.row(row) -
                      input_frames.row(b).segment(i * kFrameDim, kFrameDim);
        acc += static_cast<double>(diff.template cast<double>().squaredNorm());
        if (grads) grads->decoded.row(row) = (T(2) / static_cast<T>(dim_norm)) * diff;
      }
    }
    terms.l_masked = acc / dim_norm;
  }
  return terms;
}

/// Batch-mean flow reconstruction loss with optional gradient.
template <typename T>
double flow_loss_batch(const Mat<T>& recon, const Mat<T>& targets, Mat<T>* grad) {
  require(recon.rows() == targets.rows() && recon.cols() == targets.cols(),
          "flow_loss_batch: shape mismatch");
  const double dim_norm = static_cast<double>(recon.cols()) * static_cast<double>(recon.rows());
  Mat<T> diff = recon - targets;
  if (grad) *grad = (T(2) / static_cast<T>(dim_norm)) * diff;
  return static_cast<double>(diff.template cast<double>().squaredNorm()) / dim_norm;
}

}  // namespace mcvad
