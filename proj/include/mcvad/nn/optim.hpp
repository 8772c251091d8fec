#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mcvad/nn/param.hpp"

namespace mcvad::nn {

/// Cosine annealing with warm restarts, evaluated per step. The value at the
/// very end of a period (step == period boundary) is min_lr; the next step
/// begins the new, t_mult-times longer period.
struct CosineRestartSchedule {
  double max_lr = 1.5e-4;
  double min_lr = 1e-5;
  int64_t period0 = 1;
  int t_mult = 2;

  double lr_at(int64_t step) const {
    require(step >= 0, "lr schedule: negative step");
    if (period0 <= 0) return max_lr;
    int64_t s = step;
    int64_t period = period0;
    while (s > period) {
      s -= period;
      period *= t_mult;
    }
    double x = static_cast<double>(s) / static_cast<double>(period);
    return min_lr + 0.5 * (max_lr - min_lr) * (1.0 + std::cos(M_PI * x));
  }
};

struct AdamWConfig {
  double weight_decay = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
};

/// AdamW with decoupled weight decay: p <- p - lr*wd*p - lr*mhat/(sqrt(vhat)+eps).
template <typename T>
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  void step(const ParamList<T>& params, double lr) {
    if (moments_.empty()) {
      moments_.resize(params.size());
      for (size_t i = 0; i < params.size(); ++i) {
        moments_[i].m.setZero(params[i]->value.rows(), params[i]->value.cols());
        moments_[i].v.setZero(params[i]->value.rows(), params[i]->value.cols());
      }
    }
    require(moments_.size() == params.size(), "AdamW: parameter list changed");
    ++t_;
    const T b1 = static_cast<T>(cfg_.beta1), b2 = static_cast<T>(cfg_.beta2);
    const T bc1 = static_cast<T>(1.0 - std::pow(cfg_.beta1, static_cast<double>(t_)));
    const T bc2 = static_cast<T>(1.0 - std::pow(cfg_.beta2, static_cast<double>(t_)));
    for (size_t i = 0; i < params.size(); ++i) {
      auto& p = *params[i];
      auto& mo = moments_[i];
      p.value *= static_cast<T>(1.0 - lr * cfg_.weight_decay);
      mo.m = b1 * mo.m + (T(1) - b1) * p.grad;
      mo.v.array() = b2 * mo.v.array() + (T(1) - b2) * p.grad.array().square();
      p.value.array() -=
          static_cast<T>(lr) * (mo.m.array() / bc1) /
          ((mo.v.array() / bc2).sqrt() + static_cast<T>(cfg_.eps));
    }
  }

  int64_t steps_taken() const { return t_; }

 private:
  struct Moments {
    WMat<T> m, v;
  };
  AdamWConfig cfg_;
  std::vector<Moments> moments_;
  int64_t t_ = 0;
};

/// Scales gradients so their global L2 norm is at most max_norm.
/// Returns the pre-clip norm. max_norm <= 0 disables clipping.
template <typename T>
double clip_grad_norm(const ParamList<T>& params, double max_norm) {
  double sq = 0.0;
  for (const auto* p : params) sq += static_cast<double>(p->grad.squaredNorm());
  double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    T s = static_cast<T>(max_norm / norm);
    for (auto* p : params) p->grad *= s;
  }
  return norm;
}

}  // namespace mcvad::nn
