#pragma once

#include <string>
#include <vector>

#include "mcvad/core/common.hpp"
#include "mcvad/core/rng.hpp"

namespace mcvad::nn {

template <typename T>
struct Param {
  std::string name;
  WMat<T> value;
  WMat<T> grad;

  void resize(Eigen::Index rows, Eigen::Index cols) {
    value.setZero(rows, cols);
    grad.setZero(rows, cols);
  }

  Eigen::Index size() const { return value.size(); }
  void zero_grad() { grad.setZero(); }

  /// Truncated-normal fill, sigma 0.02 by default.
  void init_trunc_normal(Rng& rng, double sigma = 0.02) {
    for (Eigen::Index j = 0; j < value.cols(); ++j)
      for (Eigen::Index i = 0; i < value.rows(); ++i)
        value(i, j) = static_cast<T>(rng.truncated_normal(sigma));
  }
};

template <typename T>
using ParamList = std::vector<Param<T>*>;

template <typename T>
inline size_t param_count(const ParamList<T>& params) {
  size_t n = 0;
  for (const auto* p : params) n += static_cast<size_t>(p->size());
  return n;
}

template <typename T>
inline void zero_grads(const ParamList<T>& params) {
  for (auto* p : params) p->zero_grad();
}

template <typename T>
inline bool all_params_finite(const ParamList<T>& params) {
  for (const auto* p : params)
    if (!p->value.allFinite()) return false;
  return true;
}

}  // namespace mcvad::nn
