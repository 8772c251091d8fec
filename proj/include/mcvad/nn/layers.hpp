#pragma once

#include <cmath>
#include <string>

#include "mcvad/nn/param.hpp"

namespace mcvad::nn {

// All layers are functional: forward() is const and writes its intermediates
// into a caller-owned cache, backward() reads that cache and accumulates into
// the parameter gradients. This keeps shared layers (the output projection is
// run on two streams per step) and concurrent inference straightforward.

template <typename T>
class Linear {
 public:
  Param<T> weight;  // (in, out)
  Param<T> bias;    // (1, out)

  struct Cache {
    Mat<T> input;
  };

  Linear() = default;
  Linear(const std::string& name, Eigen::Index in, Eigen::Index out) { init(name, in, out); }

  void init(const std::string& name, Eigen::Index in, Eigen::Index out) {
    weight.name = name + ".weight";
    bias.name = name + ".bias";
    weight.resize(in, out);
    bias.resize(1, out);
  }

  void init_params(Rng& rng, double sigma = 0.02) { weight.init_trunc_normal(rng, sigma); }

  Eigen::Index in_dim() const { return weight.value.rows(); }
  Eigen::Index out_dim() const { return weight.value.cols(); }

  Mat<T> forward(const Mat<T>& x, Cache& cache) const {
    require(x.cols() == in_dim(), "Linear " + weight.name + ": input width " +
                                      std::to_string(x.cols()) + " != " + std::to_string(in_dim()));
    cache.input = x;
    Mat<T> y(x.rows(), out_dim());
    y.noalias() = x * weight.value;
    y.rowwise() += bias.value.row(0);
    return y;
  }

  /// Inference-only path; skips the cache copy.
  Mat<T> apply(const Mat<T>& x) const {
    Mat<T> y(x.rows(), out_dim());
    y.noalias() = x * weight.value;
    y.rowwise() += bias.value.row(0);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy, const Cache& cache) {
    backward_params_only(dy, cache);
    Mat<T> dx(dy.rows(), in_dim());
    dx.noalias() = dy * weight.value.transpose();
    return dx;
  }

  /// Gradient accumulation without the input-gradient GEMM, for first layers.
  void backward_params_only(const Mat<T>& dy, const Cache& cache) {
    weight.grad.noalias() += cache.input.transpose() * dy;
    bias.grad.row(0) += dy.colwise().sum();
  }

  void collect(ParamList<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }
};

template <typename T>
class LayerNorm {
 public:
  Param<T> gamma;  // (1, dim)
  Param<T> beta;   // (1, dim)
  static constexpr double kEps = 1e-5;

  struct Cache {
    Mat<T> xhat;
    Vec<T> inv_std;
  };

  LayerNorm() = default;
  explicit LayerNorm(const std::string& name, Eigen::Index dim) { init(name, dim); }

  void init(const std::string& name, Eigen::Index dim) {
    gamma.name = name + ".gamma";
    beta.name = name + ".beta";
    gamma.resize(1, dim);
    gamma.value.setOnes();
    beta.resize(1, dim);
  }

  Mat<T> forward(const Mat<T>& x, Cache& cache) const {
    const Eigen::Index n = x.cols();
    cache.xhat.resize(x.rows(), n);
    cache.inv_std.resize(x.rows());
    Mat<T> y(x.rows(), n);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      T mean = x.row(r).mean();
      T var = (x.row(r).array() - mean).square().sum() / static_cast<T>(n);
      T inv = T(1) / std::sqrt(var + static_cast<T>(kEps));
      cache.inv_std(r) = inv;
      cache.xhat.row(r) = ((x.row(r).array() - mean) * inv).matrix();
      y.row(r) = cache.xhat.row(r).cwiseProduct(gamma.value.row(0)) + beta.value.row(0);
    }
    return y;
  }

  Mat<T> backward(const Mat<T>& dy, const Cache& cache) {
    const Eigen::Index n = dy.cols();
    Mat<T> dx(dy.rows(), n);
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
      auto dyr = dy.row(r);
      auto xh = cache.xhat.row(r);
      gamma.grad.row(0) += dyr.cwiseProduct(xh);
      beta.grad.row(0) += dyr;
      Mat<T> dxhat = dyr.cwiseProduct(gamma.value.row(0));
      T m1 = dxhat.row(0).mean();
      T m2 = dxhat.row(0).cwiseProduct(xh).mean();
      dx.row(r) =
          (((dxhat.row(0).array() - m1) - xh.array() * m2) * cache.inv_std(r)).matrix();
    }
    return dx;
  }

  void collect(ParamList<T>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }
};

/// Exact GELU, x * Phi(x).
template <typename T>
struct Gelu {
  struct Cache {
    Mat<T> input;
  };

  static Mat<T> forward(const Mat<T>& x, Cache& cache) {
    cache.input = x;
    return x.unaryExpr([](T v) {
      return static_cast<T>(0.5 * static_cast<double>(v) *
                            (1.0 + std::erf(static_cast<double>(v) * M_SQRT1_2)));
    });
  }

  static Mat<T> backward(const Mat<T>& dy, const Cache& cache) {
    Mat<T> d = cache.input.unaryExpr([](T v) {
      double x = static_cast<double>(v);
      double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
      double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
      return static_cast<T>(cdf + x * phi);
    });
    return dy.cwiseProduct(d);
  }
};

template <typename T>
struct Relu {
  struct Cache {
    Mat<T> input;
  };

  static Mat<T> forward(const Mat<T>& x, Cache& cache) {
    cache.input = x;
    return x.cwiseMax(T(0));
  }

  static Mat<T> backward(const Mat<T>& dy, const Cache& cache) {
    return dy.cwiseProduct(
        cache.input.unaryExpr([](T v) { return v > T(0) ? T(1) : T(0); }));
  }
};

}  // namespace mcvad::nn
