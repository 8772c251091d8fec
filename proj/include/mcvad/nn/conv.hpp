#pragma once

#include <string>

#include "mcvad/nn/param.hpp"

namespace mcvad::nn {

// Feature maps travel as (batch, channels*height*width) rows in CHW order.

struct ConvGeom {
  int channels, height, width;
  int kernel, stride, pad;
  int out_height() const { return (height + 2 * pad - kernel) / stride + 1; }
  int out_width() const { return (width + 2 * pad - kernel) / stride + 1; }
};

/// Unfold (B, C*H*W) into (B*Ho*Wo, C*k*k) patches.
template <typename T>
Mat<T> im2col(const Mat<T>& x, const ConvGeom& g) {
  const int ho = g.out_height(), wo = g.out_width();
  const Eigen::Index batch = x.rows();
  Mat<T> cols = Mat<T>::Zero(batch * ho * wo, g.channels * g.kernel * g.kernel);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const T* src = x.row(b).data();
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        T* dst = cols.row((b * ho + oy) * wo + ox).data();
        for (int c = 0; c < g.channels; ++c) {
          for (int ky = 0; ky < g.kernel; ++ky) {
            int iy = oy * g.stride - g.pad + ky;
            if (iy < 0 || iy >= g.height) continue;
            for (int kx = 0; kx < g.kernel; ++kx) {
              int ix = ox * g.stride - g.pad + kx;
              if (ix < 0 || ix >= g.width) continue;
              dst[(c * g.kernel + ky) * g.kernel + kx] = src[(c * g.height + iy) * g.width + ix];
            }
          }
        }
      }
    }
  }
  return cols;
}

/// Transpose of im2col: scatter-add patches back to (B, C*H*W).
template <typename T>
Mat<T> col2im(const Mat<T>& cols, const ConvGeom& g, Eigen::Index batch) {
  const int ho = g.out_height(), wo = g.out_width();
  Mat<T> x = Mat<T>::Zero(batch, g.channels * g.height * g.width);
  for (Eigen::Index b = 0; b < batch; ++b) {
    T* dst = x.row(b).data();
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        const T* src = cols.row((b * ho + oy) * wo + ox).data();
        for (int c = 0; c < g.channels; ++c) {
          for (int ky = 0; ky < g.kernel; ++ky) {
            int iy = oy * g.stride - g.pad + ky;
            if (iy < 0 || iy >= g.height) continue;
            for (int kx = 0; kx < g.kernel; ++kx) {
              int ix = ox * g.stride - g.pad + kx;
              if (ix < 0 || ix >= g.width) continue;
              dst[(c * g.height + iy) * g.width + ix] += src[(c * g.kernel + ky) * g.kernel + kx];
            }
          }
        }
      }
    }
  }
  return x;
}

namespace detail {

/// (B*Ho*Wo, C) rows -> (B, C*Ho*Wo) CHW rows.
template <typename T>
Mat<T> rows_to_chw(const Mat<T>& rows, Eigen::Index batch, int channels, int ho, int wo) {
  Mat<T> out(batch, static_cast<Eigen::Index>(channels) * ho * wo);
  for (Eigen::Index b = 0; b < batch; ++b) {
    T* dst = out.row(b).data();
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        const T* src = rows.row((b * ho + oy) * wo + ox).data();
        for (int c = 0; c < channels; ++c) dst[(c * ho + oy) * wo + ox] = src[c];
      }
  }
  return out;
}

template <typename T>
Mat<T> chw_to_rows(const Mat<T>& chw, Eigen::Index batch, int channels, int ho, int wo) {
  Mat<T> out(batch * ho * wo, channels);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const T* src = chw.row(b).data();
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        T* dst = out.row((b * ho + oy) * wo + ox).data();
        for (int c = 0; c < channels; ++c) dst[c] = src[(c * ho + oy) * wo + ox];
      }
  }
  return out;
}

}  // namespace detail

template <typename T>
class Conv2d {
 public:
  Param<T> weight;  // (Cin*k*k, Cout)
  Param<T> bias;    // (1, Cout)
  ConvGeom geom{};
  int out_channels = 0;

  struct Cache {
    Mat<T> cols;
  };

  void init(const std::string& name, int in_c, int out_c, int size, int kernel, int stride,
            int pad) {
    geom = ConvGeom{in_c, size, size, kernel, stride, pad};
    out_channels = out_c;
    weight.name = name + ".weight";
    bias.name = name + ".bias";
    weight.resize(static_cast<Eigen::Index>(in_c) * kernel * kernel, out_c);
    bias.resize(1, out_c);
  }

  void init_params(Rng& rng) {
    // He fan-in scaling
    double sigma = std::sqrt(2.0 / static_cast<double>(weight.value.rows()));
    weight.init_trunc_normal(rng, sigma);
  }

  Mat<T> forward(const Mat<T>& x, Cache& cache) const {
    require(x.cols() == static_cast<Eigen::Index>(geom.channels) * geom.height * geom.width,
            "Conv2d " + weight.name + ": bad input width");
    cache.cols = im2col(x, geom);
    Mat<T> rows(cache.cols.rows(), out_channels);
    rows.noalias() = cache.cols * weight.value;
    rows.rowwise() += bias.value.row(0);
    return detail::rows_to_chw(rows, x.rows(), out_channels, geom.out_height(), geom.out_width());
  }

  Mat<T> backward(const Mat<T>& dy, const Cache& cache) {
    const Eigen::Index batch = dy.rows();
    Mat<T> drows =
        detail::chw_to_rows(dy, batch, out_channels, geom.out_height(), geom.out_width());
    weight.grad.noalias() += cache.cols.transpose() * drows;
    bias.grad.row(0) += drows.colwise().sum();
    Mat<T> dcols(drows.rows(), weight.value.rows());
    dcols.noalias() = drows * weight.value.transpose();
    return col2im(dcols, geom, batch);
  }

  void collect(ParamList<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }
};

/// Stride-2 transposed convolution: output spatial size = 2 * input size
/// (kernel 3, pad 1, output padding 1 geometry).
template <typename T>
class ConvTranspose2d {
 public:
  Param<T> weight;  // (Cin, Cout*k*k)
  Param<T> bias;    // (1, Cout)
  ConvGeom out_geom{};  // geometry of the *output* grid, stride/pad of the matched conv
  int in_channels = 0, in_size = 0;

  struct Cache {
    Mat<T> in_rows;  // (B*Hi*Wi, Cin)
  };

  void init(const std::string& name, int in_c, int out_c, int in_sz, int kernel, int stride,
            int pad) {
    in_channels = in_c;
    in_size = in_sz;
    int out_sz = (in_sz - 1) * stride - 2 * pad + kernel + 1;  // output padding 1
    out_geom = ConvGeom{out_c, out_sz, out_sz, kernel, stride, pad};
    require(out_geom.out_height() == in_sz, "ConvTranspose2d: inconsistent geometry");
    weight.name = name + ".weight";
    bias.name = name + ".bias";
    weight.resize(in_c, static_cast<Eigen::Index>(out_c) * kernel * kernel);
    bias.resize(1, out_c);
  }

  void init_params(Rng& rng) {
    double sigma = std::sqrt(2.0 / static_cast<double>(weight.value.rows() * out_geom.kernel *
                                                       out_geom.kernel));
    weight.init_trunc_normal(rng, sigma);
  }

  Mat<T> forward(const Mat<T>& x, Cache& cache) const {
    const Eigen::Index batch = x.rows();
    cache.in_rows = detail::chw_to_rows(x, batch, in_channels, in_size, in_size);
    Mat<T> cols(cache.in_rows.rows(), weight.value.cols());
    cols.noalias() = cache.in_rows * weight.value;
    Mat<T> y = col2im(cols, out_geom, batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
      T* dst = y.row(b).data();
      const int hw = out_geom.height * out_geom.width;
      for (int c = 0; c < out_geom.channels; ++c)
        for (int i = 0; i < hw; ++i) dst[c * hw + i] += bias.value(0, c);
    }
    return y;
  }

  Mat<T> backward(const Mat<T>& dy, const Cache& cache) {
    const Eigen::Index batch = dy.rows();
    Mat<T> dcols = im2col(dy, out_geom);
    weight.grad.noalias() += cache.in_rows.transpose() * dcols;
    {
      const int hw = out_geom.height * out_geom.width;
      for (Eigen::Index b = 0; b < batch; ++b) {
        const T* src = dy.row(b).data();
        for (int c = 0; c < out_geom.channels; ++c) {
          T s = 0;
          for (int i = 0; i < hw; ++i) s += src[c * hw + i];
          bias.grad(0, c) += s;
        }
      }
    }
    Mat<T> din_rows(dcols.rows(), in_channels);
    din_rows.noalias() = dcols * weight.value.transpose();
    return detail::rows_to_chw(din_rows, batch, in_channels, in_size, in_size);
  }

  void collect(ParamList<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }
};

}  // namespace mcvad::nn
