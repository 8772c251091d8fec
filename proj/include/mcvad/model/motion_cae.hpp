#pragma once

#include <json.hpp>

#include "mcvad/nn/checkpoint.hpp"
#include "mcvad/nn/conv.hpp"
#include "mcvad/nn/layers.hpp"

namespace mcvad {

struct CaeConfig {
  int in_channels = kFlowChannels;
  int size = kFrameSize;
  int c1 = 32, c2 = 64, c3 = 128;
  int latent = 256;  // strictly below 128*4*4 so the bottleneck compresses

  nlohmann::json to_json() const {
    return {{"in_channels", in_channels}, {"size", size}, {"c1", c1},
            {"c2", c2},                   {"c3", c3},     {"latent", latent}};
  }
  static CaeConfig from_json(const nlohmann::json& j) {
    CaeConfig c;
    c.in_channels = j.at("in_channels").get<int>();
    c.size = j.at("size").get<int>();
    c.c1 = j.at("c1").get<int>();
    c.c2 = j.at("c2").get<int>();
    c.c3 = j.at("c3").get<int>();
    c.latent = j.at("latent").get<int>();
    return c;
  }
};

// Flow-reconstruction autoencoder: three stride-2 conv stages 32->16->8->4,
// a linear bottleneck, and the mirrored transposed stages. Output stage is
// linear so reconstructed displacements are unbounded.
template <typename T>
class MotionCae {
 public:
  CaeConfig cfg;
  nn::Conv2d<T> conv1, conv2, conv3;
  nn::Linear<T> fc_in, fc_out;
  nn::ConvTranspose2d<T> up3, up2, up1;

  struct State {
    typename nn::Conv2d<T>::Cache c1, c2, c3;
    typename nn::Gelu<T>::Cache r1, r2, r3, r4, r5, r6, r7;
    typename nn::Linear<T>::Cache f1, f2;
    typename nn::ConvTranspose2d<T>::Cache u3, u2, u1;
  };

  explicit MotionCae(CaeConfig config = {}) : cfg(config) {
    const int s = cfg.size;
    require(s % 8 == 0, "MotionCae: size must be divisible by 8");
    conv1.init("conv1", cfg.in_channels, cfg.c1, s, 3, 2, 1);
    conv2.init("conv2", cfg.c1, cfg.c2, s / 2, 3, 2, 1);
    conv3.init("conv3", cfg.c2, cfg.c3, s / 4, 3, 2, 1);
    const Eigen::Index flat = static_cast<Eigen::Index>(cfg.c3) * (s / 8) * (s / 8);
    require(cfg.latent < flat, "MotionCae: latent must be smaller than the conv feature count");
    fc_in.init("fc_in", flat, cfg.latent);
    fc_out.init("fc_out", cfg.latent, flat);
    up3.init("up3", cfg.c3, cfg.c2, s / 8, 3, 2, 1);
    up2.init("up2", cfg.c2, cfg.c1, s / 4, 3, 2, 1);
    up1.init("up1", cfg.c1, cfg.in_channels, s / 2, 3, 2, 1);
  }

  void init_params(uint64_t seed) {
    Rng rng(seed, /*stream=*/0x3c4d);
    conv1.init_params(rng);
    conv2.init_params(rng);
    conv3.init_params(rng);
    fc_in.init_params(rng, std::sqrt(2.0 / static_cast<double>(fc_in.in_dim())));
    fc_out.init_params(rng, std::sqrt(2.0 / static_cast<double>(fc_out.in_dim())));
    up3.init_params(rng);
    up2.init_params(rng);
    up1.init_params(rng);
  }

  nn::ParamList<T> params() {
    nn::ParamList<T> out;
    conv1.collect(out);
    conv2.collect(out);
    conv3.collect(out);
    fc_in.collect(out);
    fc_out.collect(out);
    up3.collect(out);
    up2.collect(out);
    up1.collect(out);
    return out;
  }

  size_t parameter_count() { return nn::param_count(params()); }
  Eigen::Index latent_dim() const { return fc_in.out_dim(); }

  /// (B, 2*32*32) flows -> (B, 2*32*32) reconstructions.
  Mat<T> forward(const Mat<T>& flows, State& st) const {
    require(flows.cols() == static_cast<Eigen::Index>(cfg.in_channels) * cfg.size * cfg.size,
            "MotionCae: bad input width " + std::to_string(flows.cols()));
    require(flows.allFinite(), "MotionCae: non-finite input flow");
    Mat<T> h = nn::Gelu<T>::forward(conv1.forward(flows, st.c1), st.r1);
    h = nn::Gelu<T>::forward(conv2.forward(h, st.c2), st.r2);
    h = nn::Gelu<T>::forward(conv3.forward(h, st.c3), st.r3);
    h = nn::Gelu<T>::forward(fc_in.forward(h, st.f1), st.r4);
    h = nn::Gelu<T>::forward(fc_out.forward(h, st.f2), st.r5);
    h = nn::Gelu<T>::forward(up3.forward(h, st.u3), st.r6);
    h = nn::Gelu<T>::forward(up2.forward(h, st.u2), st.r7);
    Mat<T> y = up1.forward(h, st.u1);
    require(y.allFinite(), "MotionCae: non-finite activations in forward pass");
    return y;
  }

  Mat<T> backward(const Mat<T>& dy, State& st) {
    Mat<T> d = up1.backward(dy, st.u1);
    d = up2.backward(nn::Gelu<T>::backward(d, st.r7), st.u2);
    d = up3.backward(nn::Gelu<T>::backward(d, st.r6), st.u3);
    d = fc_out.backward(nn::Gelu<T>::backward(d, st.r5), st.f2);
    d = fc_in.backward(nn::Gelu<T>::backward(d, st.r4), st.f1);
    d = conv3.backward(nn::Gelu<T>::backward(d, st.r3), st.c3);
    d = conv2.backward(nn::Gelu<T>::backward(d, st.r2), st.c2);
    d = conv1.backward(nn::Gelu<T>::backward(d, st.r1), st.c1);
    return d;
  }
};

inline void save_cae_checkpoint(const std::string& path, MotionCae<float>& model) {
  nn::save_checkpoint(path, "motion_cae", model.cfg.to_json(), model.params());
}

inline MotionCae<float> load_cae_checkpoint(const std::string& path) {
  nn::Checkpoint ck = nn::load_checkpoint(path);
  require(ck.model_kind == "motion_cae",
          "expected a motion_cae checkpoint, found " + ck.model_kind + " in " + path);
  MotionCae<float> model(CaeConfig::from_json(ck.arch));
  nn::restore_params(ck, model.params());
  return model;
}

}  // namespace mcvad
