#pragma once

#include <json.hpp>

#include "mcvad/model/mask.hpp"
#include "mcvad/nn/checkpoint.hpp"
#include "mcvad/nn/transformer.hpp"

namespace mcvad {

/// Which prediction streams are trained and scored. All three off means the
/// plain single-future-frame baseline: no masking, encoder over all four
/// tokens, one decoder, one future head.
struct StreamSet {
  bool masked = true;
  bool whole = true;
  bool partial = true;

  bool any() const { return masked || whole || partial; }
  bool operator==(const StreamSet&) const = default;
};

struct VitConfig {
  int token_dim = 128;
  int enc_depth = 4;
  int dec_depth = 2;
  int heads = 4;
  int ffn_mult = 4;
  double mask_ratio = 0.5;
  StreamSet streams;

  bool masking_enabled() const { return streams.any(); }
  bool has_whole_head() const { return streams.whole || !streams.any(); }
  bool has_partial() const { return streams.partial; }
  int n_masked() const { return masking_enabled() ? mask_count_for_ratio(mask_ratio) : 0; }
  int n_visible() const { return kCubeInputs - n_masked(); }

  nlohmann::json to_json() const;
  static VitConfig from_json(const nlohmann::json& j);
};

/// The three predictions for one cube, produced by a single-cube forward.
struct PredictionBundle {
  MaskPattern mask;
  std::vector<std::pair<int, VecF>> masked_recons;  // (position, 3072), only m in M
  VecF whole;    // empty when the whole head is absent
  VecF partial;  // empty when the partial stream is absent
  MatF decoded;  // (4, 3072) decoder outputs at every position
};

// Frame-as-token transformer with one deep encoder over the visible tokens
// and shallow decoders for the masked/whole and partial streams. Forward is
// const; intermediates live in a caller-owned State so shared weights and
// concurrent inference both work.
template <typename T>
class ContextVit {
 public:
  VitConfig cfg;

  nn::Linear<T> embed;                    // 3072 -> C
  nn::Param<T> pos;                       // (4, C)
  nn::Param<T> mask_token;                // (1, C), only when masking
  nn::TransformerStack<T> encoder;
  nn::Linear<T> enc_proj;                 // C -> C, projection after the encoder
  nn::TransformerStack<T> dec_whole;
  nn::TransformerStack<T> dec_partial;    // only for the partial stream
  nn::Linear<T> out_proj;                 // C -> 3072, shared by both decoders
  nn::Linear<T> head_whole;               // (4*3072) -> 3072
  nn::Linear<T> head_partial;             // (v*3072) -> 3072

  struct State {
    Eigen::Index batch = 0;
    std::vector<MaskPattern> masks;
    typename nn::Linear<T>::Cache embed_cache;
    Mat<T> tokens;                         // (B*4, C)
    std::vector<Eigen::Index> visible_rows;
    typename nn::TransformerStack<T>::Cache enc_cache;
    typename nn::Linear<T>::Cache enc_proj_cache;
    Mat<T> r_visible;                      // (B*v, C)
    Mat<T> assembled;                      // (B*4, C)
    typename nn::TransformerStack<T>::Cache decw_cache;
    typename nn::Linear<T>::Cache outproj_w_cache;
    typename nn::Linear<T>::Cache headw_cache;
    typename nn::TransformerStack<T>::Cache decp_cache;
    typename nn::Linear<T>::Cache outproj_p_cache;
    typename nn::Linear<T>::Cache headp_cache;
  };

  struct Outputs {
    Mat<T> decoded;  // (B*4, 3072)
    Mat<T> whole;    // (B, 3072) or 0x0
    Mat<T> partial;  // (B, 3072) or 0x0
  };

  explicit ContextVit(VitConfig config = {}) : cfg(config) {
    const int c = cfg.token_dim;
    embed.init("embed", kFrameDim, c);
    pos.name = "pos_embed";
    pos.resize(kCubeInputs, c);
    if (cfg.masking_enabled()) {
      mask_token.name = "mask_token";
      mask_token.resize(1, c);
    }
    encoder.init("encoder", cfg.enc_depth, c, cfg.heads, cfg.ffn_mult);
    enc_proj.init("enc_proj", c, c);
    dec_whole.init("dec_whole", cfg.dec_depth, c, cfg.heads, cfg.ffn_mult);
    if (cfg.has_partial()) dec_partial.init("dec_partial", cfg.dec_depth, c, cfg.heads, cfg.ffn_mult);
    out_proj.init("out_proj", c, kFrameDim);
    if (cfg.has_whole_head())
      head_whole.init("head_whole", static_cast<Eigen::Index>(kCubeInputs) * kFrameDim, kFrameDim);
    if (cfg.has_partial())
      head_partial.init("head_partial", static_cast<Eigen::Index>(cfg.n_visible()) * kFrameDim,
                        kFrameDim);
  }

  void init_params(uint64_t seed) {
    Rng rng(seed, /*stream=*/0x1a2b);
    embed.init_params(rng);
    pos.init_trunc_normal(rng);
    if (cfg.masking_enabled()) mask_token.init_trunc_normal(rng);
    encoder.init_params(rng);
    enc_proj.init_params(rng);
    dec_whole.init_params(rng);
    if (cfg.has_partial()) dec_partial.init_params(rng);
    out_proj.init_params(rng);
    if (cfg.has_whole_head()) head_whole.init_params(rng);
    if (cfg.has_partial()) head_partial.init_params(rng);
  }

  nn::ParamList<T> params() {
    nn::ParamList<T> out;
    embed.collect(out);
    out.push_back(&pos);
    if (cfg.masking_enabled()) out.push_back(&mask_token);
    encoder.collect(out);
    enc_proj.collect(out);
    dec_whole.collect(out);
    if (cfg.has_partial()) dec_partial.collect(out);
    out_proj.collect(out);
    if (cfg.has_whole_head()) head_whole.collect(out);
    if (cfg.has_partial()) head_partial.collect(out);
    return out;
  }

  size_t parameter_count() { return nn::param_count(params()); }

  /// Per-frame linear embedding plus positional embedding: (B, 4*3072) -> (B*4, C).
  Mat<T> embed_frames(const Mat<T>& inputs, State& st) const {
    require(inputs.cols() == static_cast<Eigen::Index>(kCubeInputs) * kFrameDim,
            "ContextVit: expected " + std::to_string(kCubeInputs) + "x" +
                std::to_string(kFrameDim) + " inputs, got width " + std::to_string(inputs.cols()));
    const Eigen::Index batch = inputs.rows();
    Mat<T> frames(batch * kCubeInputs, kFrameDim);
    for (Eigen::Index b = 0; b < batch; ++b)
      for (int i = 0; i < kCubeInputs; ++i)
        frames.row(b * kCubeInputs + i) = inputs.row(b).segment(i * kFrameDim, kFrameDim);
    Mat<T> tokens = embed.forward(frames, st.embed_cache);
    for (Eigen::Index b = 0; b < batch; ++b)
      for (int i = 0; i < kCubeInputs; ++i) tokens.row(b * kCubeInputs + i) += pos.value.row(i);
    return tokens;
  }

  Outputs forward(const Mat<T>& inputs, const std::vector<MaskPattern>& masks, State& st) const {
    const Eigen::Index batch = inputs.rows();
    const bool masking = cfg.masking_enabled();
    const int v = cfg.n_visible();
    const int m = cfg.n_masked();

    st.batch = batch;
    st.masks = masks;
    st.tokens = embed_frames(inputs, st);

    Mat<T> visible;
    if (masking) {
      require(static_cast<Eigen::Index>(masks.size()) == batch,
              "ContextVit: one mask per cube required");
      st.visible_rows.clear();
      st.visible_rows.reserve(static_cast<size_t>(batch * v));
      for (Eigen::Index b = 0; b < batch; ++b) {
        require(masks[static_cast<size_t>(b)].masked_count() == m,
                "ContextVit: mask |M| = " +
                    std::to_string(masks[static_cast<size_t>(b)].masked_count()) +
                    " does not match the configured ratio (|M| = " + std::to_string(m) + ")");
        for (int i = 0; i < kCubeInputs; ++i)
          if (!masks[static_cast<size_t>(b)].masked[static_cast<size_t>(i)])
            st.visible_rows.push_back(b * kCubeInputs + i);
      }
      visible.resize(batch * v, cfg.token_dim);
      for (Eigen::Index k = 0; k < visible.rows(); ++k)
        visible.row(k) = st.tokens.row(st.visible_rows[static_cast<size_t>(k)]);
    } else {
      visible = st.tokens;
    }

    Mat<T> enc_out = encoder.forward(visible, v, st.enc_cache);
    st.r_visible = enc_proj.forward(enc_out, st.enc_proj_cache);

    if (masking) {
      st.assembled.resize(batch * kCubeInputs, cfg.token_dim);
      for (Eigen::Index b = 0; b < batch; ++b) {
        int vi = 0;
        for (int i = 0; i < kCubeInputs; ++i) {
          if (masks[static_cast<size_t>(b)].masked[static_cast<size_t>(i)])
            st.assembled.row(b * kCubeInputs + i) = mask_token.value.row(0) + pos.value.row(i);
          else
            st.assembled.row(b * kCubeInputs + i) = st.r_visible.row(b * v + vi++);
        }
      }
    } else {
      st.assembled = st.r_visible;
    }

    Outputs out;
    Mat<T> dw = dec_whole.forward(st.assembled, kCubeInputs, st.decw_cache);
    out.decoded = out_proj.forward(dw, st.outproj_w_cache);

    if (cfg.has_whole_head()) {
      Mat<T> cat(batch, static_cast<Eigen::Index>(kCubeInputs) * kFrameDim);
      for (Eigen::Index b = 0; b < batch; ++b)
        for (int i = 0; i < kCubeInputs; ++i)
          cat.row(b).segment(i * kFrameDim, kFrameDim) = out.decoded.row(b * kCubeInputs + i);
      out.whole = head_whole.forward(cat, st.headw_cache);
    }

    if (cfg.has_partial()) {
      Mat<T> dp = dec_partial.forward(st.r_visible, v, st.decp_cache);
      Mat<T> proj = out_proj.forward(dp, st.outproj_p_cache);
      Mat<T> cat(batch, static_cast<Eigen::Index>(v) * kFrameDim);
      for (Eigen::Index b = 0; b < batch; ++b)
        for (int j = 0; j < v; ++j)
          cat.row(b).segment(j * kFrameDim, kFrameDim) = proj.row(b * v + j);
      out.partial = head_partial.forward(cat, st.headp_cache);
    }

    require(out.decoded.allFinite() && (out.whole.size() == 0 || out.whole.allFinite()) &&
                (out.partial.size() == 0 || out.partial.allFinite()),
            "ContextVit: non-finite activations in forward pass");
    return out;
  }

  /// Accumulates parameter gradients from loss gradients w.r.t. the outputs.
  /// Pass a zero-size matrix for streams that received no loss.
  void backward(const Outputs& grads, State& st) {
    const Eigen::Index batch = st.batch;
    const bool masking = cfg.masking_enabled();
    const int v = cfg.n_visible();

    Mat<T> d_decoded = grads.decoded.size() > 0
                           ? grads.decoded
                           : Mat<T>::Zero(batch * kCubeInputs, kFrameDim);
    if (cfg.has_whole_head() && grads.whole.size() > 0) {
      Mat<T> dcat = head_whole.backward(grads.whole, st.headw_cache);
      for (Eigen::Index b = 0; b < batch; ++b)
        for (int i = 0; i < kCubeInputs; ++i)
          d_decoded.row(b * kCubeInputs + i) += dcat.row(b).segment(i * kFrameDim, kFrameDim);
    }

    Mat<T> ddw = out_proj.backward(d_decoded, st.outproj_w_cache);
    Mat<T> d_assembled = dec_whole.backward(ddw, st.decw_cache);

    Mat<T> d_r = Mat<T>::Zero(batch * v, cfg.token_dim);
    if (cfg.has_partial() && grads.partial.size() > 0) {
      Mat<T> dcat = head_partial.backward(grads.partial, st.headp_cache);
      Mat<T> dproj(batch * v, kFrameDim);
      for (Eigen::Index b = 0; b < batch; ++b)
        for (int j = 0; j < v; ++j)
          dproj.row(b * v + j) = dcat.row(b).segment(j * kFrameDim, kFrameDim);
      Mat<T> ddp = out_proj.backward(dproj, st.outproj_p_cache);
      d_r += dec_partial.backward(ddp, st.decp_cache);
    }

    if (masking) {
      for (Eigen::Index b = 0; b < batch; ++b) {
        int vi = 0;
        for (int i = 0; i < kCubeInputs; ++i) {
          const auto& row = d_assembled.row(b * kCubeInputs + i);
          if (st.masks[static_cast<size_t>(b)].masked[static_cast<size_t>(i)]) {
            mask_token.grad.row(0) += row;
            pos.grad.row(i) += row;
          } else {
            d_r.row(b * v + vi++) += row;
          }
        }
      }
    } else {
      d_r += d_assembled;
    }

    Mat<T> d_enc = enc_proj.backward(d_r, st.enc_proj_cache);
    Mat<T> d_visible = encoder.backward(d_enc, st.enc_cache);

    Mat<T> d_tokens;
    if (masking) {
      d_tokens = Mat<T>::Zero(batch * kCubeInputs, cfg.token_dim);
      for (Eigen::Index k = 0; k < d_visible.rows(); ++k)
        d_tokens.row(st.visible_rows[static_cast<size_t>(k)]) = d_visible.row(k);
    } else {
      d_tokens = std::move(d_visible);
    }
    for (Eigen::Index b = 0; b < batch; ++b)
      for (int i = 0; i < kCubeInputs; ++i) pos.grad.row(i) += d_tokens.row(b * kCubeInputs + i);
    embed.backward_params_only(d_tokens, st.embed_cache);
  }

  /// Single-cube inference.
  PredictionBundle forward_cube(const Mat<T>& cube_inputs_row, const MaskPattern& mask,
                                State& st) const {
    std::vector<MaskPattern> masks;
    if (cfg.masking_enabled()) masks.push_back(mask);
    Outputs out = forward(cube_inputs_row, masks, st);
    PredictionBundle bundle;
    bundle.mask = cfg.masking_enabled() ? mask : MaskPattern{};
    bundle.decoded.resize(kCubeInputs, kFrameDim);
    for (int i = 0; i < kCubeInputs; ++i)
      bundle.decoded.row(i) = out.decoded.row(i).template cast<float>();
    if (cfg.masking_enabled() && cfg.streams.masked)
      for (int i : bundle.mask.masked_indices())
        bundle.masked_recons.emplace_back(
            i, out.decoded.row(i).template cast<float>().transpose());
    if (out.whole.size() > 0) bundle.whole = out.whole.row(0).template cast<float>().transpose();
    if (out.partial.size() > 0)
      bundle.partial = out.partial.row(0).template cast<float>().transpose();
    return bundle;
  }

  size_t encoder_parameter_count() { return encoder.parameter_count(); }
  size_t decoder_whole_parameter_count() { return dec_whole.parameter_count(); }
  size_t decoder_partial_parameter_count() {
    return cfg.has_partial() ? dec_partial.parameter_count() : 0;
  }
};

inline nlohmann::json VitConfig::to_json() const {
  return {{"token_dim", token_dim},
          {"enc_depth", enc_depth},
          {"dec_depth", dec_depth},
          {"heads", heads},
          {"ffn_mult", ffn_mult},
          {"mask_ratio", mask_ratio},
          {"streams",
           {{"masked", streams.masked}, {"whole", streams.whole}, {"partial", streams.partial}}}};
}

inline VitConfig VitConfig::from_json(const nlohmann::json& j) {
  VitConfig c;
  c.token_dim = j.at("token_dim").get<int>();
  c.enc_depth = j.at("enc_depth").get<int>();
  c.dec_depth = j.at("dec_depth").get<int>();
  c.heads = j.at("heads").get<int>();
  c.ffn_mult = j.at("ffn_mult").get<int>();
  c.mask_ratio = j.at("mask_ratio").get<double>();
  c.streams.masked = j.at("streams").at("masked").get<bool>();
  c.streams.whole = j.at("streams").at("whole").get<bool>();
  c.streams.partial = j.at("streams").at("partial").get<bool>();
  return c;
}

inline void save_vit_checkpoint(const std::string& path, ContextVit<float>& model) {
  nn::save_checkpoint(path, "context_vit", model.cfg.to_json(), model.params());
}

inline ContextVit<float> load_vit_checkpoint(const std::string& path) {
  nn::Checkpoint ck = nn::load_checkpoint(path);
  require(ck.model_kind == "context_vit",
          "expected a context_vit checkpoint, found " + ck.model_kind + " in " + path);
  ContextVit<float> model(VitConfig::from_json(ck.arch));
  nn::restore_params(ck, model.params());
  return model;
}

}  // namespace mcvad
