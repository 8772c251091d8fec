#pragma once

#include <vector>

#include "mcvad/nn/layers.hpp"

namespace mcvad::nn {

// Self-attention over short token sequences. Inputs are (batch * seq, dim)
// with each item's tokens contiguous; seq is passed per call because the
// encoder and decoders run over different token counts.
template <typename T>
class MultiHeadSelfAttention {
 public:
  Linear<T> qkv;
  Linear<T> proj;
  int heads = 4;

  struct Cache {
    typename Linear<T>::Cache qkv_cache;
    typename Linear<T>::Cache proj_cache;
    Mat<T> qkv_out;  // (batch*seq, 3*dim)
    Mat<T> attn;     // (batch*heads*seq, seq) softmax rows
    Eigen::Index seq = 0;
  };

  void init(const std::string& name, Eigen::Index dim, int n_heads) {
    require(dim % n_heads == 0, "attention: dim must divide heads");
    heads = n_heads;
    qkv.init(name + ".qkv", dim, 3 * dim);
    proj.init(name + ".proj", dim, dim);
  }

  void init_params(Rng& rng) {
    qkv.init_params(rng);
    proj.init_params(rng);
  }

  Mat<T> forward(const Mat<T>& x, Eigen::Index seq, Cache& cache) const {
    const Eigen::Index dim = proj.in_dim();
    const Eigen::Index batch = x.rows() / seq;
    const Eigen::Index hd = dim / heads;
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(hd)));

    cache.seq = seq;
    cache.qkv_out = qkv.forward(x, cache.qkv_cache);
    cache.attn.resize(batch * heads * seq, seq);

    Mat<T> ctx(x.rows(), dim);
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int h = 0; h < heads; ++h) {
        auto q = cache.qkv_out.block(b * seq, h * hd, seq, hd);
        auto k = cache.qkv_out.block(b * seq, dim + h * hd, seq, hd);
        auto v = cache.qkv_out.block(b * seq, 2 * dim + h * hd, seq, hd);
        Mat<T> scores = (q * k.transpose()) * scale;
        for (Eigen::Index r = 0; r < seq; ++r) {
          T mx = scores.row(r).maxCoeff();
          Vec<T> e = (scores.row(r).array() - mx).exp().matrix().transpose();
          scores.row(r) = (e / e.sum()).transpose();
        }
        cache.attn.middleRows((b * heads + h) * seq, seq) = scores;
        ctx.block(b * seq, h * hd, seq, hd).noalias() = scores * v;
      }
    }
    return proj.forward(ctx, cache.proj_cache);
  }

  Mat<T> backward(const Mat<T>& dy, Cache& cache) {
    const Eigen::Index dim = proj.in_dim();
    const Eigen::Index seq = cache.seq;
    const Eigen::Index batch = dy.rows() / seq;
    const Eigen::Index hd = dim / heads;
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(hd)));

    Mat<T> dctx = proj.backward(dy, cache.proj_cache);
    Mat<T> dqkv = Mat<T>::Zero(dy.rows(), 3 * dim);
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int h = 0; h < heads; ++h) {
        auto q = cache.qkv_out.block(b * seq, h * hd, seq, hd);
        auto k = cache.qkv_out.block(b * seq, dim + h * hd, seq, hd);
        auto v = cache.qkv_out.block(b * seq, 2 * dim + h * hd, seq, hd);
        auto attn = cache.attn.middleRows((b * heads + h) * seq, seq);
        auto dout = dctx.block(b * seq, h * hd, seq, hd);

        Mat<T> dattn = dout * v.transpose();
        dqkv.block(b * seq, 2 * dim + h * hd, seq, hd).noalias() = attn.transpose() * dout;
        // softmax backward per row
        Mat<T> dscores(seq, seq);
        for (Eigen::Index r = 0; r < seq; ++r) {
          T dot = dattn.row(r).cwiseProduct(attn.row(r)).sum();
          dscores.row(r) =
              attn.row(r).cwiseProduct((dattn.row(r).array() - dot).matrix());
        }
        dscores *= scale;
        dqkv.block(b * seq, h * hd, seq, hd).noalias() = dscores * k;
        dqkv.block(b * seq, dim + h * hd, seq, hd).noalias() = dscores.transpose() * q;
      }
    }
    return qkv.backward(dqkv, cache.qkv_cache);
  }

  void collect(ParamList<T>& out) {
    qkv.collect(out);
    proj.collect(out);
  }
};

/// Pre-norm block: x + attn(ln1(x)), then x + ffn(ln2(x)).
template <typename T>
class TransformerBlock {
 public:
  LayerNorm<T> ln1, ln2;
  MultiHeadSelfAttention<T> attn;
  Linear<T> fc1, fc2;

  struct Cache {
    typename LayerNorm<T>::Cache ln1_cache, ln2_cache;
    typename MultiHeadSelfAttention<T>::Cache attn_cache;
    typename Linear<T>::Cache fc1_cache, fc2_cache;
    typename Gelu<T>::Cache gelu_cache;
  };

  void init(const std::string& name, Eigen::Index dim, int heads, int ffn_mult) {
    ln1.init(name + ".ln1", dim);
    ln2.init(name + ".ln2", dim);
    attn.init(name + ".attn", dim, heads);
    fc1.init(name + ".fc1", dim, dim * ffn_mult);
    fc2.init(name + ".fc2", dim * ffn_mult, dim);
  }

  void init_params(Rng& rng) {
    attn.init_params(rng);
    fc1.init_params(rng);
    fc2.init_params(rng);
  }

  Mat<T> forward(const Mat<T>& x, Eigen::Index seq, Cache& cache) const {
    Mat<T> h = x + attn.forward(ln1.forward(x, cache.ln1_cache), seq, cache.attn_cache);
    Mat<T> f = fc2.forward(
        Gelu<T>::forward(fc1.forward(ln2.forward(h, cache.ln2_cache), cache.fc1_cache),
                         cache.gelu_cache),
        cache.fc2_cache);
    return h + f;
  }

  Mat<T> backward(const Mat<T>& dy, Cache& cache) {
    Mat<T> dh = dy + ln2.backward(
                         fc1.backward(Gelu<T>::backward(fc2.backward(dy, cache.fc2_cache),
                                                        cache.gelu_cache),
                                      cache.fc1_cache),
                         cache.ln2_cache);
    Mat<T> dx = dh + ln1.backward(attn.backward(dh, cache.attn_cache), cache.ln1_cache);
    return dx;
  }

  void collect(ParamList<T>& out) {
    ln1.collect(out);
    attn.collect(out);
    ln2.collect(out);
    fc1.collect(out);
    fc2.collect(out);
  }
};

/// Block stack with a final layer norm.
template <typename T>
class TransformerStack {
 public:
  std::vector<TransformerBlock<T>> blocks;
  LayerNorm<T> final_ln;

  struct Cache {
    std::vector<typename TransformerBlock<T>::Cache> block_caches;
    typename LayerNorm<T>::Cache final_cache;
  };

  void init(const std::string& name, int depth, Eigen::Index dim, int heads, int ffn_mult) {
    blocks.resize(depth);
    for (int i = 0; i < depth; ++i)
      blocks[static_cast<size_t>(i)].init(name + "." + std::to_string(i), dim, heads, ffn_mult);
    final_ln.init(name + ".ln", dim);
  }

  void init_params(Rng& rng) {
    for (auto& b : blocks) b.init_params(rng);
  }

  Mat<T> forward(const Mat<T>& x, Eigen::Index seq, Cache& cache) const {
    cache.block_caches.resize(blocks.size());
    Mat<T> h = x;
    for (size_t i = 0; i < blocks.size(); ++i) h = blocks[i].forward(h, seq, cache.block_caches[i]);
    return final_ln.forward(h, cache.final_cache);
  }

  Mat<T> backward(const Mat<T>& dy, Cache& cache) {
    Mat<T> d = final_ln.backward(dy, cache.final_cache);
    for (size_t i = blocks.size(); i-- > 0;) d = blocks[i].backward(d, cache.block_caches[i]);
    return d;
  }

  void collect(ParamList<T>& out) {
    for (auto& b : blocks) b.collect(out);
    final_ln.collect(out);
  }

  size_t parameter_count() {
    ParamList<T> ps;
    collect(ps);
    return param_count(ps);
  }
};

}  // namespace mcvad::nn
