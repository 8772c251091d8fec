#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace mcvad {

// PCG32 generator. Used everywhere instead of <random> so that streams are
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) {
    state_ = 0u;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  uint32_t next_u32() {
    uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  uint64_t next_u64() {
    return (static_cast<uint64_t>(next_u32()) << 32) | next_u32();
  }

  /// Uniform in [0, 1).
  double uniform() { return next_u32() * (1.0 / 4294967296.0); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  uint32_t below(uint32_t n) {
    uint32_t threshold = (-n) % n;
    for (;;) {
      uint32_t r = next_u32();
      if (r >= threshold) return r % n;
    }
  }

  int range(int lo, int hi_inclusive) {
    return lo + static_cast<int>(below(static_cast<uint32_t>(hi_inclusive - lo + 1)));
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-12) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  /// Normal truncated to [-2*sigma, 2*sigma].
  double truncated_normal(double sigma) {
    for (;;) {
      double x = normal() * sigma;
      if (std::fabs(x) <= 2.0 * sigma) return x;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(static_cast<uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_ = 0;
  uint64_t inc_ = 1;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// FNV-1a over raw bytes; stable across platforms.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 14695981039346656037ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t h = 14695981039346656037ULL) {
  return fnv1a(s.data(), s.size(), h);
}

inline uint64_t fnv1a_u64(uint64_t v, uint64_t h = 14695981039346656037ULL) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  return fnv1a(b, 8, h);
}

/// Seed for the per-object inference mask stream.
inline uint64_t stable_mask_seed(const std::string& video_id, int64_t frame_index,
                                 const std::string& track_id, uint64_t base_seed,
                                 int draw) {
  uint64_t h = fnv1a(video_id);
  h = fnv1a_u64(static_cast<uint64_t>(frame_index), h);
  h = fnv1a(track_id, h);
  h = fnv1a_u64(base_seed, h);
  h = fnv1a_u64(static_cast<uint64_t>(draw), h);
  return h;
}

}  // namespace mcvad
