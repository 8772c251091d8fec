#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "mcvad/core/common.hpp"
#include "mcvad/core/rng.hpp"

namespace mcvad {

/// Which of the four input positions are hidden. |M| = round(ratio * 4),
/// always at least one masked and at least one visible position.
struct MaskPattern {
  std::array<bool, kCubeInputs> masked{};
  double ratio = 0.0;

  int masked_count() const {
    int n = 0;
    for (bool m : masked) n += m ? 1 : 0;
    return n;
  }

  std::vector<int> masked_indices() const {
    std::vector<int> out;
    for (int i = 0; i < kCubeInputs; ++i)
      if (masked[static_cast<size_t>(i)]) out.push_back(i);
    return out;
  }

  std::vector<int> visible_indices() const {
    std::vector<int> out;
    for (int i = 0; i < kCubeInputs; ++i)
      if (!masked[static_cast<size_t>(i)]) out.push_back(i);
    return out;
  }
};

inline int mask_count_for_ratio(double ratio) {
  require(ratio > 0.0 && ratio < 1.0, "masking ratio must be in (0, 1)");
  int m = static_cast<int>(std::lround(ratio * kCubeInputs));
  require(m >= 1 && m <= kCubeInputs - 1,
          "masking ratio " + std::to_string(ratio) + " yields |M| outside [1, 3]");
  return m;
}

/// Uniform draw of |M| positions without replacement.
inline MaskPattern sample_mask(double ratio, Rng& rng) {
  int m = mask_count_for_ratio(ratio);
  std::vector<int> idx(kCubeInputs);
  for (int i = 0; i < kCubeInputs; ++i) idx[static_cast<size_t>(i)] = i;
  rng.shuffle(idx);
  MaskPattern p;
  p.ratio = ratio;
  for (int i = 0; i < m; ++i) p.masked[static_cast<size_t>(idx[static_cast<size_t>(i)])] = true;
  return p;
}

inline MaskPattern sample_mask(double ratio, uint64_t seed) {
  Rng rng(seed);
  return sample_mask(ratio, rng);
}

}  // namespace mcvad
