#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcvad {

// Activations and batched data: row-major, one sample (or token) per row.
// Parameters: column-major, which is the fast layout for the backward GEMMs.
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using WMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatF = Mat<float>;
using VecF = Vec<float>;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

// Frame geometry is fixed across the whole pipeline.
constexpr int kFrameChannels = 3;
constexpr int kFrameSize = 32;
constexpr int kFrameDim = kFrameChannels * kFrameSize * kFrameSize;  // 3072
constexpr int kCubeInputs = 4;   // t1..t4
constexpr int kCubeFrames = 5;   // t1..t5
constexpr int kFlowChannels = 2;
constexpr int kFlowDim = kFlowChannels * kFrameSize * kFrameSize;  // 2048

}  // namespace mcvad
