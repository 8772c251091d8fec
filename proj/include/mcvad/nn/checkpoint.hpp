#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcvad/nn/param.hpp"

namespace mcvad::nn {

// Self-describing checkpoint container:
//   "MCKP", uint32 version, uint64 JSON length, JSON header, float32 payload.
// The header lists model kind, architecture hyperparameters and the tensor
// index; the payload is each tensor row-major in index order.

struct TensorBlob {
  Eigen::Index rows = 0, cols = 0;
  std::vector<float> data;  // row-major
};

struct Checkpoint {
  std::string model_kind;
  nlohmann::json arch;
  std::vector<std::string> order;
  std::map<std::string, TensorBlob> tensors;

  const TensorBlob& at(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const std::string& model_kind,
                     const nlohmann::json& arch, const ParamList<float>& params);

Checkpoint load_checkpoint(const std::string& path);

/// Copies checkpoint tensors into params; verifies names and shapes agree.
template <typename T>
void restore_params(const Checkpoint& ck, const ParamList<T>& params) {
  require(ck.tensors.size() == params.size(),
          "checkpoint: tensor count mismatch (" + std::to_string(ck.tensors.size()) + " vs " +
              std::to_string(params.size()) + ")");
  for (auto* p : params) {
    auto it = ck.tensors.find(p->name);
    require(it != ck.tensors.end(), "checkpoint: missing tensor " + p->name);
    const TensorBlob& b = it->second;
    require(b.rows == p->value.rows() && b.cols == p->value.cols(),
            "checkpoint: shape mismatch for " + p->name);
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < b.rows; ++r)
      for (Eigen::Index c = 0; c < b.cols; ++c) p->value(r, c) = static_cast<T>(b.data[k++]);
  }
}

}  // namespace mcvad::nn
