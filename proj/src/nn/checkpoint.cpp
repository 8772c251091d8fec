#include "mcvad/nn/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

namespace mcvad::nn {

namespace {
constexpr char kMagic[4] = {'M', 'C', 'K', 'P'};
constexpr uint32_t kVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

const TensorBlob& Checkpoint::at(const std::string& name) const {
  auto it = tensors.find(name);
  require(it != tensors.end(), "checkpoint: no tensor named " + name);
  return it->second;
}

void save_checkpoint(const std::string& path, const std::string& model_kind,
                     const nlohmann::json& arch, const ParamList<float>& params) {
  nlohmann::json index = nlohmann::json::array();
  for (const auto* p : params)
    index.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
  nlohmann::json header = {{"format_version", kVersion},
                           {"model", model_kind},
                           {"arch", arch},
                           {"tensors", index}};
  std::string hs = header.dump();

  FilePtr f(std::fopen(path.c_str(), "wb"));
  require(f != nullptr, "save_checkpoint: cannot open " + path);
  std::fwrite(kMagic, 1, 4, f.get());
  uint32_t ver = kVersion;
  std::fwrite(&ver, sizeof(ver), 1, f.get());
  uint64_t hlen = hs.size();
  std::fwrite(&hlen, sizeof(hlen), 1, f.get());
  std::fwrite(hs.data(), 1, hs.size(), f.get());

  std::vector<float> row;
  for (const auto* p : params) {
    row.resize(static_cast<size_t>(p->value.size()));
    size_t k = 0;
    for (Eigen::Index r = 0; r < p->value.rows(); ++r)
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) row[k++] = p->value(r, c);
    require(std::fwrite(row.data(), sizeof(float), row.size(), f.get()) == row.size(),
            "save_checkpoint: write failed for " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  require(f != nullptr, "load_checkpoint: cannot open " + path);
  char magic[4];
  require(std::fread(magic, 1, 4, f.get()) == 4 && std::memcmp(magic, kMagic, 4) == 0,
          "load_checkpoint: bad magic in " + path);
  uint32_t ver = 0;
  require(std::fread(&ver, sizeof(ver), 1, f.get()) == 1 && ver == kVersion,
          "load_checkpoint: unsupported version in " + path);
  uint64_t hlen = 0;
  require(std::fread(&hlen, sizeof(hlen), 1, f.get()) == 1 && hlen > 0 && hlen < (1u << 24),
          "load_checkpoint: bad header length in " + path);
  std::string hs(hlen, '\0');
  require(std::fread(hs.data(), 1, hlen, f.get()) == hlen,
          "load_checkpoint: truncated header in " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const std::exception& e) {
    throw Error("load_checkpoint: invalid header JSON in " + path + ": " + e.what());
  }

  Checkpoint ck;
  ck.model_kind = header.at("model").get<std::string>();
  ck.arch = header.at("arch");
  for (const auto& t : header.at("tensors")) {
    TensorBlob blob;
    std::string name = t.at("name").get<std::string>();
    blob.rows = t.at("rows").get<Eigen::Index>();
    blob.cols = t.at("cols").get<Eigen::Index>();
    size_t n = static_cast<size_t>(blob.rows) * static_cast<size_t>(blob.cols);
    blob.data.resize(n);
    require(std::fread(blob.data.data(), sizeof(float), n, f.get()) == n,
            "load_checkpoint: truncated payload for " + name + " in " + path);
    ck.order.push_back(name);
    ck.tensors.emplace(std::move(name), std::move(blob));
  }
  return ck;
}

}  // namespace mcvad::nn
