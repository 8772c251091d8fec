#include "mcvad/core/array_io.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

#include "mcvad/core/common.hpp"

namespace mcvad {

namespace {

constexpr char kMagic[4] = {'M', 'C', 'V', 'B'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_u32le(unsigned char* out, uint32_t v) {
  out[0] = static_cast<unsigned char>(v & 0xff);
  out[1] = static_cast<unsigned char>((v >> 8) & 0xff);
  out[2] = static_cast<unsigned char>((v >> 16) & 0xff);
  out[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

uint32_t get_u32le(const unsigned char* in) {
  return static_cast<uint32_t>(in[0]) | (static_cast<uint32_t>(in[1]) << 8) |
         (static_cast<uint32_t>(in[2]) << 16) | (static_cast<uint32_t>(in[3]) << 24);
}

}  // namespace

void write_array(const std::string& path, const ArrayFile& a) {
  require(a.rank >= 1 && a.rank <= 4, "write_array: rank must be in [1,4]");
  require(a.data.size() == a.element_count(),
          "write_array: data size does not match dims for " + path);
  FilePtr f(std::fopen(path.c_str(), "wb"));
  require(f != nullptr, "write_array: cannot open " + path);

  unsigned char header[24] = {0};
  std::memcpy(header, kMagic, 4);
  header[4] = static_cast<unsigned char>(a.rank);
  for (int i = 0; i < 4; ++i)
    put_u32le(header + 8 + 4 * i, i < a.rank ? a.dims[static_cast<size_t>(i)] : 0u);
  require(std::fwrite(header, 1, sizeof(header), f.get()) == sizeof(header),
          "write_array: header write failed for " + path);

  // Serialize float32 little-endian; this build targets little-endian hosts.
  static_assert(sizeof(float) == 4);
  size_t n = a.data.size();
  require(std::fwrite(a.data.data(), sizeof(float), n, f.get()) == n,
          "write_array: payload write failed for " + path);
}

ArrayFile read_array(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  require(f != nullptr, "read_array: cannot open " + path);

  unsigned char header[24];
  require(std::fread(header, 1, sizeof(header), f.get()) == sizeof(header),
          "read_array: truncated header in " + path);
  require(std::memcmp(header, kMagic, 4) == 0, "read_array: bad magic in " + path);

  ArrayFile a;
  a.rank = header[4];
  require(a.rank >= 1 && a.rank <= 4, "read_array: bad rank in " + path);
  for (int i = 0; i < 4; ++i) a.dims[static_cast<size_t>(i)] = get_u32le(header + 8 + 4 * i);
  for (int i = a.rank; i < 4; ++i)
    require(a.dims[static_cast<size_t>(i)] == 0, "read_array: nonzero unused dim in " + path);

  size_t n = a.element_count();
  require(n > 0 && n < (1u << 28), "read_array: implausible element count in " + path);
  a.data.resize(n);
  require(std::fread(a.data.data(), sizeof(float), n, f.get()) == n,
          "read_array: truncated payload in " + path);
  // Trailing bytes mean the file does not match its own header.
  unsigned char extra;
  require(std::fread(&extra, 1, 1, f.get()) == 0, "read_array: trailing bytes in " + path);
  return a;
}

ArrayFile read_array_checked(const std::string& path, const std::vector<uint32_t>& expect_dims) {
  ArrayFile a = read_array(path);
  bool ok = a.rank == static_cast<int>(expect_dims.size());
  for (size_t i = 0; ok && i < expect_dims.size(); ++i) ok = a.dims[i] == expect_dims[i];
  if (!ok) {
    std::string want, got;
    for (size_t i = 0; i < expect_dims.size(); ++i)
      want += (i ? "x" : "") + std::to_string(expect_dims[i]);
    for (int i = 0; i < a.rank; ++i)
      got += (i ? "x" : "") + std::to_string(a.dims[static_cast<size_t>(i)]);
    throw Error("shape mismatch in " + path + ": expected " + want + ", found " + got);
  }
  return a;
}

}  // namespace mcvad
