#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mcvad {

// On-disk array format shared by cubes and flows:
//   8-byte header: magic "MCVB", uint8 rank, 3 zero bytes
//   4 little-endian uint32 dims (trailing dims zero when rank < 4)
//   float32 little-endian payload, C order
struct ArrayFile {
  int rank = 0;
  std::array<uint32_t, 4> dims{};
  std::vector<float> data;

  size_t element_count() const {
    size_t n = 1;
    for (int i = 0; i < rank; ++i) n *= dims[static_cast<size_t>(i)];
    return n;
  }
};

void write_array(const std::string& path, const ArrayFile& a);
ArrayFile read_array(const std::string& path);

/// Reads and validates the declared shape, reporting the path on mismatch.
ArrayFile read_array_checked(const std::string& path, const std::vector<uint32_t>& expect_dims);

}  // namespace mcvad
