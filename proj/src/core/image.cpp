#include "mcvad/core/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "mcvad/core/common.hpp"

namespace mcvad {

Image::Image(int w, int h, uint8_t r, uint8_t g, uint8_t b) : width(w), height(h) {
  rgb.resize(static_cast<size_t>(3) * w * h);
  for (size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
}

void Image::set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  size_t i = 3 * (static_cast<size_t>(y) * width + x);
  rgb[i] = r;
  rgb[i + 1] = g;
  rgb[i + 2] = b;
}

void Image::fill_rect(int x0, int y0, int x1, int y1, uint8_t r, uint8_t g, uint8_t b) {
  for (int y = std::max(0, y0); y <= std::min(height - 1, y1); ++y)
    for (int x = std::max(0, x0); x <= std::min(width - 1, x1); ++x) set(x, y, r, g, b);
}

void Image::line(int x0, int y0, int x1, int y1, uint8_t r, uint8_t g, uint8_t b) {
  int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    set(x0, y0, r, g, b);
    if (x0 == x1 && y0 == y1) break;
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void heat_color(double v, uint8_t* r, uint8_t* g, uint8_t* b) {
  v = std::clamp(v, 0.0, 1.0);
  auto ch = [](double x) {
    return static_cast<uint8_t>(std::lround(255.0 * std::clamp(x, 0.0, 1.0)));
  };
  *r = ch(3.0 * v);
  *g = ch(3.0 * v - 1.0);
  *b = ch(3.0 * v - 2.0);
}

namespace {

void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>((v >> 24) & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<uint8_t>(v & 0xff));
}

void write_chunk(std::FILE* f, const char type[4], const std::vector<uint8_t>& payload) {
  std::vector<uint8_t> head;
  put_u32be(head, static_cast<uint32_t>(payload.size()));
  std::fwrite(head.data(), 1, 4, f);
  std::fwrite(type, 1, 4, f);
  if (!payload.empty()) std::fwrite(payload.data(), 1, payload.size(), f);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
  if (!payload.empty()) crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
  std::vector<uint8_t> tail;
  put_u32be(tail, static_cast<uint32_t>(crc));
  std::fwrite(tail.data(), 1, 4, f);
}

}  // namespace

void write_png(const std::string& path, const Image& img) {
  require(img.width > 0 && img.height > 0, "write_png: empty image");

  // Filter type 0 on every scanline.
  std::vector<uint8_t> raw;
  raw.reserve(static_cast<size_t>(img.height) * (1 + 3 * img.width));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const uint8_t* row = img.rgb.data() + 3 * static_cast<size_t>(y) * img.width;
    raw.insert(raw.end(), row, row + 3 * static_cast<size_t>(img.width));
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> comp(comp_len);
  require(compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 6) == Z_OK,
          "write_png: deflate failed");
  comp.resize(comp_len);

  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wb"), std::fclose);
  require(f != nullptr, "write_png: cannot open " + path);
  const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  std::fwrite(sig, 1, 8, f.get());

  std::vector<uint8_t> ihdr;
  put_u32be(ihdr, static_cast<uint32_t>(img.width));
  put_u32be(ihdr, static_cast<uint32_t>(img.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // RGB
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  write_chunk(f.get(), "IHDR", ihdr);
  write_chunk(f.get(), "IDAT", comp);
  write_chunk(f.get(), "IEND", {});
}

}  // namespace mcvad
