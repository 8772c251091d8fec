#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mcvad {

/// 8-bit RGB raster with the small drawing helpers the export paths need.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // 3 * width * height, row-major

  Image(int w, int h, uint8_t r = 255, uint8_t g = 255, uint8_t b = 255);

  void set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
  void fill_rect(int x0, int y0, int x1, int y1, uint8_t r, uint8_t g, uint8_t b);
  void line(int x0, int y0, int x1, int y1, uint8_t r, uint8_t g, uint8_t b);
};

/// Black -> red -> yellow -> white; lightness increases with v in [0,1].
void heat_color(double v, uint8_t* r, uint8_t* g, uint8_t* b);

void write_png(const std::string& path, const Image& img);

}  // namespace mcvad
