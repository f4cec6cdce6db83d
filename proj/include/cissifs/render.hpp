#pragma once

// Binary PGM (P5) / PPM (P6) output of level-n approximations.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "branching.hpp"

namespace cissifs {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top row first

  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

enum class Shading { binary, multiplicity };
enum class ImageFormat { pgm, ppm };

inline void write_pgm(std::ostream& os, const GrayImage& img) {
  os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

/// Gray replicated into RGB.
inline void write_ppm(std::ostream& os, const GrayImage& img) {
  os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  for (auto g : img.pixels) {
    const char rgb[3] = {static_cast<char>(g), static_cast<char>(g), static_cast<char>(g)};
    os.write(rgb, 3);
  }
}

inline void write_image(const std::string& path, const GrayImage& img, ImageFormat fmt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  fmt == ImageFormat::pgm ? write_pgm(out, img) : write_ppm(out, img);
  if (!out) throw std::runtime_error("failed writing " + path);
}

/// 255 for empty cells; covered cells are black (binary) or darker with
/// higher cylinder multiplicity.
inline std::uint8_t shade(std::uint32_t count, std::uint32_t max_count, Shading s) {
  if (count == 0) return 255;
  if (s == Shading::binary || max_count == 0) return 0;
  const double frac = static_cast<double>(count) / static_cast<double>(max_count);
  return static_cast<std::uint8_t>(std::lround(230.0 * (1.0 - frac)));
}

/// Line systems become a horizontal barcode `bar_height` pixels tall; planar
/// systems a square image with the second coordinate increasing upward.
inline GrayImage render_grid(const CoverageGrid& g, Shading s, std::size_t bar_height = 32) {
  GrayImage img;
  const auto peak = g.max_count();
  if (g.dimension == 1) {
    img.width = g.extent;
    img.height = bar_height;
    img.pixels.resize(img.width * img.height);
    for (std::size_t x = 0; x < g.extent; ++x) {
      const auto v = shade(g.counts[x], peak, s);
      for (std::size_t y = 0; y < bar_height; ++y) img.at(x, y) = v;
    }
  } else if (g.dimension == 2) {
    img.width = img.height = g.extent;
    img.pixels.resize(img.width * img.height);
    for (std::size_t x = 0; x < g.extent; ++x)
      for (std::size_t y = 0; y < g.extent; ++y)
        img.at(x, g.extent - 1 - y) = shade(g.counts[x * g.extent + y], peak, s);
  } else {
    throw std::invalid_argument("render supports dimensions 1 and 2");
  }
  return img;
}

}  // namespace cissifs
