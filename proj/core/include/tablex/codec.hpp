#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tablex/image.hpp"

namespace tablex {

/// Interleaved 8-bit RGB raster used for debug overlays.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static RgbImage from_gray(const GrayImage& gray);
  void set(int x, int y, std::array<std::uint8_t, 3> rgb);
  /// One-pixel outline, clipped to the image.
  void draw_rect(const PixelRect& rect, std::array<std::uint8_t, 3> rgb);
};

/// Integer-rounded 0.299 R + 0.587 G + 0.114 B.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Decodes PNG or JPEG (sniffed from the leading bytes) into luma.
/// Throws ImageError on anything else or on corrupt data.
GrayImage decode_image(std::span<const std::uint8_t> bytes);
GrayImage read_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const GrayImage& img);
/// Foreground is written white on black.
void write_png(const std::filesystem::path& path, const BinaryImage& img);
void write_png(const std::filesystem::path& path, const RgbImage& img);

}  // namespace tablex
