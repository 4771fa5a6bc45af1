#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace tablex {

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Integer pixel rectangle, half-open: [x, x + width) x [y, y + height).
struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int right() const { return x + width; }
  int bottom() const { return y + height; }
  bool empty() const { return width <= 0 || height <= 0; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Row-major single-channel byte raster shared by the gray and binary images.
class Plane {
 public:
  Plane(int width, int height, std::uint8_t fill);
  Plane(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  std::span<const std::uint8_t> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }
  std::span<std::uint8_t> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }

  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

 protected:
  std::uint8_t get(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  void put(int x, int y, std::uint8_t v) {
    data_[static_cast<std::size_t>(y) * width_ + x] = v;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

}  // namespace detail

/// 8-bit grayscale raster, 0 = black, 255 = white.
class GrayImage : public detail::Plane {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 255)
      : Plane(width, height, fill) {}
  GrayImage(int width, int height, std::vector<std::uint8_t> data)
      : Plane(width, height, std::move(data)) {}

  std::uint8_t at(int x, int y) const { return get(x, y); }
  void set(int x, int y, std::uint8_t v) { put(x, y, v); }

  /// Copy of the pixels inside `rect`, which must lie within the image.
  GrayImage crop(const PixelRect& rect) const;
  void fill(const PixelRect& rect, std::uint8_t v);

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// 1 = foreground (ink or ruling), 0 = background.
class BinaryImage : public detail::Plane {
 public:
  BinaryImage(int width, int height, bool fill = false)
      : Plane(width, height, fill ? 1 : 0) {}
  /// Throws ImageError if any element is not 0 or 1.
  BinaryImage(int width, int height, std::vector<std::uint8_t> data);

  bool at(int x, int y) const { return get(x, y) != 0; }
  void set(int x, int y, bool v) { put(x, y, v ? 1 : 0); }

  /// Out-of-bounds reads are background.
  bool at_or_background(int x, int y) const {
    return contains(x, y) && get(x, y) != 0;
  }

  std::size_t count() const;
  BinaryImage crop(const PixelRect& rect) const;
  BinaryImage complement() const;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

enum class Orientation { Horizontal, Vertical };

enum class KernelCell : std::uint8_t { DontCare = 0, Foreground = 1 };

/// Structuring element anchored at (cols / 2, rows / 2).
class StructKernel {
 public:
  StructKernel(int rows, int cols, std::vector<KernelCell> cells);

  /// All-Foreground rows x cols rectangle.
  static StructKernel rect(int rows, int cols);
  /// 1 x length (horizontal) or length x 1 (vertical) line.
  static StructKernel line(Orientation orientation, int length);
  /// 3 x 3 plus-shaped intersection template; corners are DontCare.
  static StructKernel cross();

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int anchor_x() const { return cols_ / 2; }
  int anchor_y() const { return rows_ / 2; }
  KernelCell at(int row, int col) const {
    return cells_[static_cast<std::size_t>(row) * cols_ + col];
  }
  bool is_full_rect() const;

 private:
  int rows_;
  int cols_;
  std::vector<KernelCell> cells_;
};

/// Clamps `rect` to the image extent; may return an empty rect.
PixelRect clip_to(const PixelRect& rect, int width, int height);

}  // namespace tablex
