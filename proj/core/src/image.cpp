#include "tablex/image.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace tablex {
namespace detail {

namespace {
void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw ImageError("image dimensions must be positive, got " +
                     std::to_string(width) + "x" + std::to_string(height));
  }
}
}  // namespace

Plane::Plane(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Plane::Plane(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw ImageError("pixel buffer length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
}

}  // namespace detail

PixelRect clip_to(const PixelRect& rect, int width, int height) {
  const int x0 = std::clamp(rect.x, 0, width);
  const int y0 = std::clamp(rect.y, 0, height);
  const int x1 = std::clamp(rect.right(), 0, width);
  const int y1 = std::clamp(rect.bottom(), 0, height);
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

namespace {
template <typename Image>
Image crop_plane(const Image& src, const PixelRect& rect) {
  if (rect.empty() || rect.x < 0 || rect.y < 0 || rect.right() > src.width() ||
      rect.bottom() > src.height()) {
    throw ImageError("crop rectangle outside image");
  }
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(rect.width) * rect.height);
  for (int y = rect.y; y < rect.bottom(); ++y) {
    auto row = src.row(y);
    out.insert(out.end(), row.begin() + rect.x, row.begin() + rect.right());
  }
  return Image(rect.width, rect.height, std::move(out));
}
}  // namespace

GrayImage GrayImage::crop(const PixelRect& rect) const {
  return crop_plane(*this, rect);
}

void GrayImage::fill(const PixelRect& rect, std::uint8_t v) {
  const PixelRect r = clip_to(rect, width(), height());
  for (int y = r.y; y < r.bottom(); ++y) {
    auto line = row(y);
    std::fill(line.begin() + r.x, line.begin() + r.right(), v);
  }
}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> data)
    : Plane(width, height, std::move(data)) {
  if (std::any_of(this->data().begin(), this->data().end(),
                  [](std::uint8_t v) { return v > 1; })) {
    throw ImageError("binary image elements must be 0 or 1");
  }
}

std::size_t BinaryImage::count() const {
  return std::accumulate(data().begin(), data().end(), std::size_t{0});
}

BinaryImage BinaryImage::crop(const PixelRect& rect) const {
  return crop_plane(*this, rect);
}

BinaryImage BinaryImage::complement() const {
  BinaryImage out = *this;
  for (auto& v : out.data()) v ^= 1;
  return out;
}

StructKernel::StructKernel(int rows, int cols, std::vector<KernelCell> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows < 1 || cols < 1) throw ImageError("kernel dimensions must be >= 1");
  if (cells_.size() != static_cast<std::size_t>(rows) * cols) {
    throw ImageError("kernel cell count does not match its dimensions");
  }
}

StructKernel StructKernel::rect(int rows, int cols) {
  return StructKernel(
      rows, cols,
      std::vector<KernelCell>(static_cast<std::size_t>(std::max(rows, 0)) *
                                  std::max(cols, 0),
                              KernelCell::Foreground));
}

StructKernel StructKernel::line(Orientation orientation, int length) {
  return orientation == Orientation::Horizontal ? rect(1, length)
                                                : rect(length, 1);
}

StructKernel StructKernel::cross() {
  constexpr auto F = KernelCell::Foreground;
  constexpr auto D = KernelCell::DontCare;
  return StructKernel(3, 3, {D, F, D, F, F, F, D, F, D});
}

bool StructKernel::is_full_rect() const {
  return std::all_of(cells_.begin(), cells_.end(),
                     [](KernelCell c) { return c == KernelCell::Foreground; });
}

}  // namespace tablex
