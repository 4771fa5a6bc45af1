#include "tablex/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace tablex {

OtsuResult otsu_binarize(const GrayImage& img) {
  const Histogram hist = intensity_histogram(img);
  long double total = 0;
  long double total_sum = 0;
  for (int v = 0; v < 256; ++v) {
    total += static_cast<long double>(hist[v]);
    total_sum += static_cast<long double>(hist[v]) * v;
  }

  // Between-class variance up to the constant factor 1 / total^2:
  // (total * sum0 - n0 * total_sum)^2 / (n0 * n1).
  std::array<long double, 256> variance{};
  std::array<bool, 256> valid{};
  long double n0 = 0;
  long double sum0 = 0;
  long double best = -1;
  for (int t = 0; t < 256; ++t) {
    n0 += static_cast<long double>(hist[t]);
    sum0 += static_cast<long double>(hist[t]) * t;
    const long double n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const long double diff = total * sum0 - n0 * total_sum;
    variance[t] = diff * diff / (n0 * n1);
    valid[t] = true;
    best = std::max(best, variance[t]);
  }

  if (best < 0) {
    const auto level = static_cast<std::uint8_t>(img.at(0, 0));
    return {level, BinaryImage(img.width(), img.height()), true};
  }

  const long double tolerance = best * 1e-12L;
  int first = 0;
  while (!valid[first] || variance[first] < best - tolerance) ++first;
  int last = first;
  while (last + 1 < 256 && valid[last + 1] &&
         variance[last + 1] >= best - tolerance) {
    ++last;
  }
  const auto threshold = static_cast<std::uint8_t>((first + last) / 2);

  BinaryImage binary(img.width(), img.height());
  auto src = img.data();
  auto dst = binary.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] <= threshold ? 1 : 0;
  }
  return {threshold, std::move(binary), false};
}

namespace {

// For every position i of a 0/1 sequence, whether the window [i + lo, i + hi]
// is entirely ones (`all`) or contains any one (`!all`). Outside is zero.
void window_pass(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                 std::vector<int>& prefix, int lo, int hi, bool all) {
  const int n = static_cast<int>(in.size());
  prefix.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + in[i];
  const int window = hi - lo + 1;
  for (int i = 0; i < n; ++i) {
    const int a = std::clamp(i + lo, 0, n);
    const int b = std::clamp(i + hi + 1, 0, n);
    const int ones = prefix[b] - prefix[a];
    out[i] = all ? (ones == window ? 1 : 0) : (ones > 0 ? 1 : 0);
  }
}

// Separable erosion/dilation for all-Foreground rectangles.
BinaryImage rect_morph(const BinaryImage& img, const StructKernel& k,
                       bool erosion) {
  const int w = img.width();
  const int h = img.height();
  const int ax = k.anchor_x();
  const int ay = k.anchor_y();
  // Erosion reads p + d for d in [-anchor, size - 1 - anchor]; dilation reads
  // p - d, i.e. the mirrored window.
  const int xlo = erosion ? -ax : -(k.cols() - 1 - ax);
  const int xhi = erosion ? k.cols() - 1 - ax : ax;
  const int ylo = erosion ? -ay : -(k.rows() - 1 - ay);
  const int yhi = erosion ? k.rows() - 1 - ay : ay;

  BinaryImage pass1(w, h);
  std::vector<int> prefix;
  for (int y = 0; y < h; ++y) {
    window_pass(img.row(y), pass1.row(y), prefix, xlo, xhi, erosion);
  }
  if (k.rows() == 1) return pass1;

  BinaryImage out(w, h);
  std::vector<std::uint8_t> column(h);
  std::vector<std::uint8_t> result(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) column[y] = pass1.at(x, y) ? 1 : 0;
    window_pass(column, result, prefix, ylo, yhi, erosion);
    for (int y = 0; y < h; ++y) out.set(x, y, result[y] != 0);
  }
  return out;
}

struct Offset {
  int dx;
  int dy;
};

std::vector<Offset> foreground_offsets(const StructKernel& k) {
  std::vector<Offset> offsets;
  for (int r = 0; r < k.rows(); ++r) {
    for (int c = 0; c < k.cols(); ++c) {
      if (k.at(r, c) == KernelCell::Foreground) {
        offsets.push_back({c - k.anchor_x(), r - k.anchor_y()});
      }
    }
  }
  return offsets;
}

BinaryImage generic_morph(const BinaryImage& img, const StructKernel& k,
                          bool erosion) {
  const auto offsets = foreground_offsets(k);
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      bool v;
      if (erosion) {
        v = std::all_of(offsets.begin(), offsets.end(), [&](const Offset& o) {
          return img.at_or_background(x + o.dx, y + o.dy);
        });
      } else {
        v = std::any_of(offsets.begin(), offsets.end(), [&](const Offset& o) {
          return img.at_or_background(x - o.dx, y - o.dy);
        });
      }
      out.set(x, y, v);
    }
  }
  return out;
}

void require_same_size(const BinaryImage& a, const BinaryImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ImageError("binary images differ in size");
  }
}

}  // namespace

BinaryImage erode(const BinaryImage& img, const StructKernel& k) {
  return k.is_full_rect() ? rect_morph(img, k, true)
                          : generic_morph(img, k, true);
}

BinaryImage dilate(const BinaryImage& img, const StructKernel& k) {
  return k.is_full_rect() ? rect_morph(img, k, false)
                          : generic_morph(img, k, false);
}

BinaryImage open(const BinaryImage& img, const StructKernel& k) {
  return dilate(erode(img, k), k);
}

int line_kernel_length(int extent, double k_frac) {
  return std::max(2, static_cast<int>(extent * k_frac));
}

BinaryImage extract_lines(const BinaryImage& binary, Orientation orientation,
                          double k_frac) {
  const int extent = orientation == Orientation::Horizontal ? binary.width()
                                                            : binary.height();
  return open(binary, StructKernel::line(orientation,
                                         line_kernel_length(extent, k_frac)));
}

std::vector<AxisLine> count_axis_lines(const BinaryImage& lines_img,
                                       Orientation orientation, int min_length,
                                       int merge_tolerance) {
  const bool horizontal = orientation == Orientation::Horizontal;
  const int offsets = horizontal ? lines_img.height() : lines_img.width();
  const int extent = horizontal ? lines_img.width() : lines_img.height();
  auto pixel = [&](int offset, int pos) {
    return horizontal ? lines_img.at(pos, offset) : lines_img.at(offset, pos);
  };

  struct Track {
    AxisLine line;
    int first_offset;
    int last_offset;
  };
  std::vector<Track> tracks;

  for (int off = 0; off < offsets; ++off) {
    int pos = 0;
    while (pos < extent) {
      if (!pixel(off, pos)) {
        ++pos;
        continue;
      }
      const int start = pos;
      while (pos < extent && pixel(off, pos)) ++pos;
      if (pos - start < min_length) continue;

      Track* host = nullptr;
      for (auto& t : tracks) {
        if (off - t.last_offset < merge_tolerance &&
            start < t.line.span_end && t.line.span_start < pos) {
          host = &t;
          break;
        }
      }
      if (host == nullptr) {
        tracks.push_back({{orientation, off, start, pos, 0}, off, off});
        host = &tracks.back();
      }
      host->line.span_start = std::min(host->line.span_start, start);
      host->line.span_end = std::max(host->line.span_end, pos);
      if (host->last_offset != off || host->line.thickness == 0) {
        ++host->line.thickness;
      }
      host->last_offset = off;
    }
  }

  std::vector<AxisLine> lines;
  lines.reserve(tracks.size());
  for (auto& t : tracks) {
    t.line.offset = (t.first_offset + t.last_offset) / 2;
    lines.push_back(t.line);
  }
  std::sort(lines.begin(), lines.end(), [](const AxisLine& a, const AxisLine& b) {
    return a.offset != b.offset ? a.offset < b.offset
                                : a.span_start < b.span_start;
  });
  return lines;
}

BinaryImage bitwise_or(const BinaryImage& a, const BinaryImage& b) {
  require_same_size(a, b);
  BinaryImage out = a;
  auto src = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
  return out;
}

BinaryImage bitwise_and_not(const BinaryImage& a, const BinaryImage& b) {
  require_same_size(a, b);
  BinaryImage out = a;
  auto src = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] &= src[i] ^ 1;
  return out;
}

std::optional<Point> hit_or_miss_any(const BinaryImage& img,
                                     const StructKernel& k) {
  const auto offsets = foreground_offsets(k);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const bool hit =
          std::all_of(offsets.begin(), offsets.end(), [&](const Offset& o) {
            return img.at_or_background(x + o.dx, y + o.dy);
          });
      if (hit) return Point{x, y};
    }
  }
  return std::nullopt;
}

Histogram intensity_histogram(const GrayImage& img) {
  Histogram hist{};
  for (auto v : img.data()) ++hist[v];
  return hist;
}

std::vector<std::uint64_t> foreground_profile(const BinaryImage& binary,
                                              Axis axis, int band) {
  band = std::max(band, 1);
  const bool columns = axis == Axis::Columns;
  const int n = columns ? binary.width() : binary.height();
  std::vector<std::uint64_t> sums(n, 0);
  for (int y = 0; y < binary.height(); ++y) {
    auto row = binary.row(y);
    for (int x = 0; x < binary.width(); ++x) {
      sums[columns ? x : y] += row[x];
    }
  }
  std::vector<std::uint64_t> prefix(n + 1, 0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sums[i];
  std::vector<std::uint64_t> response(n);
  for (int i = 0; i < n; ++i) {
    response[i] = prefix[std::min(i + band, n)] - prefix[i];
  }
  return response;
}

std::vector<PixelRect> connected_component_boxes(const BinaryImage& img,
                                                 Connectivity connectivity) {
  const int w = img.width();
  const int h = img.height();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<PixelRect> boxes;
  std::deque<Point> queue;

  static constexpr Point kFour[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  static constexpr Point kEight[] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                     {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
  const std::span<const Point> steps =
      connectivity == Connectivity::Four ? std::span<const Point>(kFour)
                                         : std::span<const Point>(kEight);

  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t idx = static_cast<std::size_t>(sy) * w + sx;
      if (seen[idx] || img.at(sx, sy)) continue;
      seen[idx] = 1;
      queue.push_back({sx, sy});
      int x0 = sx, y0 = sy, x1 = sx, y1 = sy;
      bool touches_border = false;
      while (!queue.empty()) {
        const Point p = queue.front();
        queue.pop_front();
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
        if (p.x == 0 || p.y == 0 || p.x == w - 1 || p.y == h - 1) {
          touches_border = true;
        }
        for (const Point& s : steps) {
          const int nx = p.x + s.x;
          const int ny = p.y + s.y;
          if (!img.contains(nx, ny)) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
          if (seen[nidx] || img.at(nx, ny)) continue;
          seen[nidx] = 1;
          queue.push_back({nx, ny});
        }
      }
      if (!touches_border) boxes.push_back({x0, y0, x1 - x0 + 1, y1 - y0 + 1});
    }
  }
  return boxes;
}

}  // namespace tablex
