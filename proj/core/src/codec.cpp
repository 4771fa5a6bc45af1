#include "tablex/codec.hpp"

#include <jpeglib.h>
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace tablex {

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // Fixed point with the exact decimal weights, rounded half up.
  const int weighted = 299 * r + 587 * g + 114 * b;
  return static_cast<std::uint8_t>((weighted + 500) / 1000);
}

RgbImage RgbImage::from_gray(const GrayImage& gray) {
  RgbImage out{gray.width(), gray.height(), {}};
  out.pixels.reserve(gray.size() * 3);
  for (auto v : gray.data()) out.pixels.insert(out.pixels.end(), {v, v, v});
  return out;
}

void RgbImage::set(int x, int y, std::array<std::uint8_t, 3> rgb) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  std::copy(rgb.begin(), rgb.end(), pixels.begin() + static_cast<long>(i));
}

void RgbImage::draw_rect(const PixelRect& rect,
                         std::array<std::uint8_t, 3> rgb) {
  if (rect.empty()) return;
  for (int x = rect.x; x < rect.right(); ++x) {
    set(x, rect.y, rgb);
    set(x, rect.bottom() - 1, rgb);
  }
  for (int y = rect.y; y < rect.bottom(); ++y) {
    set(rect.x, y, rgb);
    set(rect.right() - 1, y, rgb);
  }
}

namespace {

GrayImage from_rgba(int width, int height, const std::vector<std::uint8_t>& rgba) {
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const std::uint8_t* p = &rgba[i * 4];
    // Composite onto white.
    auto over_white = [a = p[3]](std::uint8_t c) {
      return static_cast<std::uint8_t>((c * a + 255 * (255 - a) + 127) / 255);
    };
    gray[i] = luma(over_white(p[0]), over_white(p[1]), over_white(p[2]));
  }
  return GrayImage(width, height, std::move(gray));
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw ImageError(std::string("PNG decode failed: ") + image.message);
  }
  if (image.width == 0 || image.height == 0 || image.width > 1u << 15 ||
      image.height > 1u << 15) {
    png_image_free(&image);
    throw ImageError("PNG dimensions out of range");
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    throw ImageError("PNG decode failed: " + message);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  png_image_free(&image);
  return from_rgba(w, h, rgba);
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silence(j_common_ptr, int) {}

// Plain C state only between setjmp and longjmp; the caller owns `rgb`.
bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, int& width,
                     int& height, std::vector<std::uint8_t>& rgb,
                     char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silence;
  err.message[0] = '\0';
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
    std::strncpy(message, "CMYK JPEG not supported", JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  if (width <= 0 || height <= 0 || width > (1 << 15) || height > (1 << 15)) {
    std::strncpy(message, "JPEG dimensions out of range", JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  rgb.resize(static_cast<std::size_t>(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) *
                                    width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

GrayImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
  char message[JMSG_LENGTH_MAX] = {};
  if (!decode_jpeg_raw(bytes, width, height, rgb, message)) {
    throw ImageError(std::string("JPEG decode failed: ") + message);
  }
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luma(rgb[i * 3], rgb[i * 3 + 1], rgb[i * 3 + 2]);
  }
  return GrayImage(width, height, std::move(gray));
}

void write_png_raw(const std::filesystem::path& path, int width, int height,
                   std::uint32_t format, const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    throw ImageError("cannot write PNG " + path.string() + ": " +
                     image.message);
  }
}

}  // namespace

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::equal(std::begin(kPng), std::end(kPng), bytes.begin())) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 &&
      bytes[2] == 0xFF) {
    return decode_jpeg(bytes);
  }
  throw ImageError("unrecognised image format");
}

GrayImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const ImageError& e) {
    throw ImageError(path.string() + ": " + e.what());
  }
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
  write_png_raw(path, img.width(), img.height(), PNG_FORMAT_GRAY,
                img.data().data());
}

void write_png(const std::filesystem::path& path, const BinaryImage& img) {
  std::vector<std::uint8_t> gray(img.size());
  auto src = img.data();
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = src[i] ? 255 : 0;
  write_png_raw(path, img.width(), img.height(), PNG_FORMAT_GRAY, gray.data());
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
  write_png_raw(path, img.width, img.height, PNG_FORMAT_RGB, img.pixels.data());
}

}  // namespace tablex
