#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "tablex/codec.hpp"

using namespace tablex;

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const std::filesystem::path kData = TABLEX_TEST_DATA_DIR;

}  // namespace

TEST(Codec, LumaUsesRoundedWeights) {
  EXPECT_EQ(luma(255, 255, 255), 255);
  EXPECT_EQ(luma(0, 0, 0), 0);
  EXPECT_EQ(luma(255, 0, 0), 76);   // 76.245
  EXPECT_EQ(luma(0, 255, 0), 150);  // 149.685
  EXPECT_EQ(luma(0, 0, 255), 29);   // 29.07
}

TEST(Codec, PngRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "tablex_codec_test";
  std::filesystem::create_directories(dir);
  GrayImage g(13, 7);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 13; ++x) g.set(x, y, static_cast<std::uint8_t>(x * 19 + y * 3));
  }
  write_png(dir / "g.png", g);
  EXPECT_EQ(read_image(dir / "g.png"), g);

  BinaryImage b(4, 2);
  b.set(1, 1, true);
  write_png(dir / "b.png", b);
  const GrayImage back = read_image(dir / "b.png");
  EXPECT_EQ(back.at(1, 1), 255);
  EXPECT_EQ(back.at(0, 0), 0);
  std::filesystem::remove_all(dir);
}

TEST(Codec, PngAlphaIsCompositedOnWhite) {
  const GrayImage g = read_image(kData / "alpha.png");
  ASSERT_EQ(g.width(), 3);
  EXPECT_EQ(g.at(0, 0), 255);
  EXPECT_EQ(g.at(1, 0), luma(255, 0, 0));
  EXPECT_EQ(g.at(2, 0), 0);
}

TEST(Codec, JpegDecodes) {
  const GrayImage g = read_image(kData / "two_band.jpg");
  ASSERT_EQ(g.width(), 8);
  ASSERT_EQ(g.height(), 8);
  EXPECT_LT(g.at(3, 1), 30);
  EXPECT_GT(g.at(3, 6), 225);
}

TEST(Codec, UnknownAndCorruptInputsThrow) {
  const std::vector<std::uint8_t> junk{'h', 'e', 'l', 'l', 'o'};
  EXPECT_THROW(decode_image(junk), ImageError);
  EXPECT_THROW(decode_image({}), ImageError);
  auto png = slurp(kData / "alpha.png");
  png.resize(png.size() / 2);
  EXPECT_THROW(decode_image(png), ImageError);
  auto jpg = slurp(kData / "two_band.jpg");
  jpg.resize(40);
  EXPECT_THROW(decode_image(jpg), ImageError);
  EXPECT_THROW(read_image(kData / "missing.png"), ImageError);
}

// Arbitrary bytes behind valid magic numbers must fail cleanly.
TEST(Codec, FuzzedBytesNeverCrash) {
  std::mt19937_64 rng(21);
  const auto png = slurp(kData / "alpha.png");
  const auto jpg = slurp(kData / "two_band.jpg");
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<std::uint8_t> bytes = trial % 2 ? png : jpg;
    const int flips = 1 + static_cast<int>(rng() % 8);
    for (int f = 0; f < flips; ++f) {
      bytes[4 + rng() % (bytes.size() - 4)] = static_cast<std::uint8_t>(rng());
    }
    if (trial % 3 == 0) bytes.resize(4 + rng() % (bytes.size() - 4));
    try {
      const GrayImage g = decode_image(bytes);
      EXPECT_GT(g.size(), 0u);
    } catch (const ImageError&) {
    }
  }
}
