// Copyright 2026 The mitodg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mitodg/core/error.hpp"
#include "mitodg/core/image.hpp"
#include "mitodg/core/parallel.hpp"
#include "mitodg/core/random.hpp"
#include "mitodg/core/raster_io.hpp"
#include "mitodg/core/types.hpp"
#include "oracles/splitmix_oracle.hpp"
#include "support/test_support.hpp"

#include <doctest.h>

#include <atomic>
#include <fstream>

using namespace mitodg;

namespace {

std::vector<std::uint64_t> draws(const RandomStream& s, int n) {
  Generator g = s.generator();
  std::vector<std::uint64_t> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = g.next_u64();
  return out;
}

Rgb8Image gray(int w, int h, std::initializer_list<std::uint8_t> values) {
  std::vector<std::uint8_t> data;
  for (auto v : values) data.insert(data.end(), {v, v, v});
  return Rgb8Image(w, h, std::move(data));
}

}  // namespace

TEST_CASE("generator matches published SplitMix64 vectors") {
  // Reference outputs of SplitMix64 seeded with 0.
  Generator g(0);
  CHECK(g.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(g.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(g.next_u64() == 0x06c45d188009454fULL);
}

TEST_CASE("stream keys agree with the reference derivation") {
  const RandomStream s = RandomStream(42).derive("augment").derive(7).derive(3);
  CHECK(s.key() == oracle::stream_key(42, {oracle::fnv1a("augment"), 7, 3}));
  oracle::SplitMix ref{s.key()};
  Generator g = s.generator();
  for (int i = 0; i < 100; ++i) CHECK(g.next_u64() == ref.next());
  ref = oracle::SplitMix{s.key()};
  g = s.generator();
  for (int i = 0; i < 100; ++i) CHECK(g.normal() == ref.normal());
}

TEST_CASE("derived streams are reproducible and distinct") {
  const RandomStream root(2021);
  CHECK(draws(root.derive(0), 1000) == draws(root.derive(0), 1000));
  CHECK(root.derive(0) == root.derive(0));

  const auto a = draws(root.derive(0), 1000);
  const auto b = draws(root.derive(1), 1000);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differing += a[i] != b[i];
  CHECK(differing >= 1);
  CHECK(differing > 990);

  const auto ab = root.derive(0).derive(1);
  const auto ba = root.derive(1).derive(0);
  CHECK_FALSE(ab == ba);
  CHECK(ab.key() != ba.key());
  CHECK(draws(ab, 16) != draws(ba, 16));
  CHECK(RandomStream(1).key() != RandomStream(2).key());
}

TEST_CASE("below is unbiased and in range") {
  Generator g = RandomStream(5).generator();
  std::array<int, 7> counts{};
  for (int i = 0; i < 70000; ++i) {
    const auto v = g.below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  // 6 sigma for Binomial(70000, 1/7).
  for (int c : counts) CHECK(std::abs(c - 10000) < 6 * 92.6);
  for (int i = 0; i < 1000; ++i) {
    const auto v = g.between(-3, 3);
    CHECK(v >= -3);
    CHECK(v <= 3);
  }
}

TEST_CASE("uniform and normal moments") {
  Generator g = RandomStream(9).generator();
  double sum = 0, sum_sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.015);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
  for (int i = 0; i < 1000; ++i) {
    const double u = g.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("image buffer invariants") {
  CHECK_THROWS_AS(Rgb8Image(2, 2, std::vector<std::uint8_t>(11)), Error);
  const Rgb8Image img(3, 2, Rgb{1, 2, 3});
  CHECK(img.pixel_count() == 6);
  CHECK(img.at(2, 1) == Rgb{1, 2, 3});
  CHECK(img.pixels().rows() == 6);
  CHECK(img.pixels()(5, 2) == 3);
}

TEST_CASE("crop examples") {
  const auto img = testing::random_image(448, 448, 1);
  CHECK(crop(img, {0, 0}, {448, 448}) == img);

  const auto tiny = gray(2, 2, {1, 2, 3, 4});
  CHECK(crop(tiny, {1, 0}, {1, 2}) == gray(1, 2, {2, 4}));

  try {
    (void)crop(img, {400, 400}, {100, 100});
    FAIL("expected OutOfBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfBounds);
  }
  CHECK_THROWS_AS((void)crop(img, {-1, 0}, {10, 10}), Error);
}

TEST_CASE("crop composes") {
  const auto img = testing::random_image(120, 90, 3);
  Generator g = RandomStream(77).generator();
  for (int t = 0; t < 200; ++t) {
    const PixelSize s1{static_cast<int>(g.between(1, 120)), static_cast<int>(g.between(1, 90))};
    const PixelPoint a{static_cast<int>(g.between(0, 120 - s1.width)),
                       static_cast<int>(g.between(0, 90 - s1.height))};
    const PixelSize s2{static_cast<int>(g.between(1, s1.width)),
                       static_cast<int>(g.between(1, s1.height))};
    const PixelPoint b{static_cast<int>(g.between(0, s1.width - s2.width)),
                       static_cast<int>(g.between(0, s1.height - s2.height))};
    CHECK(crop(crop(img, a, s1), b, s2) == crop(img, {a.x + b.x, a.y + b.y}, s2));
  }
}

TEST_CASE("flips and reflect padding") {
  const auto img = testing::random_image(31, 17, 4);
  CHECK(flip_horizontal(flip_horizontal(img)) == img);
  CHECK(flip_vertical(flip_vertical(img)) == img);
  CHECK(flip_horizontal(img).at(0, 5) == img.at(30, 5));

  const auto padded = reflect_pad(gray(3, 1, {10, 20, 30}), {6, 2});
  CHECK(padded.width() == 6);
  CHECK(padded.height() == 2);
  // Mirror without repeating the edge: 10 20 30 | 20 10 20
  CHECK(padded.at(3, 0)[0] == 20);
  CHECK(padded.at(4, 0)[0] == 10);
  CHECK(padded.at(5, 0)[0] == 20);
  CHECK(padded.at(1, 1)[0] == 20);
}

TEST_CASE("clamp_byte rounds half up and saturates") {
  CHECK(clamp_byte(-3.0) == 0);
  CHECK(clamp_byte(254.5) == 255);
  CHECK(clamp_byte(300.0) == 255);
  CHECK(clamp_byte(10.49) == 10);
  CHECK(clamp_byte(10.5) == 11);
  CHECK(clamp_byte(std::nan("")) == 0);
}

TEST_CASE("box geometry") {
  const Box a{0, 0, 10, 10}, b{5, 5, 15, 15};
  CHECK(iou(a, b) == doctest::Approx(25.0 / 175.0));
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, Box{20, 20, 30, 30}) == 0.0);
  CHECK_FALSE(intersect(a, Box{10, 0, 20, 10}).has_value());

  Annotation bad{1, 1, {50, 50}, {0, 0, 10, 10}, Label::kMitoticFigure};
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK(parse_label("imposter") == Label::kImposter);
  CHECK_FALSE(parse_label("mitosis").has_value());
}

TEST_CASE("raster round trips") {
  const auto dir = testing::scratch_dir("core-raster");
  const auto img = testing::random_image(37, 23, 8);
  write_png(img, dir / "a.png");
  CHECK(read_image(dir / "a.png") == img);
  CHECK(decode_png(encode_png(img)) == img);
  CHECK(encode_png(img) == encode_png(img));

  write_tiff(img, dir / "a.tif");
  CHECK(read_image(dir / "a.tif") == img);

  const auto jpeg = decode_jpeg(encode_jpeg(img, 95));
  CHECK(jpeg.width() == 37);
  CHECK(jpeg.height() == 23);

  try {
    (void)read_image(dir / "missing.png");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIoError);
    CHECK(std::string(e.what()).find("missing.png") != std::string::npos);
  }
  std::ofstream(dir / "junk.png") << "not an image";
  CHECK_THROWS_AS((void)read_image(dir / "junk.png"), Error);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw Error(ErrorCode::kIoError, "boom");
                               }),
                  Error);
}
