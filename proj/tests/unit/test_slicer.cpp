#include <doctest.h>

#include <algorithm>
#include <random>

#include "generators.hpp"
#include "mural2scene/slicer.hpp"
#include "oracles.hpp"

using namespace mural2scene;

namespace {

SliceSpec slice(std::string id, std::vector<Vec2> mask) {
  SliceSpec s;
  s.slice_id = std::move(id);
  s.source_id = "src";
  s.mask = std::move(mask);
  return s;
}

Image noise_image(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  Image img(w, h);
  for (auto &b : img.bytes()) b = static_cast<std::uint8_t>(rng());
  return img;
}

Clip blank_clip(std::string id, int w, int h) {
  Clip c;
  c.slice_id = std::move(id);
  c.pixels = Image(w, h, {1, 2, 3, 255});
  return c;
}

bool overlaps(const PixelRect &a, const PixelRect &b) {
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

}  // namespace

TEST_CASE("rectangular mask") {
  const Image src = noise_image(50, 50, 1);
  const Clip c = extract_clip(src, 254.0, slice("r", {{5, 7}, {15, 7}, {15, 27}, {5, 27}}));
  CHECK(c.width() == 10);
  CHECK(c.height() == 20);
  CHECK(c.origin_x == 5);
  CHECK(c.origin_y == 7);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 10; ++x) CHECK(c.pixels.at(x, y).a == 255);
  }
  // 254 dpi: 10 px is 1 mm.
  CHECK(c.physical_size_m.x == doctest::Approx(0.001));
  CHECK(c.physical_size_m.y == doctest::Approx(0.002));
}

TEST_CASE("triangle over red copies red verbatim") {
  const Image src(40, 40, {200, 0, 0, 255});
  const Clip c = extract_clip(src, 100, slice("t", {{2, 2}, {30, 4}, {10, 35}}));
  int inside = 0;
  for (int y = 0; y < c.height(); ++y) {
    for (int x = 0; x < c.width(); ++x) {
      const Rgba p = c.pixels.at(x, y);
      if (p.a == 255) {
        ++inside;
        CHECK(p.r == 200);
        CHECK(p.g == 0);
        CHECK(p.b == 0);
      }
    }
  }
  CHECK(inside > 0);
}

TEST_CASE("concave L shape matches the crossing-test oracle") {
  const Image src = noise_image(64, 64, 2);
  const std::vector<Vec2> l{{3, 3}, {40, 3}, {40, 15}, {15, 15}, {15, 50}, {3, 50}};
  const Clip c = extract_clip(src, 100, slice("l", l));
  int transparent = 0;
  int oracle_inside = 0;
  for (int y = 0; y < c.height(); ++y) {
    for (int x = 0; x < c.width(); ++x) {
      const int sx = x + c.origin_x;
      const int sy = y + c.origin_y;
      const bool in = oracle::pnpoly(l, sx + 0.5, sy + 0.5);
      oracle_inside += in;
      transparent += c.pixels.at(x, y).a == 0;
      CHECK((c.pixels.at(x, y).a == 255) == in);
      const Rgba s = src.at(sx, sy);
      CHECK(c.pixels.at(x, y).r == s.r);
    }
  }
  CHECK(transparent == c.width() * c.height() - oracle_inside);
  CHECK(oracle_inside == 37 * 12 + 12 * 35);
}

TEST_CASE("mask covering no pixel center") {
  const Image src(10, 10);
  try {
    extract_clip(src, 100, slice("d", {{1.1, 1.1}, {1.4, 1.1}, {1.2, 1.3}}));
    FAIL("expected DEGENERATE_MASK");
  } catch (const CompileError &e) {
    CHECK(e.code() == "DEGENERATE_MASK");
  }
}

TEST_CASE("feathering") {
  const Image src(30, 30, {9, 9, 9, 255});
  const Clip c = extract_clip(src, 100, slice("f", {{0.5, 0.5}, {20.5, 0.5}, {20.5, 20.5}, {0.5, 20.5}}));

  SUBCASE("radius 0 is the identity") { CHECK(feather_alpha(c, 0) == c); }

  SUBCASE("radius 2, one pixel inside the edge") {
    const Clip f = feather_alpha(c, 2);
    // Clip starts at source pixel 0; pixel 1 has its center 1 px inside.
    const int a = f.pixels.at(1 - c.origin_x, 10 - c.origin_y).a;
    CHECK(a >= 127);
    CHECK(a <= 129);
    CHECK(f.pixels.at(10 - c.origin_x, 10 - c.origin_y).a == 255);
  }

  SUBCASE("large radius is monotone toward the middle") {
    const Clip f = feather_alpha(c, 40);
    const int row = 10 - c.origin_y;
    int prev = -1;
    int peak = 0;
    for (int x = 1 - c.origin_x; x <= 10 - c.origin_x; ++x) {
      const int a = f.pixels.at(x, row).a;
      CHECK(a >= prev);
      prev = a;
      peak = std::max(peak, a);
    }
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) CHECK(f.pixels.at(x, y).a <= peak);
    }
    // Feathering never touches RGB.
    CHECK(f.pixels.at(5, 5).r == 9);
  }

  SUBCASE("distance oracle") {
    const Clip f = feather_alpha(c, 4);
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) {
        if (c.pixels.at(x, y).a == 0) {
          CHECK(f.pixels.at(x, y).a == 0);
          continue;
        }
        const double d = oracle::edge_distance(c.mask, {x + 0.5, y + 0.5});
        const double want = std::min(255.0, 255.0 * d / 4.0);
        CHECK(std::abs(f.pixels.at(x, y).a - want) <= 1.0);
      }
    }
  }
}

TEST_CASE("atlas packing") {
  SUBCASE("one clip") {
    const auto atlases = pack_atlas({blank_clip("a", 30, 20)}, 256, 2);
    REQUIRE(atlases.size() == 1);
    REQUIRE(atlases[0].entries.size() == 1);
    const auto &e = atlases[0].entries.at("a");
    CHECK(e.clip_px.w == 30);
    CHECK(e.clip_px.h == 20);
    CHECK(e.cell_px.w == 34);
    CHECK(e.cell_px.h == 24);
    CHECK(e.clip_px.x == e.cell_px.x + 2);
    CHECK(e.uv.u0 == doctest::Approx(static_cast<double>(e.clip_px.x) / atlases[0].pixels.width()));
  }

  SUBCASE("two 512 squares fit a 1024 atlas without padding") {
    const auto atlases =
        pack_atlas({blank_clip("a", 512, 512), blank_clip("b", 512, 512)}, 1024, 0);
    REQUIRE(atlases.size() == 1);
    CHECK_FALSE(overlaps(atlases[0].entries.at("a").cell_px, atlases[0].entries.at("b").cell_px));
  }

  SUBCASE("37 random clips") {
    gen::Rng rng(37);
    std::vector<Clip> clips;
    for (int i = 0; i < 37; ++i) {
      Clip c = blank_clip("c" + std::to_string(i), gen::uniform_int(rng, 1, 300),
                          gen::uniform_int(rng, 1, 300));
      for (auto &b : c.pixels.bytes()) b = static_cast<std::uint8_t>(rng());
      clips.push_back(std::move(c));
    }
    const auto a = pack_atlas(clips, 1024, 2);
    std::size_t total = 0;
    for (const auto &atlas : a) {
      total += atlas.entries.size();
      CHECK(atlas.pixels.width() <= 1024);
      CHECK(atlas.pixels.height() <= 1024);
      std::vector<PixelRect> cells;
      for (const auto &[id, e] : atlas.entries) {
        CHECK(e.cell_px.x >= 0);
        CHECK(e.cell_px.y >= 0);
        CHECK(e.cell_px.x + e.cell_px.w <= atlas.pixels.width());
        CHECK(e.cell_px.y + e.cell_px.h <= atlas.pixels.height());
        cells.push_back(e.cell_px);
        // Pixels land where the entry says.
        const auto &src = *std::find_if(clips.begin(), clips.end(),
                                        [&](const Clip &c) { return c.slice_id == id; });
        CHECK(atlas.pixels.crop(e.clip_px.x, e.clip_px.y, e.clip_px.w, e.clip_px.h) ==
              src.pixels);
      }
      for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) CHECK_FALSE(overlaps(cells[i], cells[j]));
      }
    }
    CHECK(total == 37);
    CHECK(pack_atlas(clips, 1024, 2) == a);
    std::reverse(clips.begin(), clips.end());
    CHECK(pack_atlas(clips, 1024, 2) == a);
  }

  SUBCASE("clip larger than the atlas") {
    try {
      pack_atlas({blank_clip("big", 100, 10)}, 100, 1);
      FAIL("expected CLIP_TOO_LARGE");
    } catch (const CompileError &e) {
      CHECK(e.code() == "CLIP_TOO_LARGE");
    }
  }
}

TEST_CASE("downsampling") {
  const Image src = noise_image(17, 9, 3);
  CHECK(downsample(src, 1) == src);

  Image checker(2, 2);
  checker.set(0, 0, {255, 255, 255, 255});
  checker.set(1, 1, {255, 255, 255, 255});
  const Image one = downsample(checker, 2);
  REQUIRE(one.width() == 1);
  CHECK(one.at(0, 0).r == 128);
  CHECK(one.at(0, 0).a == 128);

  const Image strip(4000, 3);
  const Image small = downsample(strip, 4);
  CHECK(small.width() == 1000);
  CHECK(small.height() == 1);

  const Image odd = downsample(src, 4);
  CHECK(odd.width() == 5);
  CHECK(odd.height() == 3);
  // Edge block averages only the pixels it has.
  CHECK(odd.at(4, 2).r == src.at(16, 8).r);
}
