// Paints the synthetic murals the test fixtures point at.
//
//   make_fixture_mural <out_dir>
//
// foguang_mural.png   13.0 x 3.6 m at 30 dpi (15354 x 4252 px)
// cave_mural.png      2.0 x 1.0 m at 60 dpi (4724 x 2362 px)
// panorama.png        1024 x 512 equirectangular capture

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>

#include "mural2scene/image.hpp"
#include "mural2scene/specs.hpp"

namespace fs = std::filesystem;
using mural2scene::Image;
using mural2scene::Rgba;

namespace {

int px(double meters, int dpi) {
  return static_cast<int>(std::lround(meters / mural2scene::kMetersPerInch * dpi));
}

/// Parchment with faint 32 px banding; compresses well under PNG filters.
Image parchment(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    std::uint8_t *row = img.row(y);
    for (int x = 0; x < w; ++x) {
      const int t = ((x >> 5) + (y >> 5)) % 3;
      row[x * 4 + 0] = static_cast<std::uint8_t>(196 + t);
      row[x * 4 + 1] = static_cast<std::uint8_t>(170 + t);
      row[x * 4 + 2] = static_cast<std::uint8_t>(120 + t);
      row[x * 4 + 3] = 255;
    }
  }
  return img;
}

void fill_rect(Image &img, int x0, int y0, int w, int h, Rgba c) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) img.set(x, y, c);
  }
}

void fill_ellipse(Image &img, int x0, int y0, int w, int h, Rgba c) {
  const double cx = x0 + w / 2.0, cy = y0 + h / 2.0;
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      const double u = (x + 0.5 - cx) / (w / 2.0), v = (y + 0.5 - cy) / (h / 2.0);
      if (u * u + v * v <= 1.0) img.set(x, y, c);
    }
  }
}

/// Isosceles triangle with its base on the bottom edge of the box.
void fill_peak(Image &img, int x0, int y0, int w, int h, Rgba c) {
  for (int y = y0; y < y0 + h; ++y) {
    const double half = (y + 0.5 - y0) / h * w / 2.0;
    const double mid = x0 + w / 2.0;
    for (int x = x0; x < x0 + w; ++x) {
      if (std::abs(x + 0.5 - mid) <= half) img.set(x, y, c);
    }
  }
}

Image foguang() {
  Image img = parchment(px(13.0, 30), px(3.6, 30));
  fill_ellipse(img, 600, 2200, 560, 1300, {168, 52, 40, 255});    // official
  fill_ellipse(img, 1500, 2300, 520, 1200, {112, 108, 100, 255});  // monk
  fill_ellipse(img, 2400, 600, 800, 800, {40, 32, 28, 255});       // aperture
  fill_ellipse(img, 3600, 200, 1400, 600, {236, 232, 220, 255});   // cloud
  fill_rect(img, 5800, 2900, 100, 800, {92, 64, 40, 255});         // tree trunk
  fill_ellipse(img, 5400, 1500, 900, 1500, {60, 120, 64, 255});    // tree crown
  fill_rect(img, 6600, 1300, 4800, 1800, {150, 84, 52, 255});      // east hall facade
  fill_rect(img, 6900, 1750, 4200, 1300, {176, 60, 44, 255});      // colonnade
  fill_rect(img, 6600, 3100, 2400, 800, {72, 72, 76, 255});        // roof tiles
  fill_peak(img, 11600, 300, 3200, 900, {70, 120, 110, 255});      // mountains
  fill_peak(img, 11600, 1400, 2600, 1000, {90, 130, 96, 255});
  for (int i = 0; i < 3; ++i) {
    fill_ellipse(img, 9500 + i * 700, 3300, 400, 300, {120, 100, 80, 255});  // dust
  }
  fill_rect(img, 11800, 2600, 500, 1400, {210, 180, 60, 255});  // broom
  return img;
}

Image cave() {
  Image img = parchment(px(2.0, 60), px(1.0, 60));
  fill_ellipse(img, 300, 300, 1400, 1400, {40, 32, 28, 255});    // aperture
  fill_ellipse(img, 2200, 600, 700, 1500, {168, 52, 40, 255});   // guide
  fill_peak(img, 3200, 400, 1400, 700, {70, 120, 110, 255});     // ridge
  return img;
}

Image panorama() {
  Image img(1024, 512);
  for (int y = 0; y < 512; ++y) {
    for (int x = 0; x < 1024; ++x) {
      const Rgba c = y < 256 ? Rgba{static_cast<std::uint8_t>(120 + y / 4),
                                    static_cast<std::uint8_t>(170 + y / 8), 210, 255}
                             : Rgba{110, 90, static_cast<std::uint8_t>(60 + (x >> 4) % 8), 255};
      img.set(x, y, c);
    }
  }
  fill_peak(img, 400, 180, 240, 76, {70, 120, 110, 255});
  return img;
}

}  // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture_mural <out_dir>\n";
    return 2;
  }
  const fs::path out = argv[1];
  try {
    fs::create_directories(out);
    mural2scene::write_png(out / "foguang_mural.png", foguang());
    mural2scene::write_png(out / "cave_mural.png", cave());
    mural2scene::write_png(out / "panorama.png", panorama());
  } catch (const std::exception &e) {
    std::cerr << "make_fixture_mural: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
