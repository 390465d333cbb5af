#include "mural2scene/skybox.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mural2scene {

namespace {

bool power_of_two(int v) { return v >= 2 && (v & (v - 1)) == 0; }

Rgba opaque(Rgb c) { return {c.r, c.g, c.b, 255}; }

std::uint8_t lerp_channel(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(std::lround(a + (b - a) * t));
}

/// Uniform double in [0, 1) from the top 53 bits, independent of the
/// standard library's distribution implementations.
double unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Premul {
  double r = 0, g = 0, b = 0, a = 0;
};

Premul premul_at(const Image &img, int x, int y) {
  x = std::clamp(x, 0, img.width() - 1);
  y = std::clamp(y, 0, img.height() - 1);
  const Rgba c = img.at(x, y);
  const double a = c.a / 255.0;
  return {c.r * a, c.g * a, c.b * a, a};
}

Premul bilinear(const Image &img, double sx, double sy) {
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0;
  const double fy = sy - y0;
  const Premul p00 = premul_at(img, x0, y0), p10 = premul_at(img, x0 + 1, y0);
  const Premul p01 = premul_at(img, x0, y0 + 1), p11 = premul_at(img, x0 + 1, y0 + 1);
  auto mix = [&](double Premul::*ch) {
    const double top = p00.*ch + (p10.*ch - p00.*ch) * fx;
    const double bottom = p01.*ch + (p11.*ch - p01.*ch) * fx;
    return top + (bottom - top) * fy;
  };
  return {mix(&Premul::r), mix(&Premul::g), mix(&Premul::b), mix(&Premul::a)};
}

void composite(Image &dst, int x, int y, const Premul &src) {
  if (src.a <= 0.0) return;
  const Rgba d = dst.at(x, y);
  const double inv = 1.0 - src.a;
  auto ch = [&](double s, std::uint8_t dv) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(s + dv * inv), 0L, 255L));
  };
  dst.set(x, y, {ch(src.r, d.r), ch(src.g, d.g), ch(src.b, d.b), 255});
}

/// Draws `clip` scaled to w x h with its bottom edge on row `bottom`,
/// wrapping horizontally around the strip.
void stamp(Image &strip, const Clip &clip, int left, int bottom, int w, int h) {
  Image src = clip.pixels;
  const int factor = std::max(1, std::min(src.width() / w, src.height() / h));
  if (factor > 1) src = downsample(src, factor);
  const double sx_scale = static_cast<double>(src.width()) / w;
  const double sy_scale = static_cast<double>(src.height()) / h;
  for (int dy = 0; dy < h; ++dy) {
    const int y = bottom - h + 1 + dy;
    if (y < 0 || y >= strip.height()) continue;
    for (int dx = 0; dx < w; ++dx) {
      const int x = ((left + dx) % strip.width() + strip.width()) % strip.width();
      composite(strip, x, y,
                bilinear(src, (dx + 0.5) * sx_scale - 0.5, (dy + 0.5) * sy_scale - 0.5));
    }
  }
}

}  // namespace

int horizon_row(int face_size_px) { return face_size_px / 2; }

int band_height_px(const SkyboxSpec &spec) {
  const int hr = horizon_row(spec.face_size_px);
  const long want = std::lround(spec.band_height_frac * spec.face_size_px);
  return static_cast<int>(std::clamp<long>(want, 0, std::max(0, hr - 1)));
}

Skybox make_skybox(const SkyboxSpec &spec, const std::vector<const Clip *> &horizon_clips) {
  const int f = spec.face_size_px;
  if (!power_of_two(f)) {
    throw CompileError(make_error("INVALID_VALUE",
                                  "face_size_px must be a power of two >= 2 (found " +
                                      std::to_string(f) + ")",
                                  {}, spec.loc));
  }
  const int band = band_height_px(spec);
  if (band > 0 && horizon_clips.empty()) {
    throw CompileError(make_error("MISSING_HORIZON",
                                  "skybox band is " + std::to_string(band) +
                                      " px tall but no horizon slices are given",
                                  {}, spec.loc));
  }

  // Side faces share their edge columns, so the ring has 4 * (f - 1)
  // distinct columns.
  const int ring = 4 * (f - 1);
  const int hr = horizon_row(f);
  Image strip(ring, f);
  for (int y = 0; y < f; ++y) {
    Rgba c = opaque(spec.ground);
    if (y < hr) {
      const double t = hr > 1 ? static_cast<double>(y) / (hr - 1) : 1.0;
      c = {lerp_channel(spec.sky_top.r, spec.sky_horizon.r, t),
           lerp_channel(spec.sky_top.g, spec.sky_horizon.g, t),
           lerp_channel(spec.sky_top.b, spec.sky_horizon.b, t), 255};
    }
    for (int x = 0; x < ring; ++x) strip.set(x, y, c);
  }

  if (band > 0) {
    std::mt19937_64 rng(spec.rhythm_seed);
    int cursor = 0;
    while (cursor < ring) {
      const Clip &clip = *horizon_clips[rng() % horizon_clips.size()];
      const double jitter =
          spec.scale_jitter.min + unit(rng) * (spec.scale_jitter.max - spec.scale_jitter.min);
      const int h = static_cast<int>(
          std::clamp<long>(std::lround(band * jitter), 1, std::max(1, hr - 1)));
      const double aspect = static_cast<double>(clip.width()) / std::max(1, clip.height());
      const int w = std::max(1, static_cast<int>(std::lround(h * aspect)));
      stamp(strip, clip, cursor, hr - 1, std::min(w, ring), h);
      // Neighbours overlap by a seeded 10-45 % of the width.
      cursor += std::max(1, static_cast<int>(std::lround(w * (0.55 + 0.35 * unit(rng)))));
    }
  }

  Skybox sky;
  for (int k = 0; k < 4; ++k) {
    Image face(f, f);
    for (int y = 0; y < f; ++y) {
      for (int x = 0; x < f; ++x) face.set(x, y, strip.at((k * (f - 1) + x) % ring, y));
    }
    sky.faces[static_cast<int>(kSideRing[k])] = std::move(face);
  }
  sky.faces[static_cast<int>(CubeFace::PosY)] = Image(f, f, opaque(spec.sky_top));
  sky.faces[static_cast<int>(CubeFace::NegY)] = Image(f, f, opaque(spec.ground));
  return sky;
}

Vec3 cube_direction(CubeFace face, int x, int y, int face_size_px) {
  const double sc = 2.0 * (x + 0.5) / face_size_px - 1.0;
  const double tc = 2.0 * (y + 0.5) / face_size_px - 1.0;
  Vec3 d;
  switch (face) {
    case CubeFace::PosX: d = {1, -tc, -sc}; break;
    case CubeFace::NegX: d = {-1, -tc, sc}; break;
    case CubeFace::PosY: d = {sc, 1, tc}; break;
    case CubeFace::NegY: d = {sc, -1, -tc}; break;
    case CubeFace::PosZ: d = {sc, -tc, 1}; break;
    case CubeFace::NegZ: d = {-sc, -tc, -1}; break;
  }
  return normalized(d);
}

Skybox skybox_from_panorama(const Image &equirect, int face_size_px) {
  if (!power_of_two(face_size_px)) {
    throw CompileError(make_error("INVALID_VALUE", "face_size_px must be a power of two >= 2"));
  }
  if (equirect.empty()) throw CompileError(make_error("INVALID_VALUE", "panorama is empty"));
  const int w = equirect.width();
  const int h = equirect.height();
  Skybox sky;
  for (int fi = 0; fi < 6; ++fi) {
    Image face(face_size_px, face_size_px);
    for (int y = 0; y < face_size_px; ++y) {
      for (int x = 0; x < face_size_px; ++x) {
        const Vec3 d = cube_direction(static_cast<CubeFace>(fi), x, y, face_size_px);
        const double lon = std::atan2(d.x, -d.z);
        const double lat = std::asin(std::clamp(d.y, -1.0, 1.0));
        const double sx = (0.5 + lon / (2 * kPi)) * w - 0.5;
        const double sy = (0.5 - lat / kPi) * h - 0.5;
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0, fy = sy - y0;
        auto px = [&](int xx, int yy) {
          return equirect.at(((xx % w) + w) % w, std::clamp(yy, 0, h - 1));
        };
        const Rgba c00 = px(x0, y0), c10 = px(x0 + 1, y0), c01 = px(x0, y0 + 1),
                   c11 = px(x0 + 1, y0 + 1);
        auto mix = [&](std::uint8_t Rgba::*ch) {
          const double top = c00.*ch + (c10.*ch - c00.*ch) * fx;
          const double bottom = c01.*ch + (c11.*ch - c01.*ch) * fx;
          return static_cast<std::uint8_t>(std::lround(top + (bottom - top) * fy));
        };
        face.set(x, y, {mix(&Rgba::r), mix(&Rgba::g), mix(&Rgba::b), 255});
      }
    }
    sky.faces[fi] = std::move(face);
  }
  return sky;
}

Image contact_sheet(const Skybox &sky) {
  const int f = sky.faces[0].width();
  Image sheet(4 * f, 3 * f);
  sheet.blit(sky.face(CubeFace::NegX), 0, f);
  sheet.blit(sky.face(CubeFace::PosZ), f, f);
  sheet.blit(sky.face(CubeFace::PosX), 2 * f, f);
  sheet.blit(sky.face(CubeFace::NegZ), 3 * f, f);
  sheet.blit(sky.face(CubeFace::PosY), f, 0);
  sheet.blit(sky.face(CubeFace::NegY), f, 2 * f);
  return sheet;
}

}  // namespace mural2scene
