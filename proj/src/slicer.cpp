#include "mural2scene/slicer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace mural2scene {

namespace {

/// x positions where the horizontal line at `cy` crosses the polygon, sorted.
std::vector<double> row_crossings(const std::vector<Vec2> &poly, double cy) {
  std::vector<double> xs;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > cy) != (b.y > cy)) xs.push_back((b.x - a.x) * (cy - a.y) / (b.y - a.y) + a.x);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

bool odd_crossings_right_of(const std::vector<double> &xs, double cx) {
  const auto right = xs.end() - std::upper_bound(xs.begin(), xs.end(), cx);
  return (right & 1) != 0;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 d = p - (a + ab * t);
  return std::sqrt(dot(d, d));
}

double boundary_distance(const std::vector<Vec2> &poly, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    best = std::min(best, segment_distance(p, poly[j], poly[i]));
  }
  return best;
}

}  // namespace

bool pixel_center_inside(const std::vector<Vec2> &poly, int x, int y) {
  if (poly.size() < 3) return false;
  return odd_crossings_right_of(row_crossings(poly, y + 0.5), x + 0.5);
}

Clip extract_clip(const Image &source, double dpi, const SliceSpec &spec) {
  auto degenerate = [&](const std::string &why) {
    return CompileError(make_error("DEGENERATE_MASK",
                                   "slice \"" + spec.slice_id + "\" " + why, {}, spec.loc));
  };
  if (spec.mask.size() < 3) throw degenerate("mask has fewer than 3 vertices");
  if (!(dpi > 0.0)) throw std::invalid_argument("dpi must be positive");

  double min_x = spec.mask[0].x, max_x = min_x, min_y = spec.mask[0].y, max_y = min_y;
  for (const Vec2 &p : spec.mask) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int x0 = std::clamp(static_cast<int>(std::floor(min_x)), 0, source.width());
  const int y0 = std::clamp(static_cast<int>(std::floor(min_y)), 0, source.height());
  const int x1 = std::clamp(static_cast<int>(std::ceil(max_x)), 0, source.width());
  const int y1 = std::clamp(static_cast<int>(std::ceil(max_y)), 0, source.height());
  if (x1 <= x0 || y1 <= y0) throw degenerate("mask covers no pixels of its source");

  Clip clip;
  clip.slice_id = spec.slice_id;
  clip.origin_x = x0;
  clip.origin_y = y0;
  clip.pixels = source.crop(x0, y0, x1 - x0, y1 - y0);
  clip.mask.reserve(spec.mask.size());
  for (const Vec2 &p : spec.mask) clip.mask.push_back({p.x - x0, p.y - y0});

  std::size_t covered = 0;
  for (int y = 0; y < clip.height(); ++y) {
    const auto xs = row_crossings(clip.mask, y + 0.5);
    std::uint8_t *px = clip.pixels.row(y);
    for (int x = 0; x < clip.width(); ++x) {
      const bool inside = odd_crossings_right_of(xs, x + 0.5);
      px[x * 4 + 3] = inside ? 255 : 0;
      covered += inside;
    }
  }
  if (covered == 0) throw degenerate("mask rasterizes to zero pixels");
  clip.physical_size_m = {static_cast<double>(clip.width()) / dpi * kMetersPerInch,
                          static_cast<double>(clip.height()) / dpi * kMetersPerInch};
  return clip;
}

Clip feather_alpha(const Clip &clip, int radius_px) {
  if (radius_px < 0) throw std::invalid_argument("feather radius must be >= 0");
  if (radius_px == 0 || clip.mask.size() < 3) return clip;
  Clip out = clip;
  const double r = radius_px;
  for (int y = 0; y < out.height(); ++y) {
    std::uint8_t *px = out.pixels.row(y);
    for (int x = 0; x < out.width(); ++x) {
      std::uint8_t &a = px[x * 4 + 3];
      if (a == 0) continue;
      const double d = boundary_distance(out.mask, {x + 0.5, y + 0.5});
      if (d >= r) continue;
      const auto ramp = static_cast<std::uint8_t>(std::lround(255.0 * d / r));
      a = std::min(a, ramp);
    }
  }
  return out;
}

// ---- atlas packing ------------------------------------------------------------

namespace {

struct Shelf {
  int y = 0;
  int height = 0;
  int used_w = 0;
};

struct OpenAtlas {
  std::vector<Shelf> shelves;
  int used_h = 0;
  std::vector<std::pair<const Clip *, PixelRect>> cells;
};

}  // namespace

std::vector<Atlas> pack_atlas(const std::vector<Clip> &clips, int max_side_px, int padding_px) {
  if (padding_px < 0) throw std::invalid_argument("padding must be >= 0");
  std::vector<const Clip *> order;
  for (const Clip &c : clips) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const Clip *a, const Clip *b) {
    return std::forward_as_tuple(b->height(), a->slice_id) <
           std::forward_as_tuple(a->height(), b->slice_id);
  });

  std::vector<OpenAtlas> open;
  for (const Clip *c : order) {
    const int cw = c->width() + 2 * padding_px;
    const int ch = c->height() + 2 * padding_px;
    if (cw > max_side_px || ch > max_side_px) {
      throw CompileError(make_error(
          "CLIP_TOO_LARGE", "clip \"" + c->slice_id + "\" (" + std::to_string(c->width()) + "x" +
                                std::to_string(c->height()) + " px plus " +
                                std::to_string(padding_px) + " px padding) exceeds atlas side " +
                                std::to_string(max_side_px)));
    }
    bool placed = false;
    for (OpenAtlas &a : open) {
      for (Shelf &s : a.shelves) {
        if (ch <= s.height && s.used_w + cw <= max_side_px) {
          a.cells.push_back({c, {s.used_w, s.y, cw, ch}});
          s.used_w += cw;
          placed = true;
          break;
        }
      }
      if (!placed && a.used_h + ch <= max_side_px) {
        a.shelves.push_back({a.used_h, ch, cw});
        a.cells.push_back({c, {0, a.used_h, cw, ch}});
        a.used_h += ch;
        placed = true;
      }
      if (placed) break;
    }
    if (!placed) {
      OpenAtlas a;
      a.shelves.push_back({0, ch, cw});
      a.cells.push_back({c, {0, 0, cw, ch}});
      a.used_h = ch;
      open.push_back(std::move(a));
    }
  }

  std::vector<Atlas> out;
  for (const OpenAtlas &a : open) {
    int w = 0;
    for (const Shelf &s : a.shelves) w = std::max(w, s.used_w);
    Atlas atlas;
    atlas.padding_px = padding_px;
    atlas.pixels = Image(w, a.used_h);
    for (const auto &[clip, cell] : a.cells) {
      const PixelRect inner{cell.x + padding_px, cell.y + padding_px, clip->width(),
                            clip->height()};
      atlas.pixels.blit(clip->pixels, inner.x, inner.y);
      const UvRect uv{static_cast<double>(inner.x) / w, static_cast<double>(inner.y) / a.used_h,
                      static_cast<double>(inner.x + inner.w) / w,
                      static_cast<double>(inner.y + inner.h) / a.used_h};
      atlas.entries[clip->slice_id] = AtlasEntry{inner, cell, uv};
    }
    out.push_back(std::move(atlas));
  }
  return out;
}

Image downsample(const Image &src, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  if (factor == 1) return src;
  const int ow = (src.width() + factor - 1) / factor;
  const int oh = (src.height() + factor - 1) / factor;
  Image out(ow, oh);
  std::vector<std::uint32_t> sums(static_cast<std::size_t>(ow) * 4);
  for (int oy = 0; oy < oh; ++oy) {
    std::fill(sums.begin(), sums.end(), 0u);
    const int y_end = std::min(src.height(), (oy + 1) * factor);
    for (int y = oy * factor; y < y_end; ++y) {
      const std::uint8_t *row = src.row(y);
      for (int x = 0; x < src.width(); ++x) {
        std::uint32_t *s = &sums[static_cast<std::size_t>(x / factor) * 4];
        for (int ch = 0; ch < 4; ++ch) s[ch] += row[x * 4 + ch];
      }
    }
    const int rows = y_end - oy * factor;
    std::uint8_t *dst = out.row(oy);
    for (int ox = 0; ox < ow; ++ox) {
      const int cols = std::min(src.width(), (ox + 1) * factor) - ox * factor;
      const std::uint32_t count = static_cast<std::uint32_t>(rows * cols);
      for (int ch = 0; ch < 4; ++ch) {
        dst[ox * 4 + ch] =
            static_cast<std::uint8_t>((sums[static_cast<std::size_t>(ox) * 4 + ch] + count / 2) /
                                      count);
      }
    }
  }
  return out;
}

}  // namespace mural2scene
