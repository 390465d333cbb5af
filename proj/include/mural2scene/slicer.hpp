#pragma once

// Mask polygons over mural images -> alpha-matted clips -> texture atlases.

#include <map>
#include <string>
#include <vector>

#include "mural2scene/image.hpp"
#include "mural2scene/specs.hpp"

namespace mural2scene {

inline constexpr int kDefaultFeatherRadiusPx = 1;
inline constexpr int kDefaultAtlasSidePx = 4096;
inline constexpr int kDefaultAtlasPaddingPx = 2;

struct Clip {
  std::string slice_id;
  Image pixels;
  int origin_x = 0;  // top-left of the bounding box in the source image
  int origin_y = 0;
  /// Mask polygon relative to the clip's top-left corner.
  std::vector<Vec2> mask;
  Vec2 physical_size_m;

  int width() const { return pixels.width(); }
  int height() const { return pixels.height(); }

  friend bool operator==(const Clip &, const Clip &) = default;
};

/// Pixel (x, y) is inside `poly` iff its center (x + 0.5, y + 0.5) is, by
/// the even-odd crossing rule.
bool pixel_center_inside(const std::vector<Vec2> &poly, int x, int y);

/// Cuts the mask's bounding box out of `source`. RGB is copied verbatim;
/// alpha is 255 for pixels whose center lies inside the mask, else 0.
/// Throws CompileError(DEGENERATE_MASK) when no pixel center is covered.
Clip extract_clip(const Image &source, double dpi, const SliceSpec &spec);

/// Ramps alpha from 0 at the mask edge to 255 at `radius_px` inside it.
/// Radius 0 returns the clip unchanged.
Clip feather_alpha(const Clip &clip, int radius_px);

struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const PixelRect &, const PixelRect &) = default;
};

struct UvRect {
  double u0 = 0.0;
  double v0 = 0.0;
  double u1 = 0.0;
  double v1 = 0.0;

  friend bool operator==(const UvRect &, const UvRect &) = default;
};

struct AtlasEntry {
  PixelRect clip_px;  // where the clip's pixels are
  PixelRect cell_px;  // clip plus padding; cells never overlap
  UvRect uv;          // clip_px normalized; v grows downward

  friend bool operator==(const AtlasEntry &, const AtlasEntry &) = default;
};

struct Atlas {
  Image pixels;
  std::map<std::string, AtlasEntry> entries;
  int padding_px = 0;

  friend bool operator==(const Atlas &, const Atlas &) = default;
};

/// Greedy shelf packing of clips sorted by (height desc, slice_id).
/// Throws CompileError(CLIP_TOO_LARGE) when a padded clip exceeds max_side.
std::vector<Atlas> pack_atlas(const std::vector<Clip> &clips, int max_side_px, int padding_px);

/// Box-filter reduction by an integer factor. Output is ceil(w/f) x ceil(h/f);
/// edge blocks average the pixels they have. Halves round up.
Image downsample(const Image &src, int factor);

}  // namespace mural2scene
