#include "mural2scene/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace mural2scene {

std::size_t Mesh::vertex_count() const {
  return std::accumulate(primitives.begin(), primitives.end(), std::size_t{0},
                         [](std::size_t n, const Primitive &p) { return n + p.vertices.size(); });
}

std::size_t Mesh::triangle_count() const {
  return std::accumulate(primitives.begin(), primitives.end(), std::size_t{0},
                         [](std::size_t n, const Primitive &p) { return n + p.triangles.size(); });
}

std::vector<Vec3> Mesh::positions() const {
  std::vector<Vec3> out;
  for (const auto &p : primitives) {
    for (const auto &v : p.vertices) out.push_back(v.position);
  }
  return out;
}

Vec3 place_point(const Placement &p, Vec3 local) { return rotate_y(local, p.yaw) + p.position; }

Mesh to_world(const Mesh &mesh, const Placement &p) {
  Mesh out = mesh;
  for (auto &prim : out.primitives) {
    for (auto &v : prim.vertices) v.position = place_point(p, v.position);
  }
  return out;
}

namespace {

/// Appends a quad; corners are given counter-clockwise as seen from the side
/// it faces.
void add_quad(Primitive &prim, const std::array<Vec3, 4> &p, const std::array<Vec2, 4> &uv) {
  const auto base = static_cast<std::uint32_t>(prim.vertices.size());
  for (int k = 0; k < 4; ++k) prim.vertices.push_back({p[k], uv[k]});
  prim.triangles.push_back({base, base + 1, base + 2});
  prim.triangles.push_back({base, base + 2, base + 3});
}

Primitive sprite_quad(double w, double h, const std::string &id) {
  Primitive prim;
  prim.texture_slice_id = id;
  add_quad(prim, {Vec3{-w / 2, 0, 0}, Vec3{w / 2, 0, 0}, Vec3{w / 2, h, 0}, Vec3{-w / 2, h, 0}},
           {Vec2{0, 1}, Vec2{1, 1}, Vec2{1, 0}, Vec2{0, 0}});
  return prim;
}

}  // namespace

Mesh make_billboard_quad(const Clip &clip, const Placement &placement, AxisLock axis_lock) {
  const double w = clip.physical_size_m.x * placement.scale;
  const double h = clip.physical_size_m.y * placement.scale;
  Mesh m;
  m.primitives.push_back(sprite_quad(w, h, clip.slice_id));
  m.billboard = axis_lock;
  return m;
}

double billboard_yaw(Vec3 sprite_pos, Vec3 camera_pos) {
  const double dx = camera_pos.x - sprite_pos.x;
  const double dz = camera_pos.z - sprite_pos.z;
  if (std::hypot(dx, dz) <= kDegenerateViewEpsilon) {
    throw CompileError(make_error("DEGENERATE_VIEW",
                                  "camera is directly above or below the sprite; yaw undefined"));
  }
  return normalize_yaw(std::atan2(dx, dz));
}

BillboardOrientation billboard_orientation(Vec3 sprite_pos, Vec3 camera_pos, AxisLock lock) {
  if (lock == AxisLock::Cylindrical) return {billboard_yaw(sprite_pos, camera_pos), 0.0};
  const Vec3 d = camera_pos - sprite_pos;
  if (length(d) <= kDegenerateViewEpsilon) {
    throw CompileError(make_error("DEGENERATE_VIEW", "camera coincides with the sprite"));
  }
  const double h = std::hypot(d.x, d.z);
  const double yaw = h <= kDegenerateViewEpsilon ? 0.0 : normalize_yaw(std::atan2(d.x, d.z));
  return {yaw, std::atan2(d.y, h)};
}

Vec3 oriented_normal(const BillboardOrientation &o) {
  return rotate_y({0.0, std::sin(o.pitch), std::cos(o.pitch)}, o.yaw);
}

Mesh make_cross(const Clip &clip, const Placement &placement) {
  const double w = clip.physical_size_m.x * placement.scale;
  const double h = clip.physical_size_m.y * placement.scale;
  Mesh m;
  Primitive prim = sprite_quad(w, h, clip.slice_id);
  add_quad(prim, {Vec3{0, 0, w / 2}, Vec3{0, 0, -w / 2}, Vec3{0, h, -w / 2}, Vec3{0, h, w / 2}},
           {Vec2{0, 1}, Vec2{1, 1}, Vec2{1, 0}, Vec2{0, 0}});
  m.primitives.push_back(std::move(prim));
  return m;
}

// ---- architecture -------------------------------------------------------------

namespace {

/// One side of a rectangular ring: outward normal `n`, rightward direction
/// `r` as seen from outside, and the half extents along each.
struct Side {
  Vec3 n;
  Vec3 r;
  bool along_x;  // r runs along X, so the side spans the width
};

constexpr std::array<Side, 4> kSides{{
    {{0, 0, 1}, {1, 0, 0}, true},
    {{1, 0, 0}, {0, 0, -1}, false},
    {{0, 0, -1}, {-1, 0, 0}, true},
    {{-1, 0, 0}, {0, 0, 1}, false},
}};

Vec3 side_point(const Side &s, double half_w, double half_d, double t, double y) {
  const double dist = s.along_x ? half_d : half_w;
  const double half = s.along_x ? half_w : half_d;
  return s.n * dist + s.r * (t * half) + Vec3{0, y, 0};
}

Vec2 plan_uv(Vec3 p, double half_w, double half_d) {
  return {(p.x + half_w) / (2 * half_w), (p.z + half_d) / (2 * half_d)};
}

const Clip &need_clip(const std::map<std::string, const Clip *> &clips, const std::string &id,
                      const ArchitectureSpec &spec) {
  const auto it = clips.find(id);
  if (it == clips.end() || it->second == nullptr) {
    throw CompileError(make_error("UNRESOLVED_SOURCE",
                                  "architecture \"" + spec.arch_id + "\" needs slice \"" + id +
                                      "\", which was not extracted",
                                  {}, spec.loc));
  }
  return *it->second;
}

}  // namespace

Mesh make_architecture(const ArchitectureSpec &spec,
                       const std::map<std::string, const Clip *> &clips) {
  const double s = spec.placement.scale;
  const double hw = spec.footprint_width_m * s / 2;
  const double hd = spec.footprint_depth_m * s / 2;
  Mesh m;
  double base = 0.0;
  for (const Storey &st : spec.storeys) {
    need_clip(clips, st.wall_slice_id, spec);
    need_clip(clips, st.roof.roof_slice_id, spec);
    const double top = base + st.height_m * s;

    Primitive walls;
    walls.texture_slice_id = st.wall_slice_id;
    walls.double_sided = false;
    walls.alpha_blend = false;
    for (const Side &side : kSides) {
      add_quad(walls,
               {side_point(side, hw, hd, -1, base), side_point(side, hw, hd, 1, base),
                side_point(side, hw, hd, 1, top), side_point(side, hw, hd, -1, top)},
               {Vec2{0, 1}, Vec2{1, 1}, Vec2{1, 0}, Vec2{0, 0}});
    }
    m.primitives.push_back(std::move(walls));

    const double overhang = st.roof.overhang_m * s;
    const double rise = st.roof.rise_m * s;
    const double ew = hw + overhang;
    const double ed = hd + overhang;
    const double inset = std::min(rise, kMaxRoofInsetFrac * 2 * std::min(ew, ed));
    const double tw = ew - inset;
    const double td = ed - inset;
    const double ridge = top + rise;

    Primitive roof;
    roof.texture_slice_id = st.roof.roof_slice_id;
    roof.double_sided = false;
    roof.alpha_blend = false;
    if (rise > 0.0) {
      for (const Side &side : kSides) {
        const double he = side.along_x ? ew : ed;
        const double ht = side.along_x ? tw : td;
        add_quad(roof,
                 {side_point(side, ew, ed, -1, top), side_point(side, ew, ed, 1, top),
                  side_point(side, tw, td, 1, ridge), side_point(side, tw, td, -1, ridge)},
                 {Vec2{0, 1}, Vec2{1, 1}, Vec2{(he + ht) / (2 * he), 0},
                  Vec2{(he - ht) / (2 * he), 0}});
      }
    }
    if (overhang > 0.0) {
      // Soffit: the underside of the overhang, facing down.
      for (const Side &side : kSides) {
        const std::array<Vec3, 4> p{side_point(side, ew, ed, 1, top),
                                    side_point(side, ew, ed, -1, top),
                                    side_point(side, hw, hd, -1, top),
                                    side_point(side, hw, hd, 1, top)};
        add_quad(roof, p,
                 {plan_uv(p[0], ew, ed), plan_uv(p[1], ew, ed), plan_uv(p[2], ew, ed),
                  plan_uv(p[3], ew, ed)});
      }
    }
    const std::array<Vec3, 4> cap{Vec3{-tw, ridge, td}, Vec3{tw, ridge, td}, Vec3{tw, ridge, -td},
                                  Vec3{-tw, ridge, -td}};
    add_quad(roof, cap,
             {plan_uv(cap[0], tw, td), plan_uv(cap[1], tw, td), plan_uv(cap[2], tw, td),
              plan_uv(cap[3], tw, td)});
    m.primitives.push_back(std::move(roof));
    base = ridge;
  }
  return m;
}

Aabb bounds(const std::vector<Vec3> &points) {
  Aabb b;
  if (points.empty()) return b;
  b.min = b.max = points.front();
  for (const Vec3 &p : points) {
    b.min = {std::min(b.min.x, p.x), std::min(b.min.y, p.y), std::min(b.min.z, p.z)};
    b.max = {std::max(b.max.x, p.x), std::max(b.max.y, p.y), std::max(b.max.z, p.z)};
  }
  return b;
}

// ---- projection check ---------------------------------------------------------

PinholeView make_view(const ViewCalibration &cal) {
  auto invalid = [](const std::string &msg) {
    return CompileError(make_error("INVALID_CALIBRATION", msg));
  };
  if (!(cal.vertical_fov > 0.0 && cal.vertical_fov < kPi)) {
    throw invalid("vertical_fov must lie in (0, pi)");
  }
  const Vec3 f = cal.look_at - cal.eye;
  if (length(f) <= 1e-12) throw invalid("eye and look_at coincide");
  PinholeView v;
  v.eye = cal.eye;
  v.forward = normalized(f);
  const Vec3 r = cross(v.forward, Vec3{0, 1, 0});
  if (length(r) <= 1e-9) throw invalid("view direction is vertical; the image has no up");
  v.right = normalized(r);
  v.up = cross(v.right, v.forward);
  v.focal = 1.0 / std::tan(cal.vertical_fov / 2);
  return v;
}

std::array<double, 4> calibration_rect(const ViewCalibration &cal, double clip_aspect) {
  const double h = cal.image_rect.height;
  const double w = h * clip_aspect;
  const Vec2 c = cal.image_rect.center;
  return {c.x - w / 2, c.y - h / 2, c.x + w / 2, c.y + h / 2};
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i > 0; --i) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<Vec2> clip_to_rect(const std::vector<Vec2> &poly, const std::array<double, 4> &rect) {
  std::vector<Vec2> out = poly;
  // Each half-plane as (axis, bound, keep_greater).
  const std::array<std::tuple<int, double, bool>, 4> planes{{{0, rect[0], true},
                                                             {1, rect[1], true},
                                                             {0, rect[2], false},
                                                             {1, rect[3], false}}};
  for (const auto &[axis, bound, greater] : planes) {
    if (out.empty()) break;
    auto coord = [axis = axis](Vec2 p) { return axis == 0 ? p.x : p.y; };
    auto inside = [&, bound = bound, greater = greater](Vec2 p) {
      return greater ? coord(p) >= bound : coord(p) <= bound;
    };
    std::vector<Vec2> next;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Vec2 a = out[i];
      const Vec2 b = out[(i + 1) % out.size()];
      const bool ia = inside(a);
      const bool ib = inside(b);
      if (ia) next.push_back(a);
      if (ia != ib) {
        const double t = (bound - coord(a)) / (coord(b) - coord(a));
        next.push_back(a + (b - a) * t);
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace {

double polygon_area_abs(const std::vector<Vec2> &p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
  return std::abs(a) / 2;
}

constexpr double kNearPlane = 1e-6;

}  // namespace

std::vector<Vec2> projected_hull(const Mesh &world_mesh, const PinholeView &view) {
  std::vector<Vec2> pts;
  auto camera = [&](Vec3 p) {
    const Vec3 q = p - view.eye;
    return Vec3{dot(q, view.right), dot(q, view.up), dot(q, view.forward)};
  };
  auto project = [&](Vec3 c) { return Vec2{view.focal * c.x / c.z, view.focal * c.y / c.z}; };
  for (const auto &prim : world_mesh.primitives) {
    for (const auto &tri : prim.triangles) {
      std::array<Vec3, 3> c{};
      for (int k = 0; k < 3; ++k) c[k] = camera(prim.vertices.at(tri[k]).position);
      for (int k = 0; k < 3; ++k) {
        const Vec3 a = c[k];
        const Vec3 b = c[(k + 1) % 3];
        const bool ia = a.z >= kNearPlane;
        const bool ib = b.z >= kNearPlane;
        if (ia) pts.push_back(project(a));
        if (ia != ib) {
          const double t = (kNearPlane - a.z) / (b.z - a.z);
          pts.push_back(project(a + (b - a) * t));
        }
      }
    }
  }
  return convex_hull(std::move(pts));
}

double projection_match_check(const Mesh &world_mesh, const ViewCalibration &cal,
                              const Clip &clip) {
  const PinholeView view = make_view(cal);
  bool any_in_front = false;
  for (const Vec3 &p : world_mesh.positions()) {
    if (dot(p - view.eye, view.forward) > 0.0) any_in_front = true;
  }
  if (!any_in_front) {
    throw CompileError(
        make_error("BEHIND_CAMERA", "every vertex lies behind the calibrated eye"));
  }
  const auto hull = projected_hull(world_mesh, view);
  const auto rect =
      calibration_rect(cal, static_cast<double>(clip.width()) / std::max(1, clip.height()));
  const double rect_area = (rect[2] - rect[0]) * (rect[3] - rect[1]);
  const double hull_area = hull.size() >= 3 ? polygon_area_abs(hull) : 0.0;
  const double inter = hull.size() >= 3 ? polygon_area_abs(clip_to_rect(hull, rect)) : 0.0;
  const double uni = hull_area + rect_area - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace mural2scene
