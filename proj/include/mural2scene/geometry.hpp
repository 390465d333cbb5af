#pragma once

// Geometry for the four transfer kinds: camera-facing quads, crossed quads,
// textured architecture, and the calibrated-view projection check.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mural2scene/slicer.hpp"
#include "mural2scene/specs.hpp"

namespace mural2scene {

inline constexpr double kDegenerateViewEpsilon = 1e-9;
inline constexpr double kProjectionMatchThreshold = 0.85;
/// Roof top rectangle inset, as a fraction of the smaller eave side.
inline constexpr double kMaxRoofInsetFrac = 0.45;

struct Vertex {
  Vec3 position;
  Vec2 uv;  // (0, 0) is the clip's top-left pixel corner

  friend bool operator==(const Vertex &, const Vertex &) = default;
};

using Triangle = std::array<std::uint32_t, 3>;

/// One draw: a vertex/index list textured by a single slice.
struct Primitive {
  std::vector<Vertex> vertices;
  std::vector<Triangle> triangles;
  std::string texture_slice_id;
  bool double_sided = true;
  bool alpha_blend = true;

  friend bool operator==(const Primitive &, const Primitive &) = default;
};

struct Mesh {
  std::vector<Primitive> primitives;
  /// Set for face-to-eye meshes: the runtime rotates the node toward the
  /// camera under this lock.
  std::optional<AxisLock> billboard;
  std::vector<DynamicEffect> animation;

  std::size_t vertex_count() const;
  std::size_t triangle_count() const;
  std::vector<Vec3> positions() const;

  friend bool operator==(const Mesh &, const Mesh &) = default;
};

/// Node transform used for every generated mesh: translate by
/// placement.position after rotating by placement.yaw about +Y. Scale is
/// already baked into the vertices.
Vec3 place_point(const Placement &p, Vec3 local);
Mesh to_world(const Mesh &mesh, const Placement &p);

/// Quad in the local XY plane facing +Z, bottom edge centered on the origin.
Mesh make_billboard_quad(const Clip &clip, const Placement &placement, AxisLock axis_lock);

/// Yaw that turns the quad's +Z normal toward the camera's horizontal
/// projection. Throws CompileError(DEGENERATE_VIEW) when the camera is
/// within kDegenerateViewEpsilon of the sprite's vertical axis.
double billboard_yaw(Vec3 sprite_pos, Vec3 camera_pos);

struct BillboardOrientation {
  double yaw = 0.0;
  double pitch = 0.0;  // spherical lock only; positive tilts the normal up
};

/// Cylindrical: billboard_yaw, pitch 0. Spherical: also pitches toward the
/// camera; only a coincident camera is degenerate.
BillboardOrientation billboard_orientation(Vec3 sprite_pos, Vec3 camera_pos, AxisLock lock);

/// Normal of a billboard quad after orientation (local +Z rotated by pitch,
/// then yaw).
Vec3 oriented_normal(const BillboardOrientation &o);

/// Two identical double-sided quads, in the XY and ZY planes, sharing the
/// vertical axis through the origin.
Mesh make_cross(const Clip &clip, const Placement &placement);

/// Walls are prisms over the footprint, one per storey, each face carrying
/// the storey's wall texture. Each roof is a truncated pyramid from the
/// overhanging eave rectangle up by rise_m, closed by a soffit under the
/// overhang and a flat top. Storey k+1 starts where roof k ends.
/// Throws CompileError(UNRESOLVED_SOURCE) when a named slice is missing
/// from `clips`.
Mesh make_architecture(const ArchitectureSpec &spec,
                       const std::map<std::string, const Clip *> &clips);

/// Axis-aligned bounds of a point set.
struct Aabb {
  Vec3 min;
  Vec3 max;
};
Aabb bounds(const std::vector<Vec3> &points);

/// Calibrated view as a pinhole camera with +Y up. Normalized image
/// coordinates put the vertical field of view across [-1, 1].
struct PinholeView {
  Vec3 eye;
  Vec3 forward;
  Vec3 right;
  Vec3 up;
  double focal = 1.0;  // 1 / tan(fov / 2)
};

/// Throws CompileError(INVALID_CALIBRATION) for eye == look_at, a vertical
/// view direction, or fov outside (0, pi).
PinholeView make_view(const ViewCalibration &cal);

/// The slice's rectangle in normalized image coordinates, as
/// (xmin, ymin, xmax, ymax); its width follows the clip's aspect ratio.
std::array<double, 4> calibration_rect(const ViewCalibration &cal, double clip_aspect);

/// Convex hull of the world-space mesh as seen through `view`, with
/// geometry behind the eye clipped away. Counter-clockwise, may be empty.
std::vector<Vec2> projected_hull(const Mesh &world_mesh, const PinholeView &view);

/// IoU between the projected hull of `world_mesh` and the slice rectangle.
/// Throws CompileError(BEHIND_CAMERA) when no vertex is in front of the eye.
double projection_match_check(const Mesh &world_mesh, const ViewCalibration &cal,
                              const Clip &clip);

// Planar polygon helpers shared with the projection check.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);
/// Intersection of a convex polygon with an axis-aligned rectangle.
std::vector<Vec2> clip_to_rect(const std::vector<Vec2> &poly, const std::array<double, 4> &rect);

}  // namespace mural2scene
