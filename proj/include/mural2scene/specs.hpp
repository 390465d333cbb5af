#pragma once

// Declarative entity descriptions as they appear in a scene manifest.
// Everything here is a plain value; the pipeline stages consume them.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mural2scene/diagnostic.hpp"
#include "mural2scene/math.hpp"

namespace mural2scene {

/// Physical dimensions are meters, +Y is up, -Z is forward.
struct Placement {
  Vec3 position;
  double yaw = 0.0;  // radians, kept in [-pi, pi)
  double scale = 1.0;  // world meters per slice meter

  friend bool operator==(const Placement &, const Placement &) = default;
};

namespace effect {
struct Flip {
  double period_s = 1.0;
  friend bool operator==(const Flip &, const Flip &) = default;
};
struct Bob {
  double amplitude_m = 0.1;
  double period_s = 1.0;
  friend bool operator==(const Bob &, const Bob &) = default;
};
struct Pulse {
  double min_scale = 1.0;
  double max_scale = 1.0;
  double period_s = 1.0;
  friend bool operator==(const Pulse &, const Pulse &) = default;
};
}  // namespace effect

/// Animation metadata. The compiler passes these through; it never bakes
/// them into geometry.
using DynamicEffect = std::variant<effect::Flip, effect::Bob, effect::Pulse>;

enum class AxisLock { Cylindrical, Spherical };

const char *to_string(AxisLock lock);

namespace transfer {
struct FaceToEye {
  AxisLock axis_lock = AxisLock::Cylindrical;
  friend bool operator==(const FaceToEye &, const FaceToEye &) = default;
};
struct Cross {
  friend bool operator==(const Cross &, const Cross &) = default;
};
struct ArchitectureRef {
  std::string arch_id;
  friend bool operator==(const ArchitectureRef &, const ArchitectureRef &) = default;
};
struct SkyboxBand {
  friend bool operator==(const SkyboxBand &, const SkyboxBand &) = default;
};
}  // namespace transfer

using TransferKind = std::variant<transfer::FaceToEye, transfer::Cross,
                                  transfer::ArchitectureRef, transfer::SkyboxBand>;

const char *transfer_name(const TransferKind &t);

struct MuralSource {
  std::string source_id;
  std::string image_path;  // relative to the manifest's directory
  double physical_width_m = 0.0;
  double physical_height_m = 0.0;
  int dpi = 0;
  SourceLoc loc;

  /// Pixel size implied by the physical size and dpi.
  double declared_width_px() const {
    return physical_width_m / kMetersPerInch * dpi;
  }
  double declared_height_px() const {
    return physical_height_m / kMetersPerInch * dpi;
  }

  friend bool operator==(const MuralSource &, const MuralSource &) = default;
};

struct SliceSpec {
  std::string slice_id;
  std::string source_id;
  /// Closed polygon in source-image pixel coordinates (x right, y down).
  std::vector<Vec2> mask;
  TransferKind transfer;
  Placement placement;
  std::vector<DynamicEffect> effects;
  std::vector<std::string> tags;
  SourceLoc loc;

  friend bool operator==(const SliceSpec &, const SliceSpec &) = default;
};

struct RoofSpec {
  double overhang_m = 0.0;
  double rise_m = 0.0;
  std::string roof_slice_id;

  friend bool operator==(const RoofSpec &, const RoofSpec &) = default;
};

struct Storey {
  double height_m = 0.0;
  std::string wall_slice_id;
  RoofSpec roof;

  friend bool operator==(const Storey &, const Storey &) = default;
};

/// Where a slice lands in the normalized image plane of a calibrated view.
/// The plane spans [-1, 1] vertically across the field of view; x uses the
/// same scale. The rectangle's width follows the slice's own aspect ratio.
struct ImagePlacement {
  Vec2 center;
  double height = 0.0;

  friend bool operator==(const ImagePlacement &, const ImagePlacement &) = default;
};

struct ViewCalibration {
  Vec3 eye;
  Vec3 look_at;
  double vertical_fov = 0.0;  // radians
  ImagePlacement image_rect;
  /// Slice whose painted shape the view should reproduce.
  std::string slice_id;

  friend bool operator==(const ViewCalibration &, const ViewCalibration &) = default;
};

struct ArchitectureSpec {
  std::string arch_id;
  double footprint_width_m = 0.0;  // along local X
  double footprint_depth_m = 0.0;  // along local Z
  std::vector<Storey> storeys;
  Placement placement;
  std::optional<ViewCalibration> calibration;
  SourceLoc loc;

  friend bool operator==(const ArchitectureSpec &, const ArchitectureSpec &) = default;
};

struct ScaleJitter {
  double min = 1.0;
  double max = 1.0;

  friend bool operator==(const ScaleJitter &, const ScaleJitter &) = default;
};

inline constexpr double kDefaultBandHeightFrac = 0.35;

struct SkyboxSpec {
  int face_size_px = 512;
  std::vector<std::string> horizon_slices;
  double band_height_frac = kDefaultBandHeightFrac;
  // Placeholder palette: pale green overhead fading to orange at the horizon
  // over a brown ground. Not sampled from any mural.
  Rgb sky_top{176, 214, 178};
  Rgb sky_horizon{236, 170, 96};
  Rgb ground{122, 88, 58};
  std::uint64_t rhythm_seed = 42;
  ScaleJitter scale_jitter{0.8, 1.25};
  SourceLoc loc;

  friend bool operator==(const SkyboxSpec &, const SkyboxSpec &) = default;
};

}  // namespace mural2scene
