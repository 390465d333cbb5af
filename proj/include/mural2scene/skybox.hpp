#pragma once

// Cube-map skies: a gradient over ground with a band of horizon clips tiled
// around the four side faces.

#include <array>
#include <cstdint>
#include <vector>

#include "mural2scene/image.hpp"
#include "mural2scene/slicer.hpp"
#include "mural2scene/specs.hpp"

namespace mural2scene {

/// Face order of the cube map and of the emitted files.
enum class CubeFace { PosX, NegX, PosY, NegY, PosZ, NegZ };

inline constexpr std::array<const char *, 6> kCubeFaceNames{"px", "nx", "py", "ny", "pz", "nz"};

/// Side faces in the order they wrap around the viewer; the right edge of
/// each touches the left edge of the next.
inline constexpr std::array<CubeFace, 4> kSideRing{CubeFace::PosX, CubeFace::NegZ,
                                                   CubeFace::NegX, CubeFace::PosZ};

struct Skybox {
  std::array<Image, 6> faces;

  const Image &face(CubeFace f) const { return faces[static_cast<int>(f)]; }

  friend bool operator==(const Skybox &, const Skybox &) = default;
};

/// Rows above this one are sky; it and the rows below are ground.
int horizon_row(int face_size_px);
/// Band height in pixels: band_height_frac of the face, kept below the
/// horizon row so the band never reaches the top face.
int band_height_px(const SkyboxSpec &spec);

/// Deterministic in (spec, clips). Clips are drawn from `horizon_clips`
/// (in spec.horizon_slices order) with seeded scale jitter and spacing.
/// Throws CompileError(MISSING_HORIZON) when the band is non-empty and no
/// clips are given, CompileError(INVALID_VALUE) for a bad face size.
Skybox make_skybox(const SkyboxSpec &spec, const std::vector<const Clip *> &horizon_clips);

/// Unit direction through texel (x, y) of `face`, OpenGL cube-map layout.
Vec3 cube_direction(CubeFace face, int x, int y, int face_size_px);

/// Resamples an equirectangular panorama (longitude across, -Z at the
/// center column, +Y at the top row) into cube faces.
Skybox skybox_from_panorama(const Image &equirect, int face_size_px);

/// Horizontal-cross layout for eyeballing: [-X][+Z][+X][-Z] with +Y above
/// and -Y below +Z.
Image contact_sheet(const Skybox &sky);

}  // namespace mural2scene
