#pragma once

// parse -> validate -> slice -> transfer -> narrative -> lower, as library
// calls. The CLI is a thin layer over these.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "mural2scene/emitter.hpp"
#include "mural2scene/manifest.hpp"

namespace mural2scene {

struct CompileOptions {
  int downsample = 1;
  std::optional<std::uint64_t> seed;  // overrides the skybox rhythm_seed
  int threads = 0;                    // 0: thread_cap()
  int feather_radius_px = kDefaultFeatherRadiusPx;
  LowerOptions lower;
};

/// Parallelism for slice extraction: MURAL2SCENE_THREADS when set to a
/// positive integer, else the hardware concurrency.
int thread_cap();

struct LoadedManifest {
  SceneManifest manifest;
  std::filesystem::path path;
  Diagnostics warnings;
};

/// Reads and parses a manifest file. Throws IoError, or CompileError with
/// the parse diagnostics.
LoadedManifest load_manifest(const std::filesystem::path &path);

struct CompiledScene {
  SceneIR ir;
  std::map<std::string, Clip> clips;
  std::map<std::string, Mesh> meshes;
  /// Architecture id -> projection match score, for calibrated buildings.
  std::map<std::string, double> projection_scores;
};

/// Decodes the sources a set of slices needs (downsampled by opts), checks
/// their pixel size against the declared physical size and the masks
/// against the decoded bounds, then extracts and feathers the clips.
std::map<std::string, Clip> extract_clips(const SceneManifest &m,
                                          const std::filesystem::path &base_dir,
                                          const std::vector<std::string> &slice_ids,
                                          const CompileOptions &opts);

/// Sky for the scene: the skybox recipe when present, else the Panorama
/// capture. Empty when the scene has neither.
std::optional<Skybox> build_skybox(const SceneManifest &m, const std::filesystem::path &base_dir,
                                   const std::map<std::string, Clip> &clips,
                                   const CompileOptions &opts);

/// Full compile of a validated manifest. Warnings (projection mismatches)
/// land in ir.warnings. Throws CompileError or IoError.
CompiledScene compile_scene(const SceneManifest &m, const std::filesystem::path &base_dir,
                            const CompileOptions &opts);

}  // namespace mural2scene
