#pragma once

// Scene IR and its glTF 2.0 package: scene.gltf + scene.bin, atlas and
// skybox PNGs, the narrative runtime file and a plain-text report.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mural2scene/geometry.hpp"
#include "mural2scene/manifest.hpp"
#include "mural2scene/skybox.hpp"
#include "mural2scene/slicer.hpp"

namespace mural2scene {

using Json = nlohmann::ordered_json;

struct IrNode {
  std::string name;
  Vec3 translation;
  double yaw = 0.0;
  std::optional<std::size_t> mesh;  // index into SceneIR::meshes
  Json extras = Json::object();
};

/// Material key: which atlas, and the flags the mesh asked for.
struct IrMaterial {
  std::size_t atlas = 0;
  bool alpha_blend = true;
  bool double_sided = true;

  friend auto operator<=>(const IrMaterial &, const IrMaterial &) = default;
};

struct IrPrimitive {
  std::vector<Vertex> vertices;  // UVs already in atlas space
  std::vector<Triangle> triangles;
  std::size_t material = 0;
};

struct IrMesh {
  std::string name;
  std::vector<IrPrimitive> primitives;
};

struct SceneIR {
  std::string scene_id;
  std::string scene_kind;
  /// Entity nodes sorted by name; the root node is implicit.
  std::vector<IrNode> nodes;
  std::vector<IrMesh> meshes;
  std::vector<IrMaterial> materials;
  std::vector<Atlas> atlases;
  std::optional<Skybox> skybox;
  std::optional<std::string> narrative_file;
  /// Narrative summary for the report: nodes, edges, knowledge items.
  std::array<std::size_t, 3> narrative_counts{};
  Diagnostics warnings;

  std::size_t triangle_count() const;
  std::size_t vertex_count() const;
};

struct LowerOptions {
  int atlas_side_px = kDefaultAtlasSidePx;
  int atlas_padding_px = kDefaultAtlasPaddingPx;
};

/// One node per slice and architecture, sorted by id. Meshes are keyed by
/// entity id and given in entity-local coordinates; UVs are remapped into
/// the packed atlases. Throws CompileError(UNBOUND_TARGET) when the
/// narrative names an entity the scene does not have.
SceneIR lower_manifest(const SceneManifest &m, const std::map<std::string, Clip> &clips,
                       const std::map<std::string, Mesh> &meshes,
                       std::optional<Skybox> skybox, const LowerOptions &opts = {});

struct ScenePackage {
  std::filesystem::path dir;
  std::filesystem::path gltf;
  std::filesystem::path bin;
  std::vector<std::filesystem::path> textures;
  std::vector<std::filesystem::path> skybox_faces;
  std::optional<std::filesystem::path> narrative;
  std::filesystem::path report_path;
  std::string report;
};

/// Renders the whole package in memory, keyed by path relative to the
/// output directory. Equal IR gives equal bytes.
std::map<std::string, std::vector<std::uint8_t>> render_package(const SceneIR &ir);

/// Writes render_package(ir) under out_dir. Throws IoError.
ScenePackage emit_gltf(const SceneIR &ir, const std::filesystem::path &out_dir);

std::string format_report(const SceneIR &ir);

/// Re-reads an emitted .gltf and its buffers/images and checks required
/// fields, buffer and accessor bounds, index ranges, accessor min/max,
/// texture coordinates and image references.
Diagnostics validate_gltf_structure(const std::filesystem::path &gltf_path);

}  // namespace mural2scene
