#pragma once

// Scene manifests: the declarative document that names mural sources, the
// slices cut from them, how each slice is transferred into 3D, and the
// narrative that plays out in the resulting scene.
//
// The concrete syntax is documented in docs/manifest-format.md.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mural2scene/diagnostic.hpp"
#include "mural2scene/narrative.hpp"
#include "mural2scene/specs.hpp"
#include "mural2scene/structured_text.hpp"

namespace mural2scene {

inline constexpr int kManifestSchemaVersion = 1;
/// Allowed mismatch between an image's pixel size and the size implied by
/// its declared physical dimensions and dpi.
inline constexpr double kSourceSizeTolerance = 0.05;

enum class SceneKind { Panorama, Reconstructed };

const char *to_string(SceneKind k);

struct SceneManifest {
  int schema_version = kManifestSchemaVersion;
  std::string scene_id;
  SceneKind scene_kind = SceneKind::Reconstructed;
  /// Equirectangular capture used as the sky of a Panorama scene.
  std::optional<std::string> panorama_image;
  std::vector<MuralSource> sources;
  std::vector<SliceSpec> slices;
  std::vector<ArchitectureSpec> architectures;
  std::optional<SkyboxSpec> skybox;
  std::optional<narrative::NarrativeGraph> narrative;

  const MuralSource *find_source(const std::string &id) const;
  const SliceSpec *find_slice(const std::string &id) const;
  const ArchitectureSpec *find_architecture(const std::string &id) const;

  friend bool operator==(const SceneManifest &, const SceneManifest &) = default;
};

struct ManifestParse {
  std::optional<SceneManifest> manifest;
  Diagnostics diagnostics;  // errors only when `manifest` is empty

  bool ok() const { return manifest.has_value(); }
};

/// Parses and structurally checks a manifest document. Returns either a
/// manifest or at least one located Error, never both. Warnings may
/// accompany a successful parse.
ManifestParse parse_manifest(std::string_view text,
                             const std::string &doc_path = "manifest");

/// Cross-entity checks: dangling ids, masks outside their source, skybox and
/// architecture references, narrative well-formedness. Empty means
/// compilable. Mask bounds use the pixel size implied by each source's
/// physical dimensions and dpi; the compiler re-checks against the decoded
/// image.
Diagnostics validate_manifest(const SceneManifest &m, const std::string &doc_path = {});

/// Canonical document for `m`. parse_manifest(serialize_manifest(m))
/// reproduces `m` field for field.
std::string serialize_manifest(const SceneManifest &m);

// Shared with the simulation-script reader.
namespace manifest_detail {
std::optional<narrative::Event> decode_event(const text::Value &v,
                                             const std::string &doc_path,
                                             const std::string &where,
                                             Diagnostics &diags);
text::Value encode_event(const narrative::Event &e);
}  // namespace manifest_detail

/// Simulation script document: {"schema_version": 1, "events": [...]}.
struct ScriptParse {
  std::optional<std::vector<narrative::Event>> events;
  Diagnostics diagnostics;
};

ScriptParse parse_script(std::string_view text, const std::string &doc_path = "script");
std::string serialize_script(const std::vector<narrative::Event> &events);

// Polygon helpers used by validation and the slicer.
double polygon_area(const std::vector<Vec2> &poly);
bool polygon_is_simple(const std::vector<Vec2> &poly);

}  // namespace mural2scene
