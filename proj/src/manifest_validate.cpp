#include <cmath>
#include <map>
#include <set>

#include "manifest_internal.hpp"

namespace mural2scene {

const char *to_string(SceneKind k) {
  return k == SceneKind::Panorama ? "Panorama" : "Reconstructed";
}

const char *to_string(AxisLock lock) {
  return lock == AxisLock::Cylindrical ? "Cylindrical" : "Spherical";
}

const char *transfer_name(const TransferKind &t) {
  switch (t.index()) {
    case 0: return "FaceToEye";
    case 1: return "Cross";
    case 2: return "ArchitectureRef";
    default: return "SkyboxBand";
  }
}

const MuralSource *SceneManifest::find_source(const std::string &id) const {
  for (const auto &s : sources) {
    if (s.source_id == id) return &s;
  }
  return nullptr;
}

const SliceSpec *SceneManifest::find_slice(const std::string &id) const {
  for (const auto &s : slices) {
    if (s.slice_id == id) return &s;
  }
  return nullptr;
}

const ArchitectureSpec *SceneManifest::find_architecture(const std::string &id) const {
  for (const auto &a : architectures) {
    if (a.arch_id == id) return &a;
  }
  return nullptr;
}

namespace detail {
namespace {

bool finite(Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }
bool positive(double v) { return std::isfinite(v) && v > 0.0; }

class Checker {
 public:
  explicit Checker(std::string doc_path) : doc_(std::move(doc_path)) {}

  void error(const std::string &code, const std::string &msg, SourceLoc loc) {
    diags.push_back(make_error(code, msg, doc_, loc));
  }
  void warning(const std::string &code, const std::string &msg, SourceLoc loc) {
    diags.push_back(make_warning(code, msg, doc_, loc));
  }

  void placement(const Placement &p, const std::string &what, SourceLoc loc) {
    if (!finite(p.position)) error("INVALID_VALUE", what + ".position must be finite", loc);
    if (!std::isfinite(p.yaw)) error("INVALID_VALUE", what + ".yaw must be finite", loc);
    if (!positive(p.scale)) error("INVALID_VALUE", what + ".scale must be > 0", loc);
  }

  Diagnostics diags;

 private:
  std::string doc_;
};

void check_effect(Checker &c, const DynamicEffect &e, const std::string &what, SourceLoc loc) {
  std::visit(
      [&](const auto &fx) {
        using T = std::decay_t<decltype(fx)>;
        if (!positive(fx.period_s)) {
          c.error("INVALID_EFFECT", what + " period_s must be > 0", loc);
        }
        if constexpr (std::is_same_v<T, effect::Bob>) {
          if (!std::isfinite(fx.amplitude_m)) {
            c.error("INVALID_EFFECT", what + " amplitude_m must be finite", loc);
          }
        }
        if constexpr (std::is_same_v<T, effect::Pulse>) {
          if (!positive(fx.min_scale) || !positive(fx.max_scale) ||
              fx.min_scale > fx.max_scale) {
            c.error("INVALID_EFFECT", what + " needs 0 < min_scale <= max_scale", loc);
          }
        }
      },
      e);
}

}  // namespace

Diagnostics check_invariants(const SceneManifest &m, const std::string &doc_path,
                             bool whole_scene) {
  Checker c(doc_path);
  const SourceLoc top{};

  if (m.schema_version != kManifestSchemaVersion) {
    c.error("UNSUPPORTED_SCHEMA", "schema_version must be 1", top);
  }
  if (m.scene_id.empty()) c.error("INVALID_VALUE", "scene_id must be nonempty", top);
  if (m.scene_kind == SceneKind::Panorama) {
    if (whole_scene && (!m.panorama_image || m.panorama_image->empty())) {
      c.error("MISSING_FIELD", "Panorama scenes must name a panorama_image", top);
    }
    if (m.skybox) {
      c.warning("SKYBOX_IGNORED", "Panorama scenes take their sky from panorama_image",
                m.skybox->loc);
    }
  } else if (m.panorama_image) {
    c.error("INVALID_VALUE", "panorama_image is only allowed for Panorama scenes", top);
  }

  std::set<std::string> source_ids;
  for (const auto &s : m.sources) {
    const std::string what = "source \"" + s.source_id + "\"";
    if (s.source_id.empty()) c.error("INVALID_VALUE", "source_id must be nonempty", s.loc);
    if (!source_ids.insert(s.source_id).second && whole_scene) {
      c.error("DUPLICATE_ID", "duplicate source_id \"" + s.source_id + "\"", s.loc);
    }
    if (s.image_path.empty()) c.error("INVALID_VALUE", what + " has an empty image_path", s.loc);
    if (!positive(s.physical_width_m) || !positive(s.physical_height_m)) {
      c.error("INVALID_VALUE", what + " physical dimensions must be > 0", s.loc);
    }
    if (s.dpi <= 0) c.error("INVALID_VALUE", what + " dpi must be > 0", s.loc);
  }

  // slice, architecture and narrative node ids share one namespace
  std::map<std::string, int> entity_ids;
  auto claim = [&](const std::string &id, const std::string &kind, SourceLoc loc) {
    if (id.empty()) {
      c.error("INVALID_VALUE", kind + " id must be nonempty", loc);
      return;
    }
    if (entity_ids[id]++ > 0 && whole_scene) {
      c.error("DUPLICATE_ID", "id \"" + id + "\" is declared more than once", loc);
    }
  };

  for (const auto &s : m.slices) {
    const std::string what = "slice \"" + s.slice_id + "\"";
    claim(s.slice_id, "slice", s.loc);
    if (!source_ids.count(s.source_id)) {
      c.error("UNRESOLVED_SOURCE",
              what + " references undeclared source \"" + s.source_id + "\"", s.loc);
    }
    if (s.mask.size() < 3) {
      c.error("INVALID_MASK", what + " mask needs at least 3 vertices", s.loc);
    } else if (!polygon_is_simple(s.mask)) {
      c.error("MASK_NOT_SIMPLE", what + " mask polygon intersects itself", s.loc);
    } else if (!(polygon_area(s.mask) > 0.0)) {
      c.error("INVALID_MASK", what + " mask has zero area", s.loc);
    }
    c.placement(s.placement, what + " placement", s.loc);
    for (std::size_t i = 0; i < s.effects.size(); ++i) {
      check_effect(c, s.effects[i], what + " effect " + std::to_string(i), s.loc);
    }
    if (std::holds_alternative<transfer::SkyboxBand>(s.transfer) && !s.effects.empty()) {
      c.error("INVALID_EFFECT", what + " is a skybox band and cannot carry motion effects",
              s.loc);
    }
  }

  for (const auto &a : m.architectures) {
    const std::string what = "architecture \"" + a.arch_id + "\"";
    claim(a.arch_id, "architecture", a.loc);
    if (!positive(a.footprint_width_m) || !positive(a.footprint_depth_m)) {
      c.error("INVALID_VALUE", what + " footprint must be > 0 in both directions", a.loc);
    }
    if (a.storeys.empty()) c.error("INVALID_VALUE", what + " needs at least one storey", a.loc);
    for (std::size_t i = 0; i < a.storeys.size(); ++i) {
      const auto &st = a.storeys[i];
      const std::string sw = what + " storey " + std::to_string(i);
      if (!positive(st.height_m)) c.error("INVALID_VALUE", sw + " height must be > 0", a.loc);
      if (!std::isfinite(st.roof.overhang_m) || st.roof.overhang_m < 0.0) {
        c.error("INVALID_VALUE", sw + " roof overhang must be >= 0", a.loc);
      }
      if (!std::isfinite(st.roof.rise_m) || st.roof.rise_m < 0.0) {
        c.error("INVALID_VALUE", sw + " roof rise must be >= 0", a.loc);
      }
    }
    c.placement(a.placement, what + " placement", a.loc);
    if (a.calibration) {
      const auto &cal = *a.calibration;
      if (!finite(cal.eye) || !finite(cal.look_at) || cal.eye == cal.look_at) {
        c.error("INVALID_CALIBRATION", what + " calibration needs distinct finite eye and look_at",
                a.loc);
      }
      if (!(cal.vertical_fov > 0.0 && cal.vertical_fov < kPi)) {
        c.error("INVALID_CALIBRATION", what + " vertical_fov must lie in (0, pi)", a.loc);
      }
      if (!positive(cal.image_rect.height) || !std::isfinite(cal.image_rect.center.x) ||
          !std::isfinite(cal.image_rect.center.y)) {
        c.error("INVALID_CALIBRATION", what + " image_rect needs a finite center and height > 0",
                a.loc);
      }
    }
  }

  if (m.skybox) {
    const auto &s = *m.skybox;
    const int f = s.face_size_px;
    if (f < 2 || (f & (f - 1)) != 0) {
      c.error("INVALID_VALUE", "skybox face_size_px must be a power of two >= 2", s.loc);
    }
    if (!(s.band_height_frac >= 0.0 && s.band_height_frac < 1.0)) {
      c.error("INVALID_VALUE", "skybox band_height_frac must lie in [0, 1)", s.loc);
    }
    if (!positive(s.scale_jitter.min) || !positive(s.scale_jitter.max) ||
        s.scale_jitter.min > s.scale_jitter.max) {
      c.error("INVALID_VALUE", "skybox scale_jitter needs 0 < min <= max", s.loc);
    }
  }

  if (m.narrative) {
    for (const auto &n : m.narrative->nodes) claim(n.node_id, "narrative node", n.loc);
    for (auto d : narrative::check_graph_structure(*m.narrative)) {
      if (d.path.empty()) d.path = doc_path;
      // node ids were already checked against the shared namespace
      if (d.code == "DUPLICATE_ID") continue;
      c.diags.push_back(std::move(d));
    }
  }
  return c.diags;
}

}  // namespace detail

Diagnostics validate_manifest(const SceneManifest &m, const std::string &doc_path) {
  Diagnostics diags = detail::check_invariants(m, doc_path, true);
  auto error = [&](const std::string &code, const std::string &msg, SourceLoc loc) {
    diags.push_back(make_error(code, msg, doc_path, loc));
  };
  auto warning = [&](const std::string &code, const std::string &msg, SourceLoc loc) {
    diags.push_back(make_warning(code, msg, doc_path, loc));
  };

  for (const auto &s : m.slices) {
    const MuralSource *src = m.find_source(s.source_id);
    if (src == nullptr) continue;
    const double w = src->declared_width_px();
    const double h = src->declared_height_px();
    for (const auto &p : s.mask) {
      if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= w && p.y <= h)) {
        error("MASK_OUT_OF_BOUNDS",
              "slice \"" + s.slice_id + "\" mask vertex (" + text::format_double(p.x) + ", " +
                  text::format_double(p.y) + ") lies outside source \"" + src->source_id + "\"",
              s.loc);
        break;
      }
    }
    if (const auto *ref = std::get_if<transfer::ArchitectureRef>(&s.transfer)) {
      if (m.find_architecture(ref->arch_id) == nullptr) {
        error("UNRESOLVED_ARCHITECTURE",
              "slice \"" + s.slice_id + "\" references undeclared architecture \"" +
                  ref->arch_id + "\"",
              s.loc);
      }
    }
  }

  auto texture_slice = [&](const std::string &slice_id, const ArchitectureSpec &a,
                           const char *role) {
    const SliceSpec *s = m.find_slice(slice_id);
    if (s == nullptr) {
      error("UNRESOLVED_SOURCE",
            "architecture \"" + a.arch_id + "\" " + role + " slice \"" + slice_id +
                "\" is not declared",
            a.loc);
      return;
    }
    const auto *ref = std::get_if<transfer::ArchitectureRef>(&s->transfer);
    if (ref == nullptr || ref->arch_id != a.arch_id) {
      warning("TRANSFER_MISMATCH",
              "slice \"" + slice_id + "\" textures architecture \"" + a.arch_id +
                  "\" but is not declared as ArchitectureRef to it",
              s->loc);
    }
  };
  for (const auto &a : m.architectures) {
    for (const auto &st : a.storeys) {
      texture_slice(st.wall_slice_id, a, "wall");
      texture_slice(st.roof.roof_slice_id, a, "roof");
    }
    if (a.calibration) texture_slice(a.calibration->slice_id, a, "calibration");
  }

  if (m.skybox && m.scene_kind == SceneKind::Reconstructed) {
    const auto &sky = *m.skybox;
    for (const auto &id : sky.horizon_slices) {
      const SliceSpec *s = m.find_slice(id);
      if (s == nullptr) {
        error("UNRESOLVED_SOURCE", "skybox horizon slice \"" + id + "\" is not declared",
              sky.loc);
      } else if (!std::holds_alternative<transfer::SkyboxBand>(s->transfer)) {
        warning("TRANSFER_MISMATCH",
                "horizon slice \"" + id + "\" is not declared as a SkyboxBand", s->loc);
      }
    }
    const long band_px = std::lround(sky.band_height_frac * sky.face_size_px);
    if (band_px > 0 && sky.horizon_slices.empty()) {
      error("MISSING_HORIZON", "skybox has a horizon band but no horizon_slices", sky.loc);
    }
  } else if (m.scene_kind == SceneKind::Reconstructed) {
    warning("NO_SKYBOX", "reconstructed scene has no skybox recipe", {});
  }

  if (m.narrative) {
    std::set<std::string> entities;
    for (const auto &s : m.slices) entities.insert(s.slice_id);
    for (const auto &a : m.architectures) entities.insert(a.arch_id);
    for (auto d : narrative::validate_graph(*m.narrative, &entities)) {
      // structure was covered by check_invariants
      if (d.path.empty()) d.path = doc_path;
      bool dup = false;
      for (const auto &e : diags) {
        if (e.code == d.code && e.message == d.message) dup = true;
      }
      if (!dup && d.code != "DUPLICATE_ID") diags.push_back(std::move(d));
    }
  }
  return diags;
}

}  // namespace mural2scene
