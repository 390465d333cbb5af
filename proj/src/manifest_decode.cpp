// Document -> SceneManifest. Every rejected value produces a diagnostic that
// points at the line/column where it was written.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "manifest_internal.hpp"

namespace mural2scene {

using text::Kind;
using text::Value;

namespace detail {

std::string join_path(const std::string &where, const std::string &key) {
  return where.empty() ? key : where + "." + key;
}

std::string index_path(const std::string &where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

ObjectReader::ObjectReader(const Value &v, DecodeContext &ctx, std::string where)
    : v_(v), ctx_(ctx), where_(std::move(where)) {
  if (v.kind() != Kind::Object) {
    ctx_.error("TYPE_MISMATCH",
               (where_.empty() ? std::string("document") : where_) +
                   " must be an object, found " + text::kind_name(v.kind()),
               v.loc());
    valid_ = false;
  }
}

const Value *ObjectReader::lookup(const std::string &key, bool required) {
  if (!valid_) return nullptr;
  seen_.insert(key);
  const Value *found = v_.find(key);
  if (found == nullptr && required) {
    ctx_.error("MISSING_FIELD",
               "missing required field \"" + join_path(where_, key) + "\"",
               v_.loc());
  }
  return found;
}

const Value *ObjectReader::typed(const std::string &key, Kind kind,
                                 bool required) {
  const Value *v = lookup(key, required);
  if (v == nullptr) return nullptr;
  if (v->kind() != kind) {
    ctx_.error("TYPE_MISMATCH",
               "\"" + join_path(where_, key) + "\" must be a " +
                   text::kind_name(kind) + ", found " +
                   text::kind_name(v->kind()),
               v->loc());
    return nullptr;
  }
  return v;
}

std::optional<std::string> ObjectReader::string(const std::string &key,
                                                bool required) {
  const Value *v = typed(key, Kind::String, required);
  if (v == nullptr) return std::nullopt;
  return v->as_string();
}

std::optional<double> ObjectReader::real(const std::string &key, bool required) {
  const Value *v = typed(key, Kind::Number, required);
  if (v == nullptr) return std::nullopt;
  return v->as_double();
}

std::optional<std::int64_t> ObjectReader::integer(const std::string &key,
                                                  bool required) {
  const Value *v = typed(key, Kind::Number, required);
  if (v == nullptr) return std::nullopt;
  if (!v->is_integer()) {
    ctx_.error("TYPE_MISMATCH",
               "\"" + join_path(where_, key) + "\" must be an integer",
               v->loc());
    return std::nullopt;
  }
  return v->as_int();
}

const Value *ObjectReader::array(const std::string &key, bool required) {
  return typed(key, Kind::Array, required);
}

const Value *ObjectReader::object(const std::string &key, bool required) {
  return typed(key, Kind::Object, required);
}

const Value *ObjectReader::any(const std::string &key, bool required) {
  return lookup(key, required);
}

SourceLoc ObjectReader::loc_of(const std::string &key) const {
  if (const Value *v = v_.find(key)) return v->loc();
  return v_.loc();
}

void ObjectReader::finish() {
  if (!valid_) return;
  const auto &members = v_.members();
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!seen_.count(members[i].first)) {
      ctx_.error("UNKNOWN_FIELD",
                 "unknown field \"" + join_path(where_, members[i].first) + "\"",
                 v_.key_locs()[i]);
    }
  }
}

void DecodeContext::error(const std::string &code, const std::string &message,
                          SourceLoc loc) {
  diags.push_back(make_error(code, message, doc_path, loc));
}

void DecodeContext::warning(const std::string &code, const std::string &message,
                            SourceLoc loc) {
  diags.push_back(make_warning(code, message, doc_path, loc));
}

// ---- leaf decoders ----------------------------------------------------------

std::optional<double> number_item(const Value &v, DecodeContext &ctx,
                                  const std::string &where) {
  if (v.kind() != Kind::Number) {
    ctx.error("TYPE_MISMATCH", where + " must be a number", v.loc());
    return std::nullopt;
  }
  return v.as_double();
}

std::optional<Vec3> decode_vec3(const Value *v, DecodeContext &ctx,
                                const std::string &where) {
  if (v == nullptr) return std::nullopt;
  if (v->kind() != Kind::Array || v->items().size() != 3) {
    ctx.error("TYPE_MISMATCH", where + " must be an array of 3 numbers",
              v->loc());
    return std::nullopt;
  }
  const auto x = number_item(v->items()[0], ctx, where + "[0]");
  const auto y = number_item(v->items()[1], ctx, where + "[1]");
  const auto z = number_item(v->items()[2], ctx, where + "[2]");
  if (!x || !y || !z) return std::nullopt;
  return Vec3{*x, *y, *z};
}

std::optional<Vec2> decode_vec2(const Value *v, DecodeContext &ctx,
                                const std::string &where) {
  if (v == nullptr) return std::nullopt;
  if (v->kind() != Kind::Array || v->items().size() != 2) {
    ctx.error("TYPE_MISMATCH", where + " must be an array of 2 numbers",
              v->loc());
    return std::nullopt;
  }
  const auto x = number_item(v->items()[0], ctx, where + "[0]");
  const auto y = number_item(v->items()[1], ctx, where + "[1]");
  if (!x || !y) return std::nullopt;
  return Vec2{*x, *y};
}

std::optional<Rgb> decode_rgb(const Value *v, DecodeContext &ctx,
                              const std::string &where) {
  if (v == nullptr) return std::nullopt;
  if (v->kind() != Kind::Array || v->items().size() != 3) {
    ctx.error("TYPE_MISMATCH", where + " must be [r, g, b] with 0..255 integers",
              v->loc());
    return std::nullopt;
  }
  std::uint8_t c[3] = {0, 0, 0};
  for (std::size_t i = 0; i < 3; ++i) {
    const Value &item = v->items()[i];
    if (!item.is_integer() || item.as_int() < 0 || item.as_int() > 255) {
      ctx.error("INVALID_VALUE", where + " channels must be integers in 0..255",
                item.loc());
      return std::nullopt;
    }
    c[i] = static_cast<std::uint8_t>(item.as_int());
  }
  return Rgb{c[0], c[1], c[2]};
}

std::vector<std::string> decode_string_list(const Value *v, DecodeContext &ctx,
                                            const std::string &where) {
  std::vector<std::string> out;
  if (v == nullptr) return out;
  for (std::size_t i = 0; i < v->items().size(); ++i) {
    const Value &item = v->items()[i];
    if (item.kind() != Kind::String) {
      ctx.error("TYPE_MISMATCH", index_path(where, i) + " must be a string",
                item.loc());
      continue;
    }
    out.push_back(item.as_string());
  }
  return out;
}

template <typename Enum>
std::optional<Enum> decode_enum(
    ObjectReader &r, DecodeContext &ctx, const std::string &key,
    const std::vector<std::pair<const char *, Enum>> &options, bool required,
    const std::string &where) {
  const auto s = r.string(key, required);
  if (!s) return std::nullopt;
  for (const auto &[name, value] : options) {
    if (*s == name) return value;
  }
  std::string allowed;
  for (const auto &[name, value] : options) {
    if (!allowed.empty()) allowed += ", ";
    allowed += name;
  }
  ctx.error("INVALID_VALUE",
            "\"" + join_path(where, key) + "\" must be one of: " + allowed +
                " (found \"" + *s + "\")",
            r.loc_of(key));
  return std::nullopt;
}

std::optional<Placement> decode_placement(const Value *v, DecodeContext &ctx,
                                          const std::string &where) {
  if (v == nullptr) return Placement{};
  ObjectReader r(*v, ctx, where);
  if (!r.valid()) return std::nullopt;
  Placement p;
  bool ok = true;
  if (const Value *pos = r.any("position", false)) {
    if (auto xyz = decode_vec3(pos, ctx, join_path(where, "position"))) {
      p.position = *xyz;
    } else {
      ok = false;
    }
  }
  if (auto yaw = r.real("yaw", false)) p.yaw = normalize_yaw(*yaw);
  if (auto scale = r.real("scale", false)) p.scale = *scale;
  r.finish();
  if (!ok) return std::nullopt;
  return p;
}

std::optional<DynamicEffect> decode_effect(const Value &v, DecodeContext &ctx,
                                           const std::string &where) {
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  const auto kind = r.string("kind", true);
  if (!kind) {
    r.finish();
    return std::nullopt;
  }
  std::optional<DynamicEffect> out;
  if (*kind == "Flip") {
    const auto period = r.real("period_s", true);
    if (period) out = effect::Flip{*period};
  } else if (*kind == "Bob") {
    const auto amp = r.real("amplitude_m", true);
    const auto period = r.real("period_s", true);
    if (amp && period) out = effect::Bob{*amp, *period};
  } else if (*kind == "Pulse") {
    const auto lo = r.real("min_scale", true);
    const auto hi = r.real("max_scale", true);
    const auto period = r.real("period_s", true);
    if (lo && hi && period) out = effect::Pulse{*lo, *hi, *period};
  } else {
    ctx.error("INVALID_VALUE",
              "\"" + join_path(where, "kind") +
                  "\" must be one of: Flip, Bob, Pulse (found \"" + *kind + "\")",
              r.loc_of("kind"));
  }
  r.finish();
  return out;
}

std::optional<TransferKind> decode_transfer(const Value *v, DecodeContext &ctx,
                                            const std::string &where,
                                            const std::vector<std::string> &tags) {
  if (v == nullptr) return std::nullopt;
  ObjectReader r(*v, ctx, where);
  if (!r.valid()) return std::nullopt;
  const auto kind = r.string("kind", true);
  std::optional<TransferKind> out;
  if (kind) {
    if (*kind == "FaceToEye") {
      // Cloud-tagged slices default to full camera facing; everything else
      // stays upright.
      AxisLock fallback = AxisLock::Cylindrical;
      for (const auto &t : tags) {
        if (t == "cloud") fallback = AxisLock::Spherical;
      }
      const bool present = v->find("axis_lock") != nullptr;
      const auto lock = decode_enum<AxisLock>(
          r, ctx, "axis_lock",
          {{"Cylindrical", AxisLock::Cylindrical}, {"Spherical", AxisLock::Spherical}},
          false, where);
      if (lock || !present) out = transfer::FaceToEye{lock.value_or(fallback)};
    } else if (*kind == "Cross") {
      out = transfer::Cross{};
    } else if (*kind == "ArchitectureRef") {
      if (auto id = r.string("arch_id", true)) out = transfer::ArchitectureRef{*id};
    } else if (*kind == "SkyboxBand") {
      out = transfer::SkyboxBand{};
    } else {
      ctx.error("INVALID_VALUE",
                "\"" + join_path(where, "kind") +
                    "\" must be one of: FaceToEye, Cross, ArchitectureRef, "
                    "SkyboxBand (found \"" + *kind + "\")",
                r.loc_of("kind"));
    }
  }
  r.finish();
  return out;
}

std::optional<MuralSource> decode_source(const Value &v, DecodeContext &ctx,
                                         const std::string &where) {
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  MuralSource s;
  s.loc = v.loc();
  const auto id = r.string("source_id", true);
  const auto path = r.string("image_path", true);
  const auto w = r.real("physical_width_m", true);
  const auto h = r.real("physical_height_m", true);
  const auto dpi = r.integer("dpi", true);
  r.finish();
  if (!id || !path || !w || !h || !dpi) return std::nullopt;
  if (*dpi <= 0 || *dpi > 100000) {
    ctx.error("INVALID_VALUE", join_path(where, "dpi") + " must be a positive integer",
              r.loc_of("dpi"));
    return std::nullopt;
  }
  s.source_id = *id;
  s.image_path = *path;
  s.physical_width_m = *w;
  s.physical_height_m = *h;
  s.dpi = static_cast<int>(*dpi);
  return s;
}

std::optional<SliceSpec> decode_slice(const Value &v, DecodeContext &ctx,
                                      const std::string &where) {
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  SliceSpec s;
  s.loc = v.loc();
  bool ok = true;
  const auto id = r.string("slice_id", true);
  const auto src = r.string("source_id", true);
  s.tags = decode_string_list(r.array("tags", false), ctx, join_path(where, "tags"));
  if (const Value *mask = r.array("mask", true)) {
    for (std::size_t i = 0; i < mask->items().size(); ++i) {
      auto p = decode_vec2(&mask->items()[i], ctx,
                           index_path(join_path(where, "mask"), i));
      if (p) {
        s.mask.push_back(*p);
      } else {
        ok = false;
      }
    }
  } else {
    ok = false;
  }
  const auto transfer =
      decode_transfer(r.object("transfer", true), ctx, join_path(where, "transfer"), s.tags);
  const auto placement =
      decode_placement(r.object("placement", false), ctx, join_path(where, "placement"));
  if (const Value *effects = r.array("effects", false)) {
    for (std::size_t i = 0; i < effects->items().size(); ++i) {
      auto e = decode_effect(effects->items()[i], ctx,
                             index_path(join_path(where, "effects"), i));
      if (e) {
        s.effects.push_back(*e);
      } else {
        ok = false;
      }
    }
  }
  r.finish();
  if (!ok || !id || !src || !transfer || !placement) return std::nullopt;
  s.slice_id = *id;
  s.source_id = *src;
  s.transfer = *transfer;
  s.placement = *placement;
  return s;
}

std::optional<ViewCalibration> decode_calibration(const Value &v,
                                                  DecodeContext &ctx,
                                                  const std::string &where) {
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  ViewCalibration c;
  const auto slice = r.string("slice_id", true);
  const auto eye = decode_vec3(r.any("eye", true), ctx, join_path(where, "eye"));
  const auto at = decode_vec3(r.any("look_at", true), ctx, join_path(where, "look_at"));
  const auto fov = r.real("vertical_fov", true);
  std::optional<ImagePlacement> rect;
  if (const Value *rv = r.object("image_rect", true)) {
    const std::string rw = join_path(where, "image_rect");
    ObjectReader rr(*rv, ctx, rw);
    const auto center = decode_vec2(rr.any("center", true), ctx, join_path(rw, "center"));
    const auto height = rr.real("height", true);
    rr.finish();
    if (center && height) rect = ImagePlacement{*center, *height};
  }
  r.finish();
  if (!slice || !eye || !at || !fov || !rect) return std::nullopt;
  c.slice_id = *slice;
  c.eye = *eye;
  c.look_at = *at;
  c.vertical_fov = *fov;
  c.image_rect = *rect;
  return c;
}

std::optional<ArchitectureSpec> decode_architecture(const Value &v,
                                                    DecodeContext &ctx,
                                                    const std::string &where) {
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  ArchitectureSpec a;
  a.loc = v.loc();
  bool ok = true;
  const auto id = r.string("arch_id", true);
  if (const Value *fp = r.object("footprint", true)) {
    const std::string fw = join_path(where, "footprint");
    ObjectReader fr(*fp, ctx, fw);
    const auto w = fr.real("width_m", true);
    const auto d = fr.real("depth_m", true);
    fr.finish();
    if (w && d) {
      a.footprint_width_m = *w;
      a.footprint_depth_m = *d;
    } else {
      ok = false;
    }
  } else {
    ok = false;
  }
  if (const Value *storeys = r.array("storeys", true)) {
    for (std::size_t i = 0; i < storeys->items().size(); ++i) {
      const std::string sw = index_path(join_path(where, "storeys"), i);
      ObjectReader sr(storeys->items()[i], ctx, sw);
      if (!sr.valid()) {
        ok = false;
        continue;
      }
      Storey st;
      const auto h = sr.real("height_m", true);
      const auto wall = sr.string("wall_slice_id", true);
      std::optional<RoofSpec> roof;
      if (const Value *rv = sr.object("roof", true)) {
        const std::string rw = join_path(sw, "roof");
        ObjectReader rr(*rv, ctx, rw);
        const auto overhang = rr.real("overhang_m", false);
        const auto rise = rr.real("rise_m", false);
        const auto roof_slice = rr.string("roof_slice_id", true);
        rr.finish();
        if (roof_slice) {
          roof = RoofSpec{overhang.value_or(0.0), rise.value_or(0.0), *roof_slice};
        }
      }
      sr.finish();
      if (!h || !wall || !roof) {
        ok = false;
        continue;
      }
      st.height_m = *h;
      st.wall_slice_id = *wall;
      st.roof = *roof;
      a.storeys.push_back(st);
    }
  } else {
    ok = false;
  }
  const auto placement =
      decode_placement(r.object("placement", false), ctx, join_path(where, "placement"));
  if (const Value *cal = r.object("calibration", false)) {
    auto c = decode_calibration(*cal, ctx, join_path(where, "calibration"));
    if (c) {
      a.calibration = *c;
    } else {
      ok = false;
    }
  }
  r.finish();
  if (!ok || !id || !placement) return std::nullopt;
  a.arch_id = *id;
  a.placement = *placement;
  return a;
}

std::optional<SkyboxSpec> decode_skybox(const Value &v, DecodeContext &ctx,
                                        const std::string &where) {
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  SkyboxSpec s;
  s.loc = v.loc();
  bool ok = true;
  const auto face = r.integer("face_size_px", true);
  if (face) {
    if (*face <= 0 || *face > (1 << 14)) {
      ctx.error("INVALID_VALUE", join_path(where, "face_size_px") + " is out of range",
                r.loc_of("face_size_px"));
      ok = false;
    } else {
      s.face_size_px = static_cast<int>(*face);
    }
  } else {
    ok = false;
  }
  s.horizon_slices = decode_string_list(r.array("horizon_slices", false), ctx,
                                        join_path(where, "horizon_slices"));
  if (auto f = r.real("band_height_frac", false)) s.band_height_frac = *f;
  auto color = [&](const char *key, Rgb &dst) {
    if (const Value *cv = r.any(key, false)) {
      if (auto c = decode_rgb(cv, ctx, join_path(where, key))) {
        dst = *c;
      } else {
        ok = false;
      }
    }
  };
  color("sky_top", s.sky_top);
  color("sky_horizon", s.sky_horizon);
  color("ground", s.ground);
  if (auto seed = r.integer("rhythm_seed", false)) {
    if (*seed < 0) {
      ctx.error("INVALID_VALUE", join_path(where, "rhythm_seed") + " must be >= 0",
                r.loc_of("rhythm_seed"));
      ok = false;
    } else {
      s.rhythm_seed = static_cast<std::uint64_t>(*seed);
    }
  }
  if (const Value *j = r.any("scale_jitter", false)) {
    if (auto mm = decode_vec2(j, ctx, join_path(where, "scale_jitter"))) {
      s.scale_jitter = ScaleJitter{mm->x, mm->y};
    } else {
      ok = false;
    }
  }
  r.finish();
  if (!ok) return std::nullopt;
  return s;
}

// ---- narrative --------------------------------------------------------------

std::optional<narrative::Event> decode_event(const Value &v, DecodeContext &ctx,
                                             const std::string &where) {
  using namespace narrative::trigger;
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  const auto kind = r.string("kind", true);
  std::optional<narrative::Event> out;
  if (kind) {
    if (*kind == "GazeDwell") {
      const auto target = r.string("target_id", true);
      const auto dwell = r.real("dwell_s", false);
      if (target) out = GazeDwell{*target, dwell.value_or(narrative::kDefaultGazeDwellS)};
    } else if (*kind == "RayClick") {
      if (auto t = r.string("target_id", true)) out = RayClick{*t};
    } else if (*kind == "Proximity") {
      const auto target = r.string("target_id", true);
      const auto radius = r.real("radius_m", true);
      if (target && radius) out = Proximity{*target, *radius};
    } else if (*kind == "Grab") {
      if (auto t = r.string("target_id", true)) out = Grab{*t};
    } else if (*kind == "CleanComplete") {
      if (auto t = r.string("task_node_id", true)) out = CleanComplete{*t};
    } else if (*kind == "MediaEnd") {
      if (auto t = r.string("media_node_id", true)) out = MediaEnd{*t};
    } else if (*kind == "DialogueEnd") {
      if (auto t = r.string("dialogue_node_id", true)) out = DialogueEnd{*t};
    } else if (*kind == "ResetDialogue") {
      if (auto t = r.string("dialogue_node_id", true)) out = ResetDialogue{*t};
    } else if (*kind == "GuidanceToggle") {
      out = GuidanceToggle{};
    } else {
      ctx.error("INVALID_VALUE",
                "\"" + join_path(where, "kind") + "\" is not a known trigger (found \"" +
                    *kind + "\")",
                r.loc_of("kind"));
    }
  }
  r.finish();
  return out;
}

std::optional<narrative::Trigger> decode_trigger(const Value &v, DecodeContext &ctx,
                                                 const std::string &where) {
  auto e = decode_event(v, ctx, where);
  if (!e) return std::nullopt;
  return std::visit(
      [&](const auto &alt) -> std::optional<narrative::Trigger> {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, narrative::trigger::ResetDialogue> ||
                      std::is_same_v<T, narrative::trigger::GuidanceToggle>) {
          ctx.error("INVALID_VALUE",
                    where + " uses a script-only event as an edge trigger", v.loc());
          return std::nullopt;
        } else {
          return narrative::Trigger{alt};
        }
      },
      *e);
}

std::optional<narrative::NarrativeNode> decode_node(const Value &v, DecodeContext &ctx,
                                                    const std::string &where) {
  using namespace narrative;
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  NarrativeNode n;
  n.loc = v.loc();
  const auto id = r.string("node_id", true);
  const auto kind = r.string("kind", true);
  n.delivers = decode_string_list(r.array("delivers", false), ctx, join_path(where, "delivers"));
  std::optional<NodeKind> k;
  if (kind) {
    if (*kind == "Dialogue") {
      const auto speaker = r.string("speaker_slice_id", true);
      const Value *lines = r.array("lines", true);
      if (speaker && lines) {
        k = node::Dialogue{*speaker,
                           decode_string_list(lines, ctx, join_path(where, "lines"))};
      }
    } else if (*kind == "Task") {
      const auto task = r.string("task", false);
      if (task && *task != "Clean") {
        ctx.error("INVALID_VALUE", join_path(where, "task") + " must be \"Clean\"",
                  r.loc_of("task"));
      }
      const auto spots = r.integer("spot_count", false);
      const Value *targets = r.array("target_ids", true);
      const auto tool = r.string("tool_id", false);
      if (targets && (!task || *task == "Clean")) {
        node::Task t;
        t.spot_count = spots ? static_cast<int>(std::clamp<std::int64_t>(
                                   *spots, std::numeric_limits<int>::min(),
                                   std::numeric_limits<int>::max()))
                             : kDefaultCleanSpots;
        t.target_ids = decode_string_list(targets, ctx, join_path(where, "target_ids"));
        t.tool_id = tool;
        k = t;
      }
    } else if (*kind == "Media") {
      if (auto d = r.real("duration_s", true)) k = node::Media{*d};
    } else if (*kind == "Teleport") {
      const auto scene = r.string("target_scene_id", true);
      const auto spawn =
          decode_placement(r.object("spawn", false), ctx, join_path(where, "spawn"));
      if (scene && spawn) k = node::Teleport{*scene, *spawn};
    } else {
      ctx.error("INVALID_VALUE",
                "\"" + join_path(where, "kind") +
                    "\" must be one of: Dialogue, Task, Media, Teleport (found \"" + *kind +
                    "\")",
                r.loc_of("kind"));
    }
  }
  r.finish();
  if (!id || !k) return std::nullopt;
  n.node_id = *id;
  n.kind = *k;
  return n;
}

std::optional<narrative::NarrativeGraph> decode_narrative(const Value &v,
                                                          DecodeContext &ctx,
                                                          const std::string &where) {
  using namespace narrative;
  ObjectReader r(v, ctx, where);
  if (!r.valid()) return std::nullopt;
  NarrativeGraph g;
  g.loc = v.loc();
  bool ok = true;
  const auto start = r.string("start_node", true);
  g.terminal_nodes =
      decode_string_list(r.array("terminal_nodes", true), ctx, join_path(where, "terminal_nodes"));
  if (const Value *nodes = r.array("nodes", true)) {
    for (std::size_t i = 0; i < nodes->items().size(); ++i) {
      auto n = decode_node(nodes->items()[i], ctx, index_path(join_path(where, "nodes"), i));
      if (n) {
        g.nodes.push_back(std::move(*n));
      } else {
        ok = false;
      }
    }
  } else {
    ok = false;
  }
  if (const Value *edges = r.array("edges", false)) {
    for (std::size_t i = 0; i < edges->items().size(); ++i) {
      const std::string ew = index_path(join_path(where, "edges"), i);
      ObjectReader er(edges->items()[i], ctx, ew);
      if (!er.valid()) {
        ok = false;
        continue;
      }
      const auto from = er.string("from", true);
      const auto to = er.string("to", true);
      const Value *tv = er.object("trigger", true);
      std::optional<Trigger> trig;
      if (tv) trig = decode_trigger(*tv, ctx, join_path(ew, "trigger"));
      er.finish();
      if (!from || !to || !trig) {
        ok = false;
        continue;
      }
      g.edges.push_back(Edge{*from, *to, *trig, edges->items()[i].loc()});
    }
  }
  if (const Value *items = r.array("knowledge_items", false)) {
    for (std::size_t i = 0; i < items->items().size(); ++i) {
      const std::string iw = index_path(join_path(where, "knowledge_items"), i);
      ObjectReader ir(items->items()[i], ctx, iw);
      if (!ir.valid()) {
        ok = false;
        continue;
      }
      const auto id = ir.string("item_id", true);
      const auto summary = ir.string("summary", false);
      const auto source = decode_enum<ItemSource>(
          ir, ctx, "source",
          {{"DialogueLine", ItemSource::DialogueLine}, {"MediaNode", ItemSource::MediaNode}},
          true, iw);
      ir.finish();
      if (!id || !source) {
        ok = false;
        continue;
      }
      g.knowledge_items.push_back(
          KnowledgeItem{*id, summary.value_or(""), *source, items->items()[i].loc()});
    }
  }
  if (const Value *gv = r.object("guidance", false)) {
    const std::string gw = join_path(where, "guidance");
    ObjectReader gr(*gv, ctx, gw);
    const auto by = decode_enum<GuidanceActivation>(
        gr, ctx, "enabled_by", {{"ControllerButton", GuidanceActivation::ControllerButton}},
        false, gw);
    if (by) g.guidance.enabled_by = *by;
    if (const Value *wps = gr.array("waypoints", false)) {
      for (std::size_t i = 0; i < wps->items().size(); ++i) {
        const std::string ww = index_path(join_path(gw, "waypoints"), i);
        ObjectReader wr(wps->items()[i], ctx, ww);
        if (!wr.valid()) {
          ok = false;
          continue;
        }
        const auto node = wr.string("node_id", true);
        WaypointPath path;
        if (const Value *pts = wr.array("path", true)) {
          for (std::size_t k = 0; k < pts->items().size(); ++k) {
            auto p = decode_vec3(&pts->items()[k], ctx, index_path(join_path(ww, "path"), k));
            if (p) {
              path.points.push_back(*p);
            } else {
              ok = false;
            }
          }
        }
        wr.finish();
        if (!node) {
          ok = false;
          continue;
        }
        path.node_id = *node;
        g.guidance.waypoints.push_back(std::move(path));
      }
    }
    gr.finish();
  }
  r.finish();
  if (!ok || !start) return std::nullopt;
  g.start_node = *start;
  return g;
}

}  // namespace detail

// ---- top level ----------------------------------------------------------------

ManifestParse parse_manifest(std::string_view text_doc, const std::string &doc_path) {
  using namespace detail;
  ManifestParse out;
  auto parsed = text::parse(text_doc, doc_path);
  if (!parsed.value) {
    out.diagnostics = std::move(parsed.diagnostics);
    return out;
  }
  DecodeContext ctx{doc_path, {}};
  const Value &root = *parsed.value;
  ObjectReader r(root, ctx, "");
  if (!r.valid()) {
    out.diagnostics = std::move(ctx.diags);
    return out;
  }

  SceneManifest m;
  bool ok = true;
  if (auto ver = r.integer("schema_version", true)) {
    if (*ver != kManifestSchemaVersion) {
      ctx.error("UNSUPPORTED_SCHEMA",
                "schema_version " + std::to_string(*ver) + " is not supported (expected " +
                    std::to_string(kManifestSchemaVersion) + ")",
                r.loc_of("schema_version"));
      ok = false;
    }
  } else {
    ok = false;
  }
  const auto scene_id = r.string("scene_id", true);
  const auto kind = decode_enum<SceneKind>(
      r, ctx, "scene_kind",
      {{"Panorama", SceneKind::Panorama}, {"Reconstructed", SceneKind::Reconstructed}}, true,
      "");
  if (auto units = r.string("units", false); units && *units != "meters") {
    ctx.error("INVALID_VALUE", "units must be \"meters\"", r.loc_of("units"));
  }
  if (auto up = r.string("up_axis", false); up && *up != "+Y") {
    ctx.error("INVALID_VALUE", "up_axis must be \"+Y\"", r.loc_of("up_axis"));
  }
  m.panorama_image = r.string("panorama_image", false);

  if (const Value *sources = r.array("sources", true)) {
    for (std::size_t i = 0; i < sources->items().size(); ++i) {
      auto s = decode_source(sources->items()[i], ctx, index_path("sources", i));
      if (s) {
        m.sources.push_back(std::move(*s));
      } else {
        ok = false;
      }
    }
  } else {
    ok = false;
  }
  if (const Value *slices = r.array("slices", false)) {
    for (std::size_t i = 0; i < slices->items().size(); ++i) {
      auto s = decode_slice(slices->items()[i], ctx, index_path("slices", i));
      if (s) {
        m.slices.push_back(std::move(*s));
      } else {
        ok = false;
      }
    }
  }
  if (const Value *archs = r.array("architectures", false)) {
    for (std::size_t i = 0; i < archs->items().size(); ++i) {
      auto a = decode_architecture(archs->items()[i], ctx, index_path("architectures", i));
      if (a) {
        m.architectures.push_back(std::move(*a));
      } else {
        ok = false;
      }
    }
  }
  if (const Value *sky = r.object("skybox", false)) {
    auto s = decode_skybox(*sky, ctx, "skybox");
    if (s) {
      m.skybox = std::move(*s);
    } else {
      ok = false;
    }
  }
  if (const Value *nar = r.object("narrative", false)) {
    auto g = decode_narrative(*nar, ctx, "narrative");
    if (g) {
      m.narrative = std::move(*g);
    } else {
      ok = false;
    }
  }
  r.finish();

  if (!ok || !scene_id || !kind || has_errors(ctx.diags)) {
    out.diagnostics = std::move(ctx.diags);
    if (!has_errors(out.diagnostics)) {
      out.diagnostics.push_back(
          make_error("INVALID_DOCUMENT", "manifest could not be decoded", doc_path, root.loc()));
    }
    return out;
  }
  m.scene_id = *scene_id;
  m.scene_kind = *kind;

  // Type-level invariants hold for every parsed manifest.
  Diagnostics inv = check_invariants(m, doc_path, false);
  for (auto &d : inv) ctx.diags.push_back(std::move(d));
  if (has_errors(ctx.diags)) {
    out.diagnostics = std::move(ctx.diags);
    return out;
  }
  out.diagnostics = std::move(ctx.diags);
  out.manifest = std::move(m);
  return out;
}

namespace manifest_detail {

std::optional<narrative::Event> decode_event(const text::Value &v, const std::string &doc_path,
                                             const std::string &where, Diagnostics &diags) {
  detail::DecodeContext ctx{doc_path, {}};
  auto e = detail::decode_event(v, ctx, where);
  for (auto &d : ctx.diags) diags.push_back(std::move(d));
  return e;
}

}  // namespace manifest_detail

}  // namespace mural2scene
