// SceneManifest -> canonical document, plus the simulation-script format.

#include "manifest_internal.hpp"

namespace mural2scene {

using text::Value;

namespace {

Value str(const std::string &s) { return Value::string(s); }
Value real(double d) { return Value::number(d); }

Value vec3(Vec3 v) {
  Value a = Value::array();
  a.push(real(v.x));
  a.push(real(v.y));
  a.push(real(v.z));
  return a;
}

Value vec2(Vec2 v) {
  Value a = Value::array();
  a.push(real(v.x));
  a.push(real(v.y));
  return a;
}

Value rgb(Rgb c) {
  Value a = Value::array();
  a.push(Value::integer(c.r));
  a.push(Value::integer(c.g));
  a.push(Value::integer(c.b));
  return a;
}

Value strings(const std::vector<std::string> &items) {
  Value a = Value::array();
  for (const auto &s : items) a.push(str(s));
  return a;
}

Value placement(const Placement &p) {
  Value o = Value::object();
  o.set("position", vec3(p.position));
  o.set("yaw", real(p.yaw));
  o.set("scale", real(p.scale));
  return o;
}

Value effect_value(const DynamicEffect &e) {
  Value o = Value::object();
  std::visit(
      [&](const auto &fx) {
        using T = std::decay_t<decltype(fx)>;
        if constexpr (std::is_same_v<T, effect::Flip>) {
          o.set("kind", str("Flip"));
        } else if constexpr (std::is_same_v<T, effect::Bob>) {
          o.set("kind", str("Bob"));
          o.set("amplitude_m", real(fx.amplitude_m));
        } else {
          o.set("kind", str("Pulse"));
          o.set("min_scale", real(fx.min_scale));
          o.set("max_scale", real(fx.max_scale));
        }
        o.set("period_s", real(fx.period_s));
      },
      e);
  return o;
}

Value transfer_value(const TransferKind &t) {
  Value o = Value::object();
  o.set("kind", str(transfer_name(t)));
  if (const auto *f = std::get_if<transfer::FaceToEye>(&t)) {
    o.set("axis_lock", str(to_string(f->axis_lock)));
  } else if (const auto *a = std::get_if<transfer::ArchitectureRef>(&t)) {
    o.set("arch_id", str(a->arch_id));
  }
  return o;
}

Value slice_value(const SliceSpec &s) {
  Value o = Value::object();
  o.set("slice_id", str(s.slice_id));
  o.set("source_id", str(s.source_id));
  if (!s.tags.empty()) o.set("tags", strings(s.tags));
  Value mask = Value::array();
  for (const auto &p : s.mask) mask.push(vec2(p));
  o.set("mask", std::move(mask));
  o.set("transfer", transfer_value(s.transfer));
  o.set("placement", placement(s.placement));
  if (!s.effects.empty()) {
    Value fx = Value::array();
    for (const auto &e : s.effects) fx.push(effect_value(e));
    o.set("effects", std::move(fx));
  }
  return o;
}

Value architecture_value(const ArchitectureSpec &a) {
  Value o = Value::object();
  o.set("arch_id", str(a.arch_id));
  Value fp = Value::object();
  fp.set("width_m", real(a.footprint_width_m));
  fp.set("depth_m", real(a.footprint_depth_m));
  o.set("footprint", std::move(fp));
  Value storeys = Value::array();
  for (const auto &st : a.storeys) {
    Value so = Value::object();
    so.set("height_m", real(st.height_m));
    so.set("wall_slice_id", str(st.wall_slice_id));
    Value roof = Value::object();
    roof.set("overhang_m", real(st.roof.overhang_m));
    roof.set("rise_m", real(st.roof.rise_m));
    roof.set("roof_slice_id", str(st.roof.roof_slice_id));
    so.set("roof", std::move(roof));
    storeys.push(std::move(so));
  }
  o.set("storeys", std::move(storeys));
  o.set("placement", placement(a.placement));
  if (a.calibration) {
    const auto &c = *a.calibration;
    Value co = Value::object();
    co.set("slice_id", str(c.slice_id));
    co.set("eye", vec3(c.eye));
    co.set("look_at", vec3(c.look_at));
    co.set("vertical_fov", real(c.vertical_fov));
    Value rect = Value::object();
    rect.set("center", vec2(c.image_rect.center));
    rect.set("height", real(c.image_rect.height));
    co.set("image_rect", std::move(rect));
    o.set("calibration", std::move(co));
  }
  return o;
}

Value skybox_value(const SkyboxSpec &s) {
  Value o = Value::object();
  o.set("face_size_px", Value::integer(s.face_size_px));
  o.set("horizon_slices", strings(s.horizon_slices));
  o.set("band_height_frac", real(s.band_height_frac));
  o.set("sky_top", rgb(s.sky_top));
  o.set("sky_horizon", rgb(s.sky_horizon));
  o.set("ground", rgb(s.ground));
  o.set("rhythm_seed", Value::integer(static_cast<std::int64_t>(s.rhythm_seed)));
  o.set("scale_jitter", vec2({s.scale_jitter.min, s.scale_jitter.max}));
  return o;
}

Value node_value(const narrative::NarrativeNode &n) {
  using namespace narrative;
  Value o = Value::object();
  o.set("node_id", str(n.node_id));
  o.set("kind", str(node_kind_name(n.kind)));
  std::visit(
      [&](const auto &k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, node::Dialogue>) {
          o.set("speaker_slice_id", str(k.speaker_slice_id));
          o.set("lines", strings(k.lines));
        } else if constexpr (std::is_same_v<T, node::Task>) {
          o.set("task", str("Clean"));
          o.set("spot_count", Value::integer(k.spot_count));
          o.set("target_ids", strings(k.target_ids));
          if (k.tool_id) o.set("tool_id", str(*k.tool_id));
        } else if constexpr (std::is_same_v<T, node::Media>) {
          o.set("duration_s", real(k.duration_s));
        } else {
          o.set("target_scene_id", str(k.target_scene_id));
          o.set("spawn", placement(k.spawn));
        }
      },
      n.kind);
  o.set("delivers", strings(n.delivers));
  return o;
}

}  // namespace

namespace detail {

Value encode_narrative(const narrative::NarrativeGraph &g) {
  using namespace narrative;
  Value o = Value::object();
  o.set("start_node", str(g.start_node));
  o.set("terminal_nodes", strings(g.terminal_nodes));
  Value nodes = Value::array();
  for (const auto &n : g.nodes) nodes.push(node_value(n));
  o.set("nodes", std::move(nodes));
  Value edges = Value::array();
  for (const auto &e : g.edges) {
    Value eo = Value::object();
    eo.set("from", str(e.from_node));
    eo.set("to", str(e.to_node));
    eo.set("trigger", manifest_detail::encode_event(as_event(e.trigger)));
    edges.push(std::move(eo));
  }
  o.set("edges", std::move(edges));
  Value items = Value::array();
  for (const auto &k : g.knowledge_items) {
    Value ko = Value::object();
    ko.set("item_id", str(k.item_id));
    ko.set("summary", str(k.summary));
    ko.set("source", str(k.source == ItemSource::DialogueLine ? "DialogueLine" : "MediaNode"));
    items.push(std::move(ko));
  }
  o.set("knowledge_items", std::move(items));
  Value guidance = Value::object();
  guidance.set("enabled_by", str("ControllerButton"));
  Value wps = Value::array();
  for (const auto &w : g.guidance.waypoints) {
    Value wo = Value::object();
    wo.set("node_id", str(w.node_id));
    Value path = Value::array();
    for (const auto &p : w.points) path.push(vec3(p));
    wo.set("path", std::move(path));
    wps.push(std::move(wo));
  }
  guidance.set("waypoints", std::move(wps));
  o.set("guidance", std::move(guidance));
  return o;
}

}  // namespace detail

namespace manifest_detail {

Value encode_event(const narrative::Event &e) {
  using namespace narrative::trigger;
  Value o = Value::object();
  o.set("kind", str(narrative::event_name(e)));
  std::visit(
      [&](const auto &t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, GazeDwell>) {
          o.set("target_id", str(t.target_id));
          o.set("dwell_s", real(t.dwell_s));
        } else if constexpr (std::is_same_v<T, RayClick> || std::is_same_v<T, Grab>) {
          o.set("target_id", str(t.target_id));
        } else if constexpr (std::is_same_v<T, Proximity>) {
          o.set("target_id", str(t.target_id));
          o.set("radius_m", real(t.radius_m));
        } else if constexpr (std::is_same_v<T, CleanComplete>) {
          o.set("task_node_id", str(t.task_node_id));
        } else if constexpr (std::is_same_v<T, MediaEnd>) {
          o.set("media_node_id", str(t.media_node_id));
        } else if constexpr (std::is_same_v<T, DialogueEnd> ||
                             std::is_same_v<T, ResetDialogue>) {
          o.set("dialogue_node_id", str(t.dialogue_node_id));
        }
      },
      e);
  return o;
}

}  // namespace manifest_detail

std::string serialize_manifest(const SceneManifest &m) {
  Value root = Value::object();
  root.set("schema_version", Value::integer(m.schema_version));
  root.set("scene_id", str(m.scene_id));
  root.set("scene_kind", str(to_string(m.scene_kind)));
  root.set("units", str("meters"));
  root.set("up_axis", str("+Y"));
  if (m.panorama_image) root.set("panorama_image", str(*m.panorama_image));

  Value sources = Value::array();
  for (const auto &s : m.sources) {
    Value o = Value::object();
    o.set("source_id", str(s.source_id));
    o.set("image_path", str(s.image_path));
    o.set("physical_width_m", real(s.physical_width_m));
    o.set("physical_height_m", real(s.physical_height_m));
    o.set("dpi", Value::integer(s.dpi));
    sources.push(std::move(o));
  }
  root.set("sources", std::move(sources));

  Value slices = Value::array();
  for (const auto &s : m.slices) slices.push(slice_value(s));
  root.set("slices", std::move(slices));

  Value archs = Value::array();
  for (const auto &a : m.architectures) archs.push(architecture_value(a));
  root.set("architectures", std::move(archs));

  if (m.skybox) root.set("skybox", skybox_value(*m.skybox));
  if (m.narrative) root.set("narrative", detail::encode_narrative(*m.narrative));
  return text::write(root);
}

ScriptParse parse_script(std::string_view doc, const std::string &doc_path) {
  ScriptParse out;
  auto parsed = text::parse(doc, doc_path);
  if (!parsed.value) {
    out.diagnostics = std::move(parsed.diagnostics);
    return out;
  }
  detail::DecodeContext ctx{doc_path, {}};
  detail::ObjectReader r(*parsed.value, ctx, "");
  std::vector<narrative::Event> events;
  bool ok = r.valid();
  if (auto ver = r.integer("schema_version", true); ver && *ver != 1) {
    ctx.error("UNSUPPORTED_SCHEMA", "script schema_version must be 1", r.loc_of("schema_version"));
  }
  if (const Value *list = r.array("events", true)) {
    for (std::size_t i = 0; i < list->items().size(); ++i) {
      auto e = detail::decode_event(list->items()[i], ctx, detail::index_path("events", i));
      if (e) {
        events.push_back(std::move(*e));
      } else {
        ok = false;
      }
    }
  } else {
    ok = false;
  }
  r.finish();
  if (!ok || has_errors(ctx.diags)) {
    out.diagnostics = std::move(ctx.diags);
    if (!has_errors(out.diagnostics)) {
      out.diagnostics.push_back(make_error("INVALID_DOCUMENT", "script could not be decoded",
                                           doc_path, parsed.value->loc()));
    }
    return out;
  }
  out.events = std::move(events);
  return out;
}

std::string serialize_script(const std::vector<narrative::Event> &events) {
  Value root = Value::object();
  root.set("schema_version", Value::integer(1));
  Value list = Value::array();
  for (const auto &e : events) list.push(manifest_detail::encode_event(e));
  root.set("events", std::move(list));
  return text::write(root);
}

}  // namespace mural2scene
