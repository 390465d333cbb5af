#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gen {

using namespace mural2scene;
namespace nv = mural2scene::narrative;

double uniform(Rng &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

namespace {

template <typename T>
const T &pick(Rng &rng, const std::vector<T> &v) {
  return v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(v.size()) - 1))];
}

bool chance(Rng &rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

}  // namespace

std::vector<Vec2> star_polygon(Rng &rng, double extent, int max_vertices) {
  const int n = uniform_int(rng, 3, std::max(3, max_vertices));
  // Jittered even spacing keeps every angular gap below pi, so the center
  // sees every edge and the polygon stays simple.
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back((i + uniform(rng, 0.0, 0.8)) * 2 * kPi / n);
  const double cx = extent / 2, cy = extent / 2;
  std::vector<Vec2> poly;
  for (double a : angles) {
    const double r = uniform(rng, 0.15, 0.5) * extent;
    poly.push_back({std::clamp(cx + r * std::cos(a), 0.0, extent),
                    std::clamp(cy + r * std::sin(a), 0.0, extent)});
  }
  return poly;
}

// ---- narrative graphs ---------------------------------------------------------

namespace {

std::string kind_key(const nv::Trigger &t) {
  const std::string name = nv::trigger_name(t);
  const auto ent = nv::entity_target(t);
  const auto node = nv::node_target(t);
  return name + ":" + ent.value_or("") + node.value_or("");
}

nv::NarrativeGraph try_graph(Rng &rng, int max_nodes, const std::vector<std::string> &entities) {
  nv::NarrativeGraph g;
  const int n = uniform_int(rng, 1, max_nodes);
  for (int i = 0; i < n; ++i) {
    nv::NarrativeNode node;
    node.node_id = "n" + std::to_string(i);
    switch (uniform_int(rng, 0, 3)) {
      case 0:
        node.kind = nv::node::Dialogue{pick(rng, entities), {"line"}};
        break;
      case 1: {
        nv::node::Task t;
        std::vector<std::string> pool = entities;
        std::shuffle(pool.begin(), pool.end(), rng);
        const int room = std::min(3, static_cast<int>(pool.size()));
        t.spot_count = uniform_int(rng, 1, std::min(2, room));
        const int targets = uniform_int(rng, t.spot_count, room);
        t.target_ids.assign(pool.begin(), pool.begin() + targets);
        if (targets < static_cast<int>(pool.size()) && chance(rng, 0.5)) {
          t.tool_id = pool[static_cast<std::size_t>(targets)];
        }
        node.kind = t;
        break;
      }
      case 2:
        node.kind = nv::node::Media{uniform(rng, 1.0, 60.0)};
        break;
      default:
        node.kind = nv::node::Teleport{"elsewhere", {}};
        break;
    }
    g.nodes.push_back(std::move(node));
  }
  g.start_node = "n0";
  const int terminals = uniform_int(rng, 1, std::min(2, n));
  for (int k = 0; k < terminals; ++k) {
    const std::string id = "n" + std::to_string(uniform_int(rng, n > 1 ? 1 : 0, n - 1));
    if (std::find(g.terminal_nodes.begin(), g.terminal_nodes.end(), id) ==
        g.terminal_nodes.end()) {
      g.terminal_nodes.push_back(id);
    }
  }
  for (const auto &node : g.nodes) {
    const bool is_terminal = g.is_terminal(node.node_id);
    const int out = is_terminal ? (chance(rng, 0.1) ? 1 : 0) : uniform_int(rng, 1, 3);
    std::set<std::string> used;
    for (int k = 0; k < out; ++k) {
      nv::Edge e;
      e.from_node = node.node_id;
      e.to_node = pick(rng, g.nodes).node_id;
      const std::string &target = pick(rng, entities);
      const int choice = uniform_int(rng, 0, 5);
      if (choice <= 1 && std::holds_alternative<nv::node::Dialogue>(node.kind)) {
        e.trigger = nv::trigger::DialogueEnd{node.node_id};
      } else if (choice <= 1 && std::holds_alternative<nv::node::Media>(node.kind)) {
        e.trigger = nv::trigger::MediaEnd{node.node_id};
      } else if (choice <= 1 && std::holds_alternative<nv::node::Task>(node.kind)) {
        e.trigger = nv::trigger::CleanComplete{node.node_id};
      } else if (choice == 2) {
        e.trigger = nv::trigger::GazeDwell{target, std::round(uniform(rng, 1.0, 3.0) * 2) / 2};
      } else if (choice == 3) {
        e.trigger = nv::trigger::Proximity{target, std::round(uniform(rng, 1.0, 3.0) * 2) / 2};
      } else if (choice == 4) {
        e.trigger = nv::trigger::Grab{target};
      } else {
        e.trigger = nv::trigger::RayClick{target};
      }
      if (!used.insert(kind_key(e.trigger)).second) continue;
      g.edges.push_back(std::move(e));
    }
  }
  return g;
}

}  // namespace

nv::NarrativeGraph graph(Rng &rng, int max_nodes, const std::vector<std::string> &entities) {
  for (;;) {
    nv::NarrativeGraph g = try_graph(rng, max_nodes, entities);
    if (!has_errors(nv::check_graph_structure(g))) return g;
  }
}

namespace {

nv::Event noise(Rng &rng, const nv::NarrativeGraph &g, const std::vector<std::string> &entities) {
  const std::string &ent = pick(rng, entities);
  const std::string &node = pick(rng, g.nodes).node_id;
  switch (uniform_int(rng, 0, 11)) {
    case 0: return nv::trigger::RayClick{ent};
    case 1: return nv::trigger::Grab{ent};
    case 2: return nv::trigger::GazeDwell{ent, std::round(uniform(rng, 0.5, 3.5) * 2) / 2};
    case 3: return nv::trigger::Proximity{ent, std::round(uniform(rng, 0.5, 3.5) * 2) / 2};
    case 4: return nv::trigger::DialogueEnd{node};
    case 5: return nv::trigger::MediaEnd{node};
    case 6: return nv::trigger::CleanComplete{node};
    case 7: return nv::trigger::ResetDialogue{node};
    case 8: return nv::trigger::GuidanceToggle{};
    case 9:
      if (chance(rng, 0.2)) return nv::trigger::DialogueEnd{"ghost"};
      [[fallthrough]];
    default:
      if (!g.edges.empty()) return nv::as_event(pick(rng, g.edges).trigger);
      return nv::trigger::GuidanceToggle{};
  }
}

std::vector<std::size_t> random_walk(Rng &rng, const nv::NarrativeGraph &g, int max_len) {
  std::vector<std::size_t> path;
  std::string at = g.start_node;
  const int len = uniform_int(rng, 0, max_len);
  for (int k = 0; k < len && !g.is_terminal(at); ++k) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      if (g.edges[i].from_node == at) out.push_back(i);
    }
    if (out.empty()) break;
    path.push_back(pick(rng, out));
    at = g.edges[path.back()].to_node;
  }
  return path;
}

}  // namespace

std::vector<nv::Event> script(Rng &rng, const nv::NarrativeGraph &g,
                              const std::vector<std::vector<std::size_t>> &completions,
                              const std::vector<std::string> &entities, int max_events) {
  std::vector<nv::Event> s;
  const int mode = uniform_int(rng, 0, 2);
  if (mode == 0 && !completions.empty()) {
    s = nv::script_for_path(g, pick(rng, completions));
  } else if (mode <= 1) {
    s = nv::script_for_path(g, random_walk(rng, g, 6));
  } else {
    const int len = uniform_int(rng, 0, max_events);
    for (int i = 0; i < len; ++i) s.push_back(noise(rng, g, entities));
  }
  // Perturb: drop, duplicate, swap or insert noise.
  const int edits = mode == 2 ? 0 : uniform_int(rng, 0, 2);
  for (int k = 0; k < edits; ++k) {
    const int op = uniform_int(rng, 0, 3);
    const std::size_t at =
        s.empty() ? 0 : static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(s.size()) - 1));
    if (op == 0 && !s.empty()) {
      s.erase(s.begin() + static_cast<long>(at));
    } else if (op == 1 && !s.empty()) {
      s.insert(s.begin() + static_cast<long>(at), s[at]);
    } else if (op == 2 && s.size() >= 2 && at + 1 < s.size()) {
      std::swap(s[at], s[at + 1]);
    } else {
      s.insert(s.begin() + static_cast<long>(at), noise(rng, g, entities));
    }
  }
  if (static_cast<int>(s.size()) > max_events) s.resize(static_cast<std::size_t>(max_events));
  return s;
}

// ---- manifests ----------------------------------------------------------------

namespace {

Placement placement(Rng &rng) {
  Placement p;
  p.position = {uniform(rng, -50, 50), uniform(rng, 0, 10), uniform(rng, -50, 50)};
  p.yaw = chance(rng, 0.05) ? -kPi : uniform(rng, -kPi, kPi);
  p.scale = uniform(rng, 0.25, 4.0);
  return p;
}

DynamicEffect effect(Rng &rng) {
  switch (uniform_int(rng, 0, 2)) {
    case 0: return effect::Flip{uniform(rng, 0.5, 5)};
    case 1: return effect::Bob{uniform(rng, 0.01, 1), uniform(rng, 0.5, 5)};
    default: {
      const double lo = uniform(rng, 0.5, 1.0);
      return effect::Pulse{lo, lo + uniform(rng, 0, 0.5), uniform(rng, 0.5, 5)};
    }
  }
}

Rgb color(Rng &rng) {
  return {static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
          static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
          static_cast<std::uint8_t>(uniform_int(rng, 0, 255))};
}

/// Linear dialogue chain ending in a teleport, fully guided.
nv::NarrativeGraph chain(Rng &rng, const std::vector<std::string> &speakers) {
  nv::NarrativeGraph g;
  const int dialogues = speakers.empty() ? 0 : uniform_int(rng, 0, 3);
  for (int i = 0; i < dialogues; ++i) {
    nv::NarrativeNode n;
    n.node_id = "talk" + std::to_string(i);
    std::vector<std::string> lines;
    for (int l = uniform_int(rng, 1, 3); l > 0; --l) lines.push_back("line " + std::to_string(l));
    n.kind = nv::node::Dialogue{pick(rng, speakers), lines};
    n.delivers = {"item" + std::to_string(i)};
    g.knowledge_items.push_back({"item" + std::to_string(i), chance(rng, 0.5) ? "fact" : "",
                                 nv::ItemSource::DialogueLine, {}});
    g.nodes.push_back(std::move(n));
  }
  nv::NarrativeNode end;
  end.node_id = "leave";
  end.kind = nv::node::Teleport{"next_scene", placement(rng)};
  g.nodes.push_back(end);
  for (int i = 0; i < dialogues; ++i) {
    nv::Edge e;
    e.from_node = g.nodes[static_cast<std::size_t>(i)].node_id;
    e.to_node = g.nodes[static_cast<std::size_t>(i) + 1].node_id;
    e.trigger = nv::trigger::DialogueEnd{e.from_node};
    g.edges.push_back(e);
    nv::WaypointPath w;
    w.node_id = e.from_node;
    for (int k = uniform_int(rng, 1, 3); k > 0; --k) {
      w.points.push_back({uniform(rng, -5, 5), 0.1, uniform(rng, -5, 5)});
    }
    g.guidance.waypoints.push_back(w);
  }
  g.start_node = g.nodes.front().node_id;
  g.terminal_nodes = {"leave"};
  return g;
}

}  // namespace

SceneManifest manifest(Rng &rng) {
  SceneManifest m;
  m.scene_id = "scene_" + std::to_string(uniform_int(rng, 0, 9999));
  if (chance(rng, 0.2)) {
    m.scene_kind = SceneKind::Panorama;
    m.panorama_image = "pano.jpg";
  }
  const int sources = uniform_int(rng, 1, 2);
  for (int i = 0; i < sources; ++i) {
    MuralSource s;
    s.source_id = "src" + std::to_string(i);
    s.image_path = "images/src" + std::to_string(i) + (chance(rng, 0.5) ? ".png" : ".jpg");
    s.physical_width_m = uniform(rng, 0.5, 5);
    s.physical_height_m = uniform(rng, 0.5, 3);
    s.dpi = uniform_int(rng, 30, 600);
    m.sources.push_back(s);
  }
  const int archs = m.scene_kind == SceneKind::Panorama ? 0 : uniform_int(rng, 0, 2);
  const int slices = uniform_int(rng, archs > 0 ? 2 : 0, 6);
  std::vector<std::string> speakers, band;
  for (int i = 0; i < slices; ++i) {
    SliceSpec s;
    s.slice_id = "slice" + std::to_string(i);
    const MuralSource &src = pick(rng, m.sources);
    s.source_id = src.source_id;
    const double extent = std::min(src.declared_width_px(), src.declared_height_px());
    s.mask = star_polygon(rng, extent, 10);
    if (archs > 0 && i < 2) {
      s.transfer = transfer::ArchitectureRef{"arch" + std::to_string(uniform_int(rng, 0, archs - 1))};
    } else {
      switch (uniform_int(rng, 0, 2)) {
        case 0:
          s.transfer = transfer::FaceToEye{chance(rng, 0.5) ? AxisLock::Cylindrical
                                                              : AxisLock::Spherical};
          speakers.push_back(s.slice_id);
          break;
        case 1:
          s.transfer = transfer::Cross{};
          break;
        default:
          s.transfer = transfer::SkyboxBand{};
          band.push_back(s.slice_id);
          break;
      }
    }
    if (!std::holds_alternative<transfer::SkyboxBand>(s.transfer)) {
      s.placement = placement(rng);
      for (int k = uniform_int(rng, 0, 2); k > 0; --k) s.effects.push_back(effect(rng));
    }
    const std::vector<std::string> tags{"figure", "cloud", "prop", "dust"};
    for (int k = uniform_int(rng, 0, 2); k > 0; --k) s.tags.push_back(pick(rng, tags));
    m.slices.push_back(std::move(s));
  }
  for (int i = 0; i < archs; ++i) {
    ArchitectureSpec a;
    a.arch_id = "arch" + std::to_string(i);
    a.footprint_width_m = uniform(rng, 2, 40);
    a.footprint_depth_m = uniform(rng, 2, 40);
    for (int k = uniform_int(rng, 1, 3); k > 0; --k) {
      a.storeys.push_back({uniform(rng, 2, 10), "slice0",
                           RoofSpec{uniform(rng, 0, 4), chance(rng, 0.2) ? 0.0 : uniform(rng, 0, 8),
                                    "slice1"}});
    }
    a.placement = placement(rng);
    if (chance(rng, 0.5)) {
      ViewCalibration c;
      c.eye = {uniform(rng, -5, 5), uniform(rng, 1, 10), uniform(rng, 20, 60)};
      c.look_at = {a.placement.position.x, uniform(rng, 1, 8), a.placement.position.z};
      c.vertical_fov = uniform(rng, 0.2, 1.5);
      c.image_rect = {{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)}, uniform(rng, 0.1, 1.5)};
      c.slice_id = "slice0";
      a.calibration = c;
    }
    m.architectures.push_back(std::move(a));
  }
  if (m.scene_kind == SceneKind::Reconstructed && chance(rng, 0.7)) {
    SkyboxSpec sky;
    sky.face_size_px = 1 << uniform_int(rng, 1, 10);
    sky.horizon_slices = band;
    sky.band_height_frac = band.empty() ? 0.0 : uniform(rng, 0.05, 0.9);
    sky.sky_top = color(rng);
    sky.sky_horizon = color(rng);
    sky.ground = color(rng);
    sky.rhythm_seed = rng() >> 1;
    const double lo = uniform(rng, 0.3, 1.2);
    sky.scale_jitter = {lo, lo + uniform(rng, 0, 0.8)};
    m.skybox = sky;
  }
  if (chance(rng, 0.6)) m.narrative = chain(rng, speakers);
  return m;
}

std::string bytes(Rng &rng, std::size_t max_len) {
  const std::size_t len = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(max_len)));
  std::string s(len, '\0');
  for (char &c : s) c = static_cast<char>(uniform_int(rng, 0, 255));
  return s;
}

}  // namespace gen
