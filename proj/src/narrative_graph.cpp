// Narrative graph vocabulary and validation.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "mural2scene/narrative.hpp"
#include "mural2scene/structured_text.hpp"

namespace mural2scene::narrative {

const char *node_kind_name(const NodeKind &k) {
  switch (k.index()) {
    case 0: return "Dialogue";
    case 1: return "Task";
    case 2: return "Media";
    default: return "Teleport";
  }
}

const char *event_name(const Event &e) {
  static constexpr const char *names[] = {"GazeDwell",   "RayClick",      "Proximity",
                                          "Grab",        "CleanComplete", "MediaEnd",
                                          "DialogueEnd", "ResetDialogue", "GuidanceToggle"};
  return names[e.index()];
}

const char *trigger_name(const Trigger &t) { return event_name(as_event(t)); }

Event as_event(const Trigger &t) {
  return std::visit([](const auto &alt) -> Event { return alt; }, t);
}

std::string describe(const Event &e) {
  using namespace trigger;
  return std::visit(
      [](const auto &t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, GazeDwell>) {
          return "GazeDwell(" + t.target_id + ", " + text::format_double(t.dwell_s) + "s)";
        } else if constexpr (std::is_same_v<T, RayClick>) {
          return "RayClick(" + t.target_id + ")";
        } else if constexpr (std::is_same_v<T, Proximity>) {
          return "Proximity(" + t.target_id + ", " + text::format_double(t.radius_m) + "m)";
        } else if constexpr (std::is_same_v<T, Grab>) {
          return "Grab(" + t.target_id + ")";
        } else if constexpr (std::is_same_v<T, CleanComplete>) {
          return "CleanComplete(" + t.task_node_id + ")";
        } else if constexpr (std::is_same_v<T, MediaEnd>) {
          return "MediaEnd(" + t.media_node_id + ")";
        } else if constexpr (std::is_same_v<T, DialogueEnd>) {
          return "DialogueEnd(" + t.dialogue_node_id + ")";
        } else if constexpr (std::is_same_v<T, ResetDialogue>) {
          return "ResetDialogue(" + t.dialogue_node_id + ")";
        } else {
          return "GuidanceToggle";
        }
      },
      e);
}

std::optional<std::string> entity_target(const Trigger &t) {
  using namespace trigger;
  if (const auto *g = std::get_if<GazeDwell>(&t)) return g->target_id;
  if (const auto *r = std::get_if<RayClick>(&t)) return r->target_id;
  if (const auto *p = std::get_if<Proximity>(&t)) return p->target_id;
  if (const auto *g = std::get_if<Grab>(&t)) return g->target_id;
  return std::nullopt;
}

std::optional<std::string> node_target(const Trigger &t) {
  using namespace trigger;
  if (const auto *c = std::get_if<CleanComplete>(&t)) return c->task_node_id;
  if (const auto *m = std::get_if<MediaEnd>(&t)) return m->media_node_id;
  if (const auto *d = std::get_if<DialogueEnd>(&t)) return d->dialogue_node_id;
  return std::nullopt;
}

const WaypointPath *GuidanceConfig::path_for(const std::string &node_id) const {
  for (const auto &w : waypoints) {
    if (w.node_id == node_id) return &w;
  }
  return nullptr;
}

const NarrativeNode *NarrativeGraph::find_node(const std::string &id) const {
  for (const auto &n : nodes) {
    if (n.node_id == id) return &n;
  }
  return nullptr;
}

bool NarrativeGraph::is_terminal(const std::string &id) const {
  return std::find(terminal_nodes.begin(), terminal_nodes.end(), id) != terminal_nodes.end();
}

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

/// Two triggers leaving the same node that a single event could satisfy.
bool overlapping(const Trigger &a, const Trigger &b) {
  if (a.index() != b.index()) return false;
  const auto ea = entity_target(a);
  if (ea) return *ea == *entity_target(b);
  return node_target(a) == node_target(b);
}

}  // namespace

Diagnostics check_graph_structure(const NarrativeGraph &g) {
  Diagnostics d;
  auto error = [&](const char *code, const std::string &msg, SourceLoc loc) {
    d.push_back(make_error(code, msg, {}, loc));
  };

  std::set<std::string> ids;
  for (const auto &n : g.nodes) {
    if (n.node_id.empty()) error("INVALID_VALUE", "narrative node id must be nonempty", n.loc);
    if (!ids.insert(n.node_id).second) {
      error("DUPLICATE_ID", "duplicate narrative node \"" + n.node_id + "\"", n.loc);
    }
  }
  std::set<std::string> item_ids;
  for (const auto &k : g.knowledge_items) {
    if (!item_ids.insert(k.item_id).second) {
      error("DUPLICATE_ID", "duplicate knowledge item \"" + k.item_id + "\"", k.loc);
    }
  }

  if (g.start_node.empty() || !ids.count(g.start_node)) {
    error("UNKNOWN_NODE", "start_node \"" + g.start_node + "\" is not a node", g.loc);
  }
  if (g.terminal_nodes.empty()) error("MISSING_FIELD", "narrative has no terminal nodes", g.loc);
  for (const auto &t : g.terminal_nodes) {
    if (!ids.count(t)) error("UNKNOWN_NODE", "terminal node \"" + t + "\" is not a node", g.loc);
  }

  for (const auto &n : g.nodes) {
    const std::string what = "node \"" + n.node_id + "\"";
    std::visit(
        [&](const auto &k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, node::Dialogue>) {
            if (k.lines.empty()) error("INVALID_NODE", what + " has no dialogue lines", n.loc);
            if (k.speaker_slice_id.empty()) {
              error("INVALID_NODE", what + " has no speaker", n.loc);
            }
          } else if constexpr (std::is_same_v<T, node::Task>) {
            if (k.spot_count < 1) error("INVALID_NODE", what + " spot_count must be >= 1", n.loc);
            const std::set<std::string> distinct(k.target_ids.begin(), k.target_ids.end());
            if (distinct.size() != k.target_ids.size()) {
              error("INVALID_NODE", what + " lists a target twice", n.loc);
            }
            if (static_cast<long>(distinct.size()) < k.spot_count) {
              error("INVALID_NODE",
                    what + " has fewer targets than its spot_count of " +
                        std::to_string(k.spot_count),
                    n.loc);
            }
            if (k.tool_id && distinct.count(*k.tool_id)) {
              error("INVALID_NODE", what + " uses its tool as a spot", n.loc);
            }
          } else if constexpr (std::is_same_v<T, node::Media>) {
            if (!positive(k.duration_s)) {
              error("INVALID_NODE", what + " duration_s must be > 0", n.loc);
            }
          } else {
            if (k.target_scene_id.empty()) {
              error("INVALID_NODE", what + " has no target_scene_id", n.loc);
            }
            if (!positive(k.spawn.scale)) {
              error("INVALID_NODE", what + " spawn scale must be > 0", n.loc);
            }
          }
        },
        n.kind);
    for (const auto &item : n.delivers) {
      if (!item_ids.count(item)) {
        error("UNKNOWN_ITEM", what + " delivers undeclared knowledge item \"" + item + "\"",
              n.loc);
      }
    }
  }

  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge &e = g.edges[i];
    const std::string what = "edge " + e.from_node + " -> " + e.to_node;
    const NarrativeNode *from = g.find_node(e.from_node);
    if (from == nullptr || g.find_node(e.to_node) == nullptr) {
      error("DANGLING_EDGE", what + " has an endpoint that is not a node", e.loc);
    }
    if (const auto *gz = std::get_if<trigger::GazeDwell>(&e.trigger); gz && !positive(gz->dwell_s)) {
      error("INVALID_TRIGGER", what + " dwell_s must be > 0", e.loc);
    }
    if (const auto *px = std::get_if<trigger::Proximity>(&e.trigger);
        px && !positive(px->radius_m)) {
      error("INVALID_TRIGGER", what + " radius_m must be > 0", e.loc);
    }
    if (const auto target = entity_target(e.trigger); target && target->empty()) {
      error("INVALID_TRIGGER", what + " trigger has an empty target_id", e.loc);
    }
    if (const auto ref = node_target(e.trigger)) {
      const NarrativeNode *target = g.find_node(*ref);
      if (target == nullptr) {
        error("DANGLING_TRIGGER",
              what + " trigger " + trigger_name(e.trigger) + " names unknown node \"" + *ref +
                  "\"",
              e.loc);
      } else {
        // completion triggers fire on the node they leave
        const bool kind_ok =
            (std::holds_alternative<trigger::DialogueEnd>(e.trigger) &&
             std::holds_alternative<node::Dialogue>(target->kind)) ||
            (std::holds_alternative<trigger::MediaEnd>(e.trigger) &&
             std::holds_alternative<node::Media>(target->kind)) ||
            (std::holds_alternative<trigger::CleanComplete>(e.trigger) &&
             std::holds_alternative<node::Task>(target->kind));
        if (!kind_ok || *ref != e.from_node) {
          error("TRIGGER_KIND_MISMATCH",
                what + " trigger " + trigger_name(e.trigger) +
                    " must name the node it leaves, of the matching kind",
                e.loc);
        }
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      const Edge &other = g.edges[j];
      if (other.from_node == e.from_node && overlapping(other.trigger, e.trigger)) {
        error("AMBIGUOUS_EDGES",
              what + " and edge " + other.from_node + " -> " + other.to_node +
                  " can fire on the same event",
              e.loc);
      }
    }
    // A Grab edge out of a task must not be mistakable for cleaning a spot.
    if (from != nullptr) {
      if (const auto *task = std::get_if<node::Task>(&from->kind)) {
        if (const auto *grab = std::get_if<trigger::Grab>(&e.trigger)) {
          const bool is_spot = std::find(task->target_ids.begin(), task->target_ids.end(),
                                         grab->target_id) != task->target_ids.end();
          if (is_spot || (task->tool_id && *task->tool_id == grab->target_id)) {
            error("AMBIGUOUS_EDGES",
                  what + " grabs \"" + grab->target_id + "\", which the task itself consumes",
                  e.loc);
          }
        }
      }
    }
  }
  return d;
}

Diagnostics validate_graph(const NarrativeGraph &g, const std::set<std::string> *scene_entities) {
  Diagnostics d = check_graph_structure(g);
  auto error = [&](const char *code, const std::string &msg, SourceLoc loc) {
    d.push_back(make_error(code, msg, {}, loc));
  };
  auto warning = [&](const char *code, const std::string &msg, SourceLoc loc) {
    d.push_back(make_warning(code, msg, {}, loc));
  };
  // Reachability needs consistent endpoints.
  if (has_errors(d)) return d;

  std::map<std::string, std::vector<std::size_t>> out_edges;
  std::map<std::string, std::vector<std::string>> in_nodes;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    out_edges[g.edges[i].from_node].push_back(i);
    in_nodes[g.edges[i].to_node].push_back(g.edges[i].from_node);
  }

  // Forward reachability stops at terminals: reaching one ends the run.
  std::set<std::string> reachable{g.start_node};
  std::deque<std::string> queue{g.start_node};
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    if (g.is_terminal(cur)) continue;
    for (const auto ei : out_edges[cur]) {
      if (reachable.insert(g.edges[ei].to_node).second) queue.push_back(g.edges[ei].to_node);
    }
  }
  // Backward reachability from terminals, through non-terminal predecessors.
  std::set<std::string> finishing;
  for (const auto &t : g.terminal_nodes) {
    if (finishing.insert(t).second) queue.push_back(t);
  }
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    for (const auto &pred : in_nodes[cur]) {
      if (g.is_terminal(pred)) continue;
      if (finishing.insert(pred).second) queue.push_back(pred);
    }
  }

  for (const auto &n : g.nodes) {
    if (!reachable.count(n.node_id)) {
      warning("UNREACHABLE_NODE", "node \"" + n.node_id + "\" cannot be reached from the start",
              n.loc);
    }
  }
  if (!finishing.count(g.start_node)) {
    error("NO_TERMINAL_PATH", "no path leads from \"" + g.start_node + "\" to a terminal node",
          g.loc);
  }

  // Nodes lying on some start -> terminal walk.
  std::set<std::string> on_path;
  for (const auto &id : reachable) {
    if (finishing.count(id)) on_path.insert(id);
  }
  for (const auto &k : g.knowledge_items) {
    bool delivered = false;
    for (const auto &n : g.nodes) {
      if (!on_path.count(n.node_id)) continue;
      if (std::find(n.delivers.begin(), n.delivers.end(), k.item_id) != n.delivers.end()) {
        delivered = true;
      }
    }
    if (!delivered) {
      error("ITEM_UNDELIVERED",
            "knowledge item \"" + k.item_id + "\" is not delivered on any completing path", k.loc);
    }
  }
  for (const auto &n : g.nodes) {
    for (const auto &item : n.delivers) {
      for (const auto &k : g.knowledge_items) {
        if (k.item_id != item) continue;
        const bool ok = (k.source == ItemSource::DialogueLine &&
                         std::holds_alternative<node::Dialogue>(n.kind)) ||
                        (k.source == ItemSource::MediaNode &&
                         std::holds_alternative<node::Media>(n.kind));
        if (!ok) {
          error("ITEM_SOURCE_MISMATCH",
                "node \"" + n.node_id + "\" (" + node_kind_name(n.kind) +
                    ") cannot deliver knowledge item \"" + item + "\"",
                n.loc);
        }
      }
    }
  }

  for (const auto &n : g.nodes) {
    if (g.is_terminal(n.node_id) || out_edges[n.node_id].empty()) continue;
    const WaypointPath *path = g.guidance.path_for(n.node_id);
    if (path == nullptr || path->points.empty()) {
      error("GUIDANCE_GAP",
            "node \"" + n.node_id + "\" has outgoing interactions but no light-point path",
            n.loc);
    }
  }
  for (const auto &w : g.guidance.waypoints) {
    if (g.find_node(w.node_id) == nullptr) {
      error("DANGLING_TRIGGER", "guidance path names unknown node \"" + w.node_id + "\"", g.loc);
    }
  }
  for (const auto &t : g.terminal_nodes) {
    if (!out_edges[t].empty()) {
      warning("TERMINAL_HAS_EXITS", "terminal node \"" + t + "\" has outgoing edges", g.loc);
    }
  }

  if (scene_entities != nullptr) {
    auto bound = [&](const std::string &id, const std::string &what, SourceLoc loc) {
      if (!scene_entities->count(id)) {
        error("UNBOUND_TARGET", what + " refers to \"" + id + "\", which is not in the scene",
              loc);
      }
    };
    for (const auto &e : g.edges) {
      if (const auto target = entity_target(e.trigger)) {
        bound(*target, "edge " + e.from_node + " -> " + e.to_node, e.loc);
      }
    }
    for (const auto &n : g.nodes) {
      if (const auto *dlg = std::get_if<node::Dialogue>(&n.kind)) {
        bound(dlg->speaker_slice_id, "dialogue \"" + n.node_id + "\" speaker", n.loc);
      } else if (const auto *task = std::get_if<node::Task>(&n.kind)) {
        for (const auto &t : task->target_ids) bound(t, "task \"" + n.node_id + "\"", n.loc);
        if (task->tool_id) bound(*task->tool_id, "task \"" + n.node_id + "\" tool", n.loc);
      }
    }
  }
  return d;
}

}  // namespace mural2scene::narrative
