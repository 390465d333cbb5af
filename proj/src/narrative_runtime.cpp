// Runtime file, headless simulation and completion enumeration.

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "manifest_internal.hpp"
#include "mural2scene/narrative.hpp"

namespace mural2scene::narrative {

namespace {
constexpr const char *kRuntimeFormat = "mural2scene.narrative";
}

std::string compile_narrative(const NarrativeGraph &g) {
  Diagnostics d = validate_graph(g);
  if (has_errors(d)) {
    d.erase(std::remove_if(d.begin(), d.end(), [](const Diagnostic &x) { return !x.is_error(); }),
            d.end());
    throw CompileError(std::move(d));
  }
  text::Value root = text::Value::object();
  root.set("format", text::Value::string(kRuntimeFormat));
  root.set("schema_version", text::Value::integer(kRuntimeSchemaVersion));
  root.set("graph", detail::encode_narrative(g));
  return text::write(root);
}

NarrativeGraph load_narrative(const std::string &runtime_file) {
  auto fail = [](const std::string &msg, SourceLoc loc = {}) {
    throw CompileError(make_error("RUNTIME_FILE_INVALID", msg, "narrative.json", loc));
  };
  auto parsed = text::parse(runtime_file, "narrative.json");
  if (!parsed.value) {
    const Diagnostic &first = parsed.diagnostics.front();
    fail(first.message, first.loc);
  }
  detail::DecodeContext ctx{"narrative.json", {}};
  detail::ObjectReader r(*parsed.value, ctx, "");
  std::optional<NarrativeGraph> g;
  if (r.valid()) {
    const auto format = r.string("format", true);
    const auto version = r.integer("schema_version", true);
    if (format && *format != kRuntimeFormat) fail("unexpected format \"" + *format + "\"");
    if (version && *version != kRuntimeSchemaVersion) {
      fail("unsupported schema_version " + std::to_string(*version));
    }
    if (const text::Value *gv = r.object("graph", true)) {
      g = detail::decode_narrative(*gv, ctx, "graph");
    }
    r.finish();
  }
  if (has_errors(ctx.diags)) {
    const Diagnostic &first = *std::find_if(ctx.diags.begin(), ctx.diags.end(),
                                            [](const Diagnostic &x) { return x.is_error(); });
    fail(first.message, first.loc);
  }
  if (!g) fail("runtime file has no narrative graph");
  return *g;
}

// ---- simulation -------------------------------------------------------------

std::vector<std::string> SimTrace::delivered() const {
  return steps.empty() ? initial_items : steps.back().items_delivered;
}

std::size_t SimTrace::stage_entries() const {
  return static_cast<std::size_t>(std::count_if(
      steps.begin(), steps.end(), [](const SimStep &s) { return s.node_entered.has_value(); }));
}

namespace {

bool event_fires(const Trigger &edge, const Event &ev) {
  using namespace trigger;
  if (const auto *want = std::get_if<GazeDwell>(&edge)) {
    const auto *got = std::get_if<GazeDwell>(&ev);
    return got && got->target_id == want->target_id && got->dwell_s >= want->dwell_s;
  }
  if (const auto *want = std::get_if<Proximity>(&edge)) {
    const auto *got = std::get_if<Proximity>(&ev);
    return got && got->target_id == want->target_id && got->radius_m <= want->radius_m;
  }
  return as_event(edge) == ev;
}

/// Node an event names, for the kinds that name one.
std::optional<std::string> named_node(const Event &ev) {
  using namespace trigger;
  if (const auto *r = std::get_if<ResetDialogue>(&ev)) return r->dialogue_node_id;
  if (std::holds_alternative<GuidanceToggle>(ev)) return std::nullopt;
  return std::visit(
      [](const auto &alt) -> std::optional<std::string> {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, ResetDialogue> || std::is_same_v<T, GuidanceToggle>) {
          return std::nullopt;
        } else {
          return node_target(Trigger{alt});
        }
      },
      ev);
}

class Simulator {
 public:
  explicit Simulator(const NarrativeGraph &g) : g_(g) {}

  SimTrace run(const std::vector<Event> &script) {
    SimTrace t;
    t.start_node = g_.start_node;
    current_ = g_.start_node;
    deliver(current_);
    t.initial_items = items();
    if (g_.is_terminal(current_)) {
      t.result = outcome::Completed{};
      return t;
    }
    for (std::size_t i = 0; i < script.size(); ++i) {
      const Event &ev = script[i];
      if (const auto named = named_node(ev); named && g_.find_node(*named) == nullptr) {
        t.result = outcome::RejectedEvent{
            i, describe(ev) + " names node \"" + *named + "\", which the graph does not have"};
        return t;
      }
      SimStep step;
      step.event_index = i;
      step.event = ev;
      apply(ev, step);
      step.items_delivered = items();
      if (guidance_on_) {
        if (const WaypointPath *p = g_.guidance.path_for(current_)) step.guidance_path = p->points;
      }
      t.steps.push_back(std::move(step));
      if (g_.is_terminal(current_)) {
        t.result = outcome::Completed{};
        return t;
      }
    }
    t.result = outcome::Stuck{current_};
    return t;
  }

 private:
  void apply(const Event &ev, SimStep &step) {
    using namespace trigger;
    if (std::holds_alternative<CleanComplete>(ev)) {
      reject(step, "CleanComplete is raised by the task itself");
      return;
    }
    if (const Edge *e = matching_edge(ev)) {
      enter(e->to_node, step);
      return;
    }
    if (std::holds_alternative<GuidanceToggle>(ev)) {
      guidance_on_ = !guidance_on_;
      step.note = guidance_on_ ? "light-point navigation on" : "light-point navigation off";
      return;
    }
    const NarrativeNode &node = *g_.find_node(current_);
    if (const auto *dlg = std::get_if<node::Dialogue>(&node.kind)) {
      if (const auto *click = std::get_if<RayClick>(&ev);
          click && click->target_id == dlg->speaker_slice_id) {
        step.note = "conversation with " + dlg->speaker_slice_id;
        return;
      }
      if (const auto *reset = std::get_if<ResetDialogue>(&ev);
          reset && reset->dialogue_node_id == node.node_id) {
        step.note = "conversation restarts from the first line";
        return;
      }
    }
    if (const auto *task = std::get_if<node::Task>(&node.kind)) {
      if (const auto *grab = std::get_if<Grab>(&ev)) {
        handle_grab(*task, grab->target_id, step);
        return;
      }
    }
    reject(step, "no transition from \"" + current_ + "\" on " + describe(ev));
  }

  void handle_grab(const node::Task &task, const std::string &target, SimStep &step) {
    if (task.tool_id && target == *task.tool_id) {
      if (tool_held_) {
        reject(step, target + " is already in hand");
      } else {
        tool_held_ = true;
        step.note = "picked up " + target;
      }
      return;
    }
    if (std::find(task.target_ids.begin(), task.target_ids.end(), target) ==
        task.target_ids.end()) {
      reject(step, target + " is not part of task \"" + current_ + "\"");
      return;
    }
    if (task.tool_id && !tool_held_) {
      reject(step, "cleaning " + target + " needs " + *task.tool_id);
      return;
    }
    if (!cleaned_.insert(target).second) {
      reject(step, target + " is already clean");
      return;
    }
    step.note = "cleaned " + target + " (" + std::to_string(cleaned_.size()) + "/" +
                std::to_string(task.spot_count) + ")";
    if (static_cast<long>(cleaned_.size()) < task.spot_count) return;
    const Event done = trigger::CleanComplete{current_};
    if (const Edge *e = matching_edge(done)) {
      step.note += ", CleanComplete";
      enter(e->to_node, step);
    } else {
      step.note += ", task complete but nothing follows it";
    }
  }

  const Edge *matching_edge(const Event &ev) const {
    for (const auto &e : g_.edges) {
      if (e.from_node == current_ && event_fires(e.trigger, ev)) return &e;
    }
    return nullptr;
  }

  void enter(const std::string &node_id, SimStep &step) {
    current_ = node_id;
    tool_held_ = false;
    cleaned_.clear();
    deliver(node_id);
    step.node_entered = node_id;
  }

  void deliver(const std::string &node_id) {
    if (const NarrativeNode *n = g_.find_node(node_id)) {
      delivered_.insert(n->delivers.begin(), n->delivers.end());
    }
  }

  static void reject(SimStep &step, std::string why) {
    step.status = StepStatus::Rejected;
    step.note = std::move(why);
  }

  std::vector<std::string> items() const { return {delivered_.begin(), delivered_.end()}; }

  const NarrativeGraph &g_;
  std::string current_;
  std::set<std::string> delivered_;
  std::set<std::string> cleaned_;
  bool tool_held_ = false;
  bool guidance_on_ = false;
};

std::string join(const std::vector<std::string> &items) {
  std::string out;
  for (const auto &s : items) {
    if (!out.empty()) out += ",";
    out += s;
  }
  return out;
}

}  // namespace

SimTrace simulate(const NarrativeGraph &g, const std::vector<Event> &script) {
  return Simulator(g).run(script);
}

std::string format_trace(const SimTrace &t) {
  std::ostringstream os;
  os << "start " << t.start_node << " items=[" << join(t.initial_items) << "]\n";
  for (const auto &s : t.steps) {
    os << "#" << s.event_index << " " << describe(s.event) << " "
       << (s.status == StepStatus::Accepted ? "accepted" : "rejected");
    if (s.node_entered) os << " -> " << *s.node_entered;
    if (!s.note.empty()) os << " (" << s.note << ")";
    os << " items=" << s.items_delivered.size();
    if (!s.guidance_path.empty()) os << " guidance=" << s.guidance_path.size() << "pts";
    os << "\n";
  }
  os << "stage entries: " << t.stage_entries() << "\n";
  os << "delivered: [" << join(t.delivered()) << "]\n";
  std::visit(
      [&](const auto &r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, outcome::Completed>) {
          os << "outcome Completed\n";
        } else if constexpr (std::is_same_v<T, outcome::Stuck>) {
          os << "outcome Stuck at " << r.at_node << "\n";
        } else {
          os << "outcome RejectedEvent #" << r.index << ": " << r.reason << "\n";
        }
      },
      t.result);
  return os.str();
}

// ---- enumeration --------------------------------------------------------------

void for_each_completion(const NarrativeGraph &g, int max_len,
                         const std::function<void(const std::vector<std::size_t> &)> &visit) {
  if (max_len < 0 || max_len > kMaxEnumerationLength) {
    throw CompileError(make_error("BOUND_EXCEEDED",
                                  "max_len " + std::to_string(max_len) + " is outside [0, " +
                                      std::to_string(kMaxEnumerationLength) + "]"));
  }
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < g.edges.size(); ++i) out[g.edges[i].from_node].push_back(i);

  std::uint64_t found = 0;
  std::vector<std::size_t> walk;
  std::function<void(const std::string &)> dfs = [&](const std::string &at) {
    if (g.is_terminal(at)) {
      if (++found > kMaxEnumeratedCompletions) {
        throw CompileError(make_error("BOUND_EXCEEDED",
                                      "more than " + std::to_string(kMaxEnumeratedCompletions) +
                                          " completions"));
      }
      visit(walk);
      return;
    }
    if (static_cast<int>(walk.size()) == max_len) return;
    const auto it = out.find(at);
    if (it == out.end()) return;
    for (const auto ei : it->second) {
      walk.push_back(ei);
      dfs(g.edges[ei].to_node);
      walk.pop_back();
    }
  };
  if (g.find_node(g.start_node) != nullptr) dfs(g.start_node);
}

std::uint64_t enumerate_completions(const NarrativeGraph &g, int max_len) {
  std::uint64_t n = 0;
  for_each_completion(g, max_len, [&](const std::vector<std::size_t> &) { ++n; });
  return n;
}

std::vector<Event> script_for_path(const NarrativeGraph &g, const std::vector<std::size_t> &path) {
  std::vector<Event> script;
  for (const auto ei : path) {
    const Edge &e = g.edges.at(ei);
    if (const auto *done = std::get_if<trigger::CleanComplete>(&e.trigger)) {
      const NarrativeNode *n = g.find_node(done->task_node_id);
      const auto *task = n ? std::get_if<node::Task>(&n->kind) : nullptr;
      if (task == nullptr) {
        script.push_back(as_event(e.trigger));
        continue;
      }
      if (task->tool_id) script.push_back(trigger::Grab{*task->tool_id});
      const auto count = std::min<std::size_t>(static_cast<std::size_t>(std::max(task->spot_count, 0)),
                                               task->target_ids.size());
      for (std::size_t k = 0; k < count; ++k) script.push_back(trigger::Grab{task->target_ids[k]});
      continue;
    }
    script.push_back(as_event(e.trigger));
  }
  return script;
}

}  // namespace mural2scene::narrative
