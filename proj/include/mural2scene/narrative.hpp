#pragma once

// Task/plot narrative graphs: a finite state machine of dialogue, task,
// media and teleport nodes advanced by interaction triggers.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mural2scene/diagnostic.hpp"
#include "mural2scene/math.hpp"
#include "mural2scene/specs.hpp"

namespace mural2scene::narrative {

inline constexpr double kDefaultGazeDwellS = 2.0;
inline constexpr int kDefaultCleanSpots = 3;
inline constexpr int kRuntimeSchemaVersion = 1;

namespace node {
struct Dialogue {
  std::string speaker_slice_id;
  std::vector<std::string> lines;
  friend bool operator==(const Dialogue &, const Dialogue &) = default;
};
/// Clean task: `spot_count` distinct spots out of `target_ids` must be
/// cleaned. When `tool_id` is set the tool has to be grabbed first.
struct Task {
  int spot_count = kDefaultCleanSpots;
  std::vector<std::string> target_ids;
  std::optional<std::string> tool_id;
  friend bool operator==(const Task &, const Task &) = default;
};
struct Media {
  double duration_s = 1.0;
  friend bool operator==(const Media &, const Media &) = default;
};
struct Teleport {
  std::string target_scene_id;
  Placement spawn;
  friend bool operator==(const Teleport &, const Teleport &) = default;
};
}  // namespace node

using NodeKind = std::variant<node::Dialogue, node::Task, node::Media, node::Teleport>;

const char *node_kind_name(const NodeKind &k);

struct NarrativeNode {
  std::string node_id;
  NodeKind kind;
  std::vector<std::string> delivers;  // knowledge item ids
  SourceLoc loc;

  friend bool operator==(const NarrativeNode &, const NarrativeNode &) = default;
};

namespace trigger {
struct GazeDwell {
  std::string target_id;
  double dwell_s = kDefaultGazeDwellS;
  friend bool operator==(const GazeDwell &, const GazeDwell &) = default;
};
struct RayClick {
  std::string target_id;
  friend bool operator==(const RayClick &, const RayClick &) = default;
};
struct Proximity {
  std::string target_id;
  double radius_m = 1.0;
  friend bool operator==(const Proximity &, const Proximity &) = default;
};
struct Grab {
  std::string target_id;
  friend bool operator==(const Grab &, const Grab &) = default;
};
struct CleanComplete {
  std::string task_node_id;
  friend bool operator==(const CleanComplete &, const CleanComplete &) = default;
};
struct MediaEnd {
  std::string media_node_id;
  friend bool operator==(const MediaEnd &, const MediaEnd &) = default;
};
struct DialogueEnd {
  std::string dialogue_node_id;
  friend bool operator==(const DialogueEnd &, const DialogueEnd &) = default;
};
/// Script-only: the player walked away mid-conversation.
struct ResetDialogue {
  std::string dialogue_node_id;
  friend bool operator==(const ResetDialogue &, const ResetDialogue &) = default;
};
/// Script-only: the controller button that toggles light-point navigation.
struct GuidanceToggle {
  friend bool operator==(const GuidanceToggle &, const GuidanceToggle &) = default;
};
}  // namespace trigger

using Trigger = std::variant<trigger::GazeDwell, trigger::RayClick, trigger::Proximity,
                             trigger::Grab, trigger::CleanComplete, trigger::MediaEnd,
                             trigger::DialogueEnd>;

/// What a simulation script feeds in. For GazeDwell the dwell is how long the
/// player looked; for Proximity the radius is how close the player came.
using Event = std::variant<trigger::GazeDwell, trigger::RayClick, trigger::Proximity,
                           trigger::Grab, trigger::CleanComplete, trigger::MediaEnd,
                           trigger::DialogueEnd, trigger::ResetDialogue,
                           trigger::GuidanceToggle>;

const char *trigger_name(const Trigger &t);
const char *event_name(const Event &e);
std::string describe(const Event &e);
Event as_event(const Trigger &t);

/// Entity id a trigger points at (target, speaker, ...), if it names one.
std::optional<std::string> entity_target(const Trigger &t);
/// Node id a trigger points at (DialogueEnd, MediaEnd, CleanComplete).
std::optional<std::string> node_target(const Trigger &t);

struct Edge {
  std::string from_node;
  std::string to_node;
  Trigger trigger;
  SourceLoc loc;

  friend bool operator==(const Edge &, const Edge &) = default;
};

enum class ItemSource { DialogueLine, MediaNode };

struct KnowledgeItem {
  std::string item_id;
  std::string summary;
  ItemSource source = ItemSource::DialogueLine;
  SourceLoc loc;

  friend bool operator==(const KnowledgeItem &, const KnowledgeItem &) = default;
};

enum class GuidanceActivation { ControllerButton };

struct WaypointPath {
  std::string node_id;
  std::vector<Vec3> points;

  friend bool operator==(const WaypointPath &, const WaypointPath &) = default;
};

struct GuidanceConfig {
  GuidanceActivation enabled_by = GuidanceActivation::ControllerButton;
  std::vector<WaypointPath> waypoints;

  const WaypointPath *path_for(const std::string &node_id) const;

  friend bool operator==(const GuidanceConfig &, const GuidanceConfig &) = default;
};

struct NarrativeGraph {
  std::vector<NarrativeNode> nodes;
  std::vector<Edge> edges;
  std::string start_node;
  std::vector<std::string> terminal_nodes;
  std::vector<KnowledgeItem> knowledge_items;
  GuidanceConfig guidance;
  SourceLoc loc;

  const NarrativeNode *find_node(const std::string &id) const;
  bool is_terminal(const std::string &id) const;

  friend bool operator==(const NarrativeGraph &, const NarrativeGraph &) = default;
};

/// Type-level checks only: unique ids, start/terminal/edge endpoints exist,
/// node and trigger values in range, trigger kinds consistent with the node
/// they leave.
Diagnostics check_graph_structure(const NarrativeGraph &g);

/// Reports unreachable nodes, missing start->terminal paths, undelivered
/// knowledge items, dangling trigger targets and guidance gaps. When
/// `scene_entities` is given, entity-targeting triggers are also checked
/// against it (UNBOUND_TARGET).
Diagnostics validate_graph(const NarrativeGraph &g,
                           const std::set<std::string> *scene_entities = nullptr);

/// Deterministic runtime file (JSON, schema in docs/narrative-runtime.md).
/// Throws CompileError carrying the validation diagnostics when `g` has
/// errors.
std::string compile_narrative(const NarrativeGraph &g);

/// Inverse of compile_narrative. Throws CompileError(RUNTIME_FILE_INVALID).
NarrativeGraph load_narrative(const std::string &runtime_file);

// ---- simulation -----------------------------------------------------------

enum class StepStatus { Accepted, Rejected };

struct SimStep {
  std::size_t event_index = 0;
  Event event;
  StepStatus status = StepStatus::Accepted;
  /// Set when this step moved the machine into a new node.
  std::optional<std::string> node_entered;
  /// Why a step was rejected, or what a node-local event did.
  std::string note;
  std::vector<std::string> items_delivered;  // sorted, cumulative
  /// Light-point trajectory shown after this step, when guidance is on.
  std::vector<Vec3> guidance_path;

  friend bool operator==(const SimStep &, const SimStep &) = default;
};

namespace outcome {
struct Completed {
  friend bool operator==(const Completed &, const Completed &) = default;
};
struct Stuck {
  std::string at_node;
  friend bool operator==(const Stuck &, const Stuck &) = default;
};
/// A script event that cannot apply to this graph at all (names a node the
/// graph does not have). Simulation stops there.
struct RejectedEvent {
  std::size_t index = 0;
  std::string reason;
  friend bool operator==(const RejectedEvent &, const RejectedEvent &) = default;
};
}  // namespace outcome

using SimOutcome = std::variant<outcome::Completed, outcome::Stuck, outcome::RejectedEvent>;

struct SimTrace {
  std::string start_node;
  std::vector<std::string> initial_items;
  std::vector<SimStep> steps;
  SimOutcome result;

  bool completed() const { return std::holds_alternative<outcome::Completed>(result); }
  std::vector<std::string> delivered() const;
  std::size_t stage_entries() const;

  friend bool operator==(const SimTrace &, const SimTrace &) = default;
};

/// Replays `script` against `g`. Events matching an outgoing edge advance;
/// anything else is handled by the current node (engaging a speaker, picking
/// up a tool, cleaning a spot) or recorded as rejected and skipped.
SimTrace simulate(const NarrativeGraph &g, const std::vector<Event> &script);

std::string format_trace(const SimTrace &t);

// ---- enumeration ----------------------------------------------------------

inline constexpr int kMaxEnumerationLength = 20;
inline constexpr std::uint64_t kMaxEnumeratedCompletions = 1'000'000;

/// Visits every edge walk from the start that first reaches a terminal
/// within `max_len` edges. Walks are reported as edge indices into g.edges.
/// Throws CompileError(BOUND_EXCEEDED) past kMaxEnumeratedCompletions or
/// when max_len exceeds kMaxEnumerationLength.
void for_each_completion(const NarrativeGraph &g, int max_len,
                         const std::function<void(const std::vector<std::size_t> &)> &visit);

std::uint64_t enumerate_completions(const NarrativeGraph &g, int max_len);

/// The canonical script that walks `path`: each edge's trigger as an event,
/// with a clean task's spots (and tool) expanded in declaration order.
std::vector<Event> script_for_path(const NarrativeGraph &g,
                                   const std::vector<std::size_t> &path);

}  // namespace mural2scene::narrative
