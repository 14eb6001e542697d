#pragma once

#include "swarmskills/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace swarmskills {

// ─── Event log ─────────────────────────────────────────────────────

enum class EventType {
    SpawnRole,
    Message,
    TaskStart,
    TaskEnd,
    Dependency,
    Feedback,
    SkillLoaded,
    RecordOffered,
    RecordApplied,
    Outcome,
};

std::string to_string(EventType t);
std::optional<EventType> event_type_from_string(const std::string& s);

struct TrajectoryEvent {
    Timestamp at;
    std::string actor; // role id, "user", or "leader"
    EventType type = EventType::Message;
    nlohmann::ordered_json payload;

    bool operator==(const TrajectoryEvent&) const = default;
};

struct Trajectory {
    std::vector<TrajectoryEvent> events;
    std::filesystem::path source;

    bool operator==(const Trajectory&) const = default;
};

// Line-delimited JSON objects with fields at / actor / type / payload.
// Rejects unknown event types and out-of-order timestamps with the line
// number. Blank lines are skipped; an empty file is an empty trajectory.
Trajectory parse_trajectory(const std::filesystem::path& path);

// ─── CREATE detection ──────────────────────────────────────────────

struct CreateSignal {
    bool detected = false;
    std::vector<std::string> roles; // distinct spawn_role actors, sorted
    std::vector<std::pair<std::string, std::string>> cross_edges;
    std::string summary;
};

// True iff >= 2 distinct roles were spawned and at least one dependency event
// links tasks owned by different actors. A set-level predicate: invariant
// under any event reordering that preserves timestamps.
CreateSignal detect_create_signal(const Trajectory& t);

// ─── Distillation ──────────────────────────────────────────────────

struct TrajectorySummary {
    std::string text; // complete digest; sufficient input for any backend
    std::vector<std::pair<std::string, std::string>> roles; // id -> persona
    std::vector<std::pair<std::string, std::string>> edges; // from -> to tasks
    std::vector<std::string> categories;
    std::int64_t message_count = 0;
};

// Text in, files out. Implementations may call external model services; the
// deterministic stub uses the structured fields the text was rendered from.
class SkillSynthesizer {
public:
    virtual ~SkillSynthesizer() = default;
    virtual std::map<std::string, std::string> synthesize(const TrajectorySummary& summary) = 0;
};

// Mechanical synthesis: one role + persona per spawned role, a Mermaid fence
// of the dependency edges, bounds from the observed message count.
class StubSynthesizer final : public SkillSynthesizer {
public:
    std::map<std::string, std::string> synthesize(const TrajectorySummary& summary) override;
};

TrajectorySummary summarize_trajectory(const Trajectory& t);

// Writes a swarm-conformant candidate skill into a fresh subdirectory of
// staging and returns it. Refuses (DomainError) when the create signal is
// absent; nothing is written in that case.
SwarmSkill distill_candidate(const Trajectory& t, SkillSynthesizer& synthesizer,
                             const std::filesystem::path& staging);

// ─── PATCH detection ───────────────────────────────────────────────

enum class FrictionKind {
    CircularDependency,
    RedundantCommunication,
    PrematureTermination,
    RoleCoupling,
    ExplicitSignal,
};

std::string to_string(FrictionKind k);

struct FrictionFinding {
    FrictionKind kind = FrictionKind::ExplicitSignal;
    std::vector<std::size_t> evidence; // event indices
    ChangeDirective proposed_directive;
    std::string summary;
};

struct DetectorConfig {
    int redundancy_threshold = 3; // identical messages on one ordered pair
};

// Deterministic detectors over one session's trace. Requires a skill_loaded
// event naming the skill (DomainError otherwise). Empty result means no
// friction.
std::vector<FrictionFinding> analyze_friction(const Trajectory& t, const SwarmSkill& skill,
                                              const DetectorConfig& config = {});

// One fresh active record per finding, ids "evo_<yyyymmdd>_<seq>" with the
// sequence bumped past collisions. Returns the grown experience; base files
// of the skill are never touched.
EvolutionExperience emit_records(const std::vector<FrictionFinding>& findings,
                                 const SwarmSkill& skill, Timestamp now);

// ─── Dependency-graph helpers ──────────────────────────────────────

// Elementary cycles of a directed graph, each rotated so its smallest vertex
// comes first, sorted; suitable for equality against an independent
// enumerator.
std::vector<std::vector<std::string>>
find_elementary_cycles(const std::vector<std::pair<std::string, std::string>>& edges);

} // namespace swarmskills
