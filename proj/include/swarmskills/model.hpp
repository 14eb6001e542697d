#pragma once

#include "swarmskills/time.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace swarmskills {

inline constexpr const char* kSwarmSkillKind = "swarm-skill";
inline constexpr const char* kBuildMode = "build_mode";
inline constexpr const char* kPlanMode = "plan_mode";

// ─── Skill asset model ─────────────────────────────────────────────

struct RoleDecl {
    std::string id;
    std::vector<std::string> skills;
    std::vector<std::string> tools;
    std::optional<std::string> model;

    bool operator==(const RoleDecl&) const = default;
};

// One unrecognized frontmatter entry, kept verbatim (key line plus any
// indented continuation lines) so unknown fields round-trip byte-identically.
struct ExtraField {
    std::string key;
    std::string raw;

    bool operator==(const ExtraField&) const = default;
};

struct Frontmatter {
    std::optional<std::string> name;
    std::optional<std::string> description;
    std::optional<std::string> kind;
    std::optional<std::string> teammate_mode;
    std::optional<std::vector<RoleDecl>> roles;
    std::optional<std::vector<std::string>> dependencies;
    std::vector<ExtraField> extra_fields;

    bool operator==(const Frontmatter&) const = default;

    std::string name_or_empty() const { return name.value_or(""); }
    std::string description_or_empty() const { return description.value_or(""); }
    bool is_swarm_skill() const { return kind && *kind == kSwarmSkillKind; }

    const std::vector<RoleDecl>& declared_roles() const {
        static const std::vector<RoleDecl> none;
        return roles ? *roles : none;
    }
    const RoleDecl* find_role(const std::string& id) const;
};

// Parsed view of bind.md. raw_text is authoritative; the structured fields
// come from an optional fenced `bounds` block of key: value lines.
struct ExecutionBounds {
    std::string raw_text;
    std::optional<std::int64_t> max_turns;
    std::optional<std::int64_t> token_budget;
    std::vector<std::string> quality_gates;

    bool operator==(const ExecutionBounds&) const = default;
};

// ─── Evolution experience ──────────────────────────────────────────

namespace action {
inline constexpr const char* kInsert = "INSERT";
inline constexpr const char* kReplace = "REPLACE";
inline constexpr const char* kDelete = "DELETE";
inline constexpr const char* kSplitRole = "SPLIT_ROLE";
inline constexpr const char* kAddRole = "ADD_ROLE";
inline constexpr const char* kRemoveRole = "REMOVE_ROLE";
} // namespace action

bool is_known_action(const std::string& action);

struct ChangeDirective {
    std::vector<std::string> target_files;
    std::string action;
    std::string content;

    bool operator==(const ChangeDirective&) const = default;
};

// Raw counters are authoritative; effectiveness/utilization are derived from
// them on demand. freshness_snapshot is the last persisted freshness_decay
// value (1.0 whenever last_observed_at just moved), carried so serialization
// never needs a clock.
struct ScoreState {
    std::int64_t success_count = 0;
    std::int64_t failure_count = 0;
    std::int64_t offered_count = 0;
    std::int64_t applied_count = 0;
    Timestamp last_observed_at;
    double freshness_snapshot = 1.0;

    bool operator==(const ScoreState&) const = default;
};

enum class RecordStatus { Active, Dormant, Merged, Deleted };

std::string to_string(RecordStatus s);
std::optional<RecordStatus> record_status_from_string(const std::string& s);
bool is_terminal(RecordStatus s);

// active <-> dormant, active -> merged, active -> deleted, dormant -> deleted.
// Staying in place is always allowed.
bool is_valid_transition(RecordStatus from, RecordStatus to);

struct EvolutionRecord {
    std::string id;
    Timestamp created_at;
    std::string context;
    ChangeDirective change_directive;
    ScoreState score_state;
    RecordStatus status = RecordStatus::Active;

    bool operator==(const EvolutionRecord&) const = default;
};

struct EvolutionExperience {
    std::vector<EvolutionRecord> records;

    bool operator==(const EvolutionExperience&) const = default;

    EvolutionRecord* find(const std::string& id);
    const EvolutionRecord* find(const std::string& id) const;
    bool contains(const std::string& id) const { return find(id) != nullptr; }
    std::int64_t non_terminal_count() const;
};

// ─── Scoring configuration ─────────────────────────────────────────

struct ScoringConfig {
    double w_effectiveness = 0.5;
    double w_utilization = 0.3;
    double w_freshness = 0.2;
    double half_life_seconds = days(90);
    double dormancy_threshold = 0.35;
    int simplify_capacity = 10;

    // Empty when the weights are non-negative and sum to 1 within 1e-9,
    // half-life is positive, threshold is in [0,1] and capacity positive.
    std::optional<std::string> invalid_reason() const;
};

// ─── The full asset ────────────────────────────────────────────────

struct SwarmSkill {
    Frontmatter frontmatter;
    std::string body;
    // role id -> persona text, covering every roles/*.md file in the
    // directory whether or not it is declared in the frontmatter.
    std::map<std::string, std::string> roles;
    std::optional<std::string> workflow;
    std::optional<ExecutionBounds> bounds;
    EvolutionExperience experience;
    std::filesystem::path source_dir;

    bool operator==(const SwarmSkill&) const = default;

    std::string name() const { return frontmatter.name_or_empty(); }
};

// ─── Model operations ──────────────────────────────────────────────

// Fresh state: all counters zero, last_observed_at = now. Derived metrics are
// effectiveness 0.5, utilization 0.0, freshness 1.0.
ScoreState new_score_state(Timestamp now);

// Relative, normalized, and confined to the skill directory: rejects absolute
// paths, drive prefixes, backslashes, and any ".." component.
bool is_safe_relative_path(const std::string& path);

// Human-readable invariant violations; empty means the record is well formed.
// Violations are data, not failures.
std::vector<std::string> validate_record(const EvolutionRecord& record);

} // namespace swarmskills
