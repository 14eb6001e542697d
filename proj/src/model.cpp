#include "swarmskills/model.hpp"

#include <algorithm>
#include <cmath>

namespace swarmskills {

const RoleDecl* Frontmatter::find_role(const std::string& id) const {
    if (!roles) return nullptr;
    for (const auto& role : *roles) {
        if (role.id == id) return &role;
    }
    return nullptr;
}

bool is_known_action(const std::string& a) {
    return a == action::kInsert || a == action::kReplace || a == action::kDelete ||
           a == action::kSplitRole || a == action::kAddRole || a == action::kRemoveRole;
}

std::string to_string(RecordStatus s) {
    switch (s) {
        case RecordStatus::Active: return "active";
        case RecordStatus::Dormant: return "dormant";
        case RecordStatus::Merged: return "merged";
        case RecordStatus::Deleted: return "deleted";
    }
    return "active";
}

std::optional<RecordStatus> record_status_from_string(const std::string& s) {
    if (s == "active") return RecordStatus::Active;
    if (s == "dormant") return RecordStatus::Dormant;
    if (s == "merged") return RecordStatus::Merged;
    if (s == "deleted") return RecordStatus::Deleted;
    return std::nullopt;
}

bool is_terminal(RecordStatus s) {
    return s == RecordStatus::Merged || s == RecordStatus::Deleted;
}

bool is_valid_transition(RecordStatus from, RecordStatus to) {
    if (from == to) return true;
    switch (from) {
        case RecordStatus::Active:
            return true; // dormant, merged, deleted are all reachable
        case RecordStatus::Dormant:
            return to == RecordStatus::Active || to == RecordStatus::Deleted;
        case RecordStatus::Merged:
        case RecordStatus::Deleted:
            return false;
    }
    return false;
}

EvolutionRecord* EvolutionExperience::find(const std::string& id) {
    for (auto& r : records) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

const EvolutionRecord* EvolutionExperience::find(const std::string& id) const {
    for (const auto& r : records) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

std::int64_t EvolutionExperience::non_terminal_count() const {
    return std::count_if(records.begin(), records.end(),
                         [](const EvolutionRecord& r) { return !is_terminal(r.status); });
}

std::optional<std::string> ScoringConfig::invalid_reason() const {
    if (w_effectiveness < 0 || w_utilization < 0 || w_freshness < 0)
        return "weights must be non-negative";
    if (std::fabs(w_effectiveness + w_utilization + w_freshness - 1.0) > 1e-9)
        return "weights must sum to 1";
    if (half_life_seconds <= 0) return "half_life must be positive";
    if (dormancy_threshold < 0 || dormancy_threshold > 1)
        return "dormancy_threshold must be in [0,1]";
    if (simplify_capacity <= 0) return "simplify_capacity must be positive";
    return std::nullopt;
}

ScoreState new_score_state(Timestamp now) {
    ScoreState s;
    s.last_observed_at = now;
    s.freshness_snapshot = 1.0;
    return s;
}

bool is_safe_relative_path(const std::string& path) {
    if (path.empty()) return false;
    if (path.front() == '/') return false;
    if (path.find('\\') != std::string::npos) return false;
    if (path.find(':') != std::string::npos) return false;
    // reject any ".." component
    std::size_t start = 0;
    while (start <= path.size()) {
        const std::size_t slash = path.find('/', start);
        const std::string part =
            path.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
        if (part == "..") return false;
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    return true;
}

std::vector<std::string> validate_record(const EvolutionRecord& record) {
    std::vector<std::string> violations;
    if (record.id.empty()) violations.push_back("record id is empty");
    if (record.context.empty()) violations.push_back("context is empty");
    if (record.change_directive.target_files.empty()) {
        violations.push_back("change_directive.target_files is empty");
    }
    for (const auto& target : record.change_directive.target_files) {
        if (!is_safe_relative_path(target)) {
            violations.push_back("target path escapes the skill directory: " + target);
        }
    }
    if (record.change_directive.action.empty()) {
        violations.push_back("change_directive.action is empty");
    }
    const ScoreState& s = record.score_state;
    if (s.success_count < 0 || s.failure_count < 0 || s.offered_count < 0 ||
        s.applied_count < 0) {
        violations.push_back("score counters must be non-negative");
    }
    if (s.applied_count > s.offered_count) {
        violations.push_back("applied_count exceeds offered_count");
    }
    if (s.freshness_snapshot <= 0.0 || s.freshness_snapshot > 1.0) {
        violations.push_back("freshness snapshot outside (0,1]");
    }
    return violations;
}

} // namespace swarmskills
