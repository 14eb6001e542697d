#include "swarmskills/scoring.hpp"

#include "swarmskills/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace swarmskills {

std::string to_string(Outcome o) { return o == Outcome::Success ? "success" : "failure"; }

double effectiveness(const ScoreState& s) {
    return (1.0 + static_cast<double>(s.success_count)) /
           (2.0 + static_cast<double>(s.success_count) + static_cast<double>(s.failure_count));
}

double utilization(const ScoreState& s) {
    if (s.offered_count == 0) return 0.0;
    return static_cast<double>(s.applied_count) / static_cast<double>(s.offered_count);
}

double freshness(const ScoreState& s, Timestamp now, const ScoringConfig& config) {
    if (now < s.last_observed_at) {
        throw DomainError("clock skew: now " + format_rfc3339(now) +
                          " precedes last observation " + format_rfc3339(s.last_observed_at));
    }
    const double dt = s.last_observed_at.seconds_until(now);
    return std::exp2(-dt / config.half_life_seconds);
}

double composite(const ScoreState& s, Timestamp now, const ScoringConfig& config) {
    if (const auto reason = config.invalid_reason()) {
        throw DomainError("invalid scoring config: " + *reason);
    }
    return config.w_effectiveness * effectiveness(s) + config.w_utilization * utilization(s) +
           config.w_freshness * freshness(s, now, config);
}

EvolutionRecord observe_outcome(const EvolutionRecord& record, Outcome outcome, Timestamp now,
                                const ScoringConfig& config) {
    if (is_terminal(record.status)) {
        throw DomainError("cannot observe an outcome on " + to_string(record.status) +
                          " record " + record.id);
    }
    EvolutionRecord updated = record;
    if (outcome == Outcome::Success) ++updated.score_state.success_count;
    else ++updated.score_state.failure_count;
    updated.score_state.last_observed_at = now;
    updated.score_state.freshness_snapshot = 1.0;
    return recompute_status(updated, now, config);
}

EvolutionRecord record_applied(const EvolutionRecord& record) {
    if (record.score_state.applied_count + 1 > record.score_state.offered_count) {
        throw DomainError("record " + record.id +
                          " applied without being offered (applied would exceed offered)");
    }
    EvolutionRecord updated = record;
    ++updated.score_state.applied_count;
    return updated;
}

EvolutionRecord recompute_status(const EvolutionRecord& record, Timestamp now,
                                 const ScoringConfig& config) {
    if (is_terminal(record.status)) return record;
    EvolutionRecord updated = record;
    const double score = composite(updated.score_state, now, config);
    updated.status =
        score < config.dormancy_threshold ? RecordStatus::Dormant : RecordStatus::Active;
    return updated;
}

std::string render_score_table(const EvolutionExperience& experience,
                               const ScoringConfig& config, Timestamp now) {
    struct Row {
        const EvolutionRecord* rec;
        double e, u, f, s;
    };
    std::vector<Row> rows;
    for (const auto& rec : experience.records) {
        Row row;
        row.rec = &rec;
        row.e = effectiveness(rec.score_state);
        row.u = utilization(rec.score_state);
        row.f = freshness(rec.score_state, now, config);
        row.s = composite(rec.score_state, now, config);
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.s != b.s) return a.s > b.s;
        if (a.rec->created_at != b.rec->created_at) return a.rec->created_at < b.rec->created_at;
        return a.rec->id < b.rec->id;
    });

    std::string out = "id status E U F S\n";
    for (const auto& row : rows) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %.4f %.4f %.4f %.4f", row.e, row.u, row.f, row.s);
        out += row.rec->id + " " + to_string(row.rec->status) + buf + "\n";
    }
    return out;
}

} // namespace swarmskills
