#pragma once

#include "swarmskills/model.hpp"

namespace swarmskills {

enum class Outcome { Success, Failure };

std::string to_string(Outcome o);

// Beta(1,1)-smoothed success rate: (1 + successes) / (2 + successes + failures).
double effectiveness(const ScoreState& s);

// applied / offered, 0 when never offered.
double utilization(const ScoreState& s);

// 2^(-dt / half_life) with dt = now - last_observed_at.
// Throws DomainError when now precedes last_observed_at (clock skew).
double freshness(const ScoreState& s, Timestamp now, const ScoringConfig& config);

// w_E*E + w_U*U + w_F*F. Throws DomainError on an invalid config.
double composite(const ScoreState& s, Timestamp now, const ScoringConfig& config);

// Counts the outcome, moves last_observed_at to now, resets the freshness
// snapshot, and recomputes dormancy. Throws DomainError on terminal records.
EvolutionRecord observe_outcome(const EvolutionRecord& record, Outcome outcome,
                                Timestamp now, const ScoringConfig& config);

// Bumps applied_count. Throws DomainError when it would exceed offered_count
// (applied without offered is protocol misuse).
EvolutionRecord record_applied(const EvolutionRecord& record);

// active <-> dormant against the composite at `now`; terminal records are
// returned unchanged. Idempotent for a fixed `now`.
EvolutionRecord recompute_status(const EvolutionRecord& record, Timestamp now,
                                 const ScoringConfig& config);

// One row per record — id, status, E, U, F, S to four decimals — sorted by
// composite descending (ties: older created_at first). Header only when empty.
std::string render_score_table(const EvolutionExperience& experience,
                               const ScoringConfig& config, Timestamp now);

} // namespace swarmskills
