#pragma once

#include "swarmskills/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace swarmskills {

// One scripted session of the CREATE/USE/PATCH loop.
struct ScenarioSession {
    Timestamp clock;
    std::filesystem::path trajectory; // resolved against the scenario file
    std::string outcome;              // "success" | "failure"
    std::vector<std::string> approvals;
    bool rebuild = false;
    std::optional<std::int64_t> budget;
};

struct Scenario {
    std::filesystem::path skills_root;
    std::string skill;
    std::int64_t budget = 1000000;
    std::uint64_t seed = 0;
    std::vector<ScenarioSession> sessions;
};

// Throws ParseError on malformed scenario files.
Scenario load_scenario(const std::filesystem::path& path);

struct SimulationResult {
    std::string transcript;
    int sessions_run = 0;
};

// Replays every session: index, load (offered bookkeeping), replay
// record_applied events, observe the outcome on offered-and-applied records,
// analyze friction, then govern (simplify at capacity, scripted rebuilds).
// Fully deterministic: clocks come from the scenario, every listing is
// sorted, and the declared seed is echoed in the transcript.
SimulationResult run_scenario(const Scenario& scenario, const ScoringConfig& config);

} // namespace swarmskills
