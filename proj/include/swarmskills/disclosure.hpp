#pragma once

#include "swarmskills/codec.hpp"
#include "swarmskills/model.hpp"

#include <string>
#include <vector>

namespace swarmskills {

enum class DisclosureStage { Metadata, Body, Full };

std::string to_string(DisclosureStage s);

struct Fragment {
    std::string source; // relative path, or "evolutions.json#<id>" for records
    std::string text;
};

struct DisclosureContext {
    DisclosureStage stage = DisclosureStage::Body;
    std::int64_t budget = 0;
    std::vector<Fragment> fragments;
    std::vector<std::string> offered_record_ids;

    std::int64_t used() const;
};

struct LoadResult {
    DisclosureContext context;
    // Copy of the skill's experience with offered_count bumped for every
    // appended record and load-time dormancy flips applied. The caller
    // persists it under the directory lock.
    EvolutionExperience experience;
};

// One "name — description" line per index entry. Metadata stage is exempt
// from any budget.
std::string load_metadata(const SkillIndex& index);

// Fragment order: SKILL.md body, declared roles/<id>.md, workflow.md,
// bind.md, then active evolution records by composite score descending
// (ties: older created_at first). The loaded set is the longest prefix that
// fits the character budget. Throws DomainError when even the body does not
// fit, and on budget <= 0.
LoadResult load_skill(const SwarmSkill& skill, const ScoringConfig& config,
                      std::int64_t budget, Timestamp now);

// The text appended to the context for one record.
std::string render_record_fragment(const EvolutionRecord& record);

} // namespace swarmskills
