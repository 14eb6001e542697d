#include "swarmskills/disclosure.hpp"

#include "swarmskills/errors.hpp"
#include "swarmskills/scoring.hpp"

#include <algorithm>
#include <numeric>

namespace swarmskills {

std::string to_string(DisclosureStage s) {
    switch (s) {
        case DisclosureStage::Metadata: return "metadata";
        case DisclosureStage::Body: return "body";
        case DisclosureStage::Full: return "full";
    }
    return "body";
}

std::int64_t DisclosureContext::used() const {
    return std::accumulate(fragments.begin(), fragments.end(), std::int64_t{0},
                           [](std::int64_t acc, const Fragment& f) {
                               return acc + static_cast<std::int64_t>(f.text.size());
                           });
}

std::string load_metadata(const SkillIndex& index) {
    std::string digest;
    for (const auto& entry : index.entries) {
        digest += entry.name + " — " + entry.description + "\n";
    }
    return digest;
}

std::string render_record_fragment(const EvolutionRecord& record) {
    std::string targets;
    for (std::size_t i = 0; i < record.change_directive.target_files.size(); ++i) {
        if (i) targets += ", ";
        targets += record.change_directive.target_files[i];
    }
    return "[evolution " + record.id + "] " + record.context + "\n" +
           record.change_directive.action + " -> " + targets + "\n" +
           record.change_directive.content + "\n";
}

LoadResult load_skill(const SwarmSkill& skill, const ScoringConfig& config, std::int64_t budget,
                      Timestamp now) {
    if (budget <= 0) throw DomainError("disclosure budget must be positive");

    LoadResult result;
    result.experience = skill.experience;
    result.context.budget = budget;

    // Fixed fragment sequence; the loaded set is always a prefix of it, so a
    // larger budget can only extend what a smaller one produced.
    std::vector<Fragment> sequence;
    sequence.push_back({"SKILL.md", skill.body});
    for (const auto& role : skill.frontmatter.declared_roles()) {
        const auto it = skill.roles.find(role.id);
        if (it != skill.roles.end()) {
            sequence.push_back({"roles/" + role.id + ".md", it->second});
        }
    }
    if (skill.workflow) sequence.push_back({"workflow.md", *skill.workflow});
    if (skill.bounds) sequence.push_back({"bind.md", skill.bounds->raw_text});
    const std::size_t base_count = sequence.size();

    // Dormancy is recomputed at load time; only active records are offered.
    for (auto& rec : result.experience.records) {
        rec = recompute_status(rec, now, config);
    }
    struct Ranked {
        const EvolutionRecord* rec;
        double score;
    };
    std::vector<Ranked> active;
    for (const auto& rec : result.experience.records) {
        if (rec.status == RecordStatus::Active) {
            active.push_back({&rec, composite(rec.score_state, now, config)});
        }
    }
    std::stable_sort(active.begin(), active.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.rec->created_at != b.rec->created_at) return a.rec->created_at < b.rec->created_at;
        return a.rec->id < b.rec->id;
    });

    std::vector<std::string> record_order;
    for (const auto& ranked : active) {
        sequence.push_back(
            {"evolutions.json#" + ranked.rec->id, render_record_fragment(*ranked.rec)});
        record_order.push_back(ranked.rec->id);
    }

    if (static_cast<std::int64_t>(sequence.front().text.size()) > budget) {
        throw DomainError("budget below minimum disclosure (SKILL.md body alone is " +
                          std::to_string(sequence.front().text.size()) + " > " +
                          std::to_string(budget) + ")");
    }

    std::int64_t used = 0;
    std::size_t included = 0;
    for (const auto& frag : sequence) {
        const auto size = static_cast<std::int64_t>(frag.text.size());
        if (used + size > budget) break;
        used += size;
        result.context.fragments.push_back(frag);
        ++included;
    }

    result.context.stage =
        included >= base_count ? DisclosureStage::Full : DisclosureStage::Body;

    for (std::size_t i = base_count; i < included; ++i) {
        const std::string& id = record_order[i - base_count];
        result.context.offered_record_ids.push_back(id);
        ++result.experience.find(id)->score_state.offered_count;
    }
    return result;
}

} // namespace swarmskills
