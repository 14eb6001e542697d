#include "swarmskills/simulate.hpp"

#include "swarmskills/codec.hpp"
#include "swarmskills/disclosure.hpp"
#include "swarmskills/errors.hpp"
#include "swarmskills/governance.hpp"
#include "swarmskills/scoring.hpp"
#include "swarmskills/trajectory.hpp"
#include "swarmskills/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

namespace swarmskills {

Scenario load_scenario(const fs::path& path) {
    njson j;
    try {
        j = njson::parse(read_text_file(path));
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid scenario JSON: ") + e.what(), path.string());
    }
    if (!j.is_object()) throw ParseError("scenario must be a JSON object", path.string());

    const fs::path base = path.parent_path();
    Scenario scenario;
    if (!j.contains("skill") || !j["skill"].is_string()) {
        throw ParseError("scenario missing \"skill\"", path.string());
    }
    scenario.skill = j["skill"].get<std::string>();
    if (!j.contains("skills_root") || !j["skills_root"].is_string()) {
        throw ParseError("scenario missing \"skills_root\"", path.string());
    }
    scenario.skills_root = base / j["skills_root"].get<std::string>();
    if (j.contains("budget")) scenario.budget = j["budget"].get<std::int64_t>();
    if (j.contains("seed")) scenario.seed = j["seed"].get<std::uint64_t>();

    if (!j.contains("sessions") || !j["sessions"].is_array()) {
        throw ParseError("scenario missing \"sessions\" array", path.string());
    }
    for (const auto& s : j["sessions"]) {
        if (!s.is_object()) throw ParseError("session must be an object", path.string());
        ScenarioSession session;
        const auto clock = parse_rfc3339(s.value("clock", std::string{}));
        if (!clock) throw ParseError("session missing a valid \"clock\"", path.string());
        session.clock = *clock;
        if (!s.contains("trajectory") || !s["trajectory"].is_string()) {
            throw ParseError("session missing \"trajectory\"", path.string());
        }
        session.trajectory = base / s["trajectory"].get<std::string>();
        session.outcome = s.value("outcome", std::string{"success"});
        if (session.outcome != "success" && session.outcome != "failure") {
            throw ParseError("session outcome must be success or failure", path.string());
        }
        if (s.contains("approvals")) {
            for (const auto& a : s["approvals"]) {
                session.approvals.push_back(a.get<std::string>());
            }
        }
        session.rebuild = s.value("rebuild", false);
        if (s.contains("budget")) session.budget = s["budget"].get<std::int64_t>();
        scenario.sessions.push_back(std::move(session));
    }
    return scenario;
}

namespace {

bool affirmative(const std::string& answer) {
    const std::string a = to_lower(trim(answer));
    return a == "y" || a == "yes";
}

} // namespace

SimulationResult run_scenario(const Scenario& scenario, const ScoringConfig& config) {
    if (const auto reason = config.invalid_reason()) {
        throw DomainError("invalid scoring config: " + *reason);
    }
    const fs::path skill_dir = scenario.skills_root / scenario.skill;

    std::ostringstream out;
    out << "scenario: skill=" << scenario.skill << " sessions=" << scenario.sessions.size()
        << " seed=" << scenario.seed << "\n";

    int session_no = 0;
    Timestamp last_clock{0};
    for (const auto& session : scenario.sessions) {
        ++session_no;
        last_clock = session.clock;
        out << "session " << session_no << " @ " << format_rfc3339(session.clock) << "\n";

        DirectoryLock lock(skill_dir);

        const SkillIndex index = index_skills(scenario.skills_root);
        out << "  index: " << index.entries.size() << " skill(s)\n";

        SwarmSkill skill = parse_skill(skill_dir);
        const std::int64_t budget = session.budget.value_or(scenario.budget);
        LoadResult load = load_skill(skill, config, budget, session.clock);
        out << "  load: stage=" << to_string(load.context.stage)
            << " fragments=" << load.context.fragments.size() << " chars=" << load.context.used()
            << " offered=" << load.context.offered_record_ids.size() << "\n";

        const Trajectory trajectory = parse_trajectory(session.trajectory);

        // USE: honor record_applied events from the replayed trace.
        std::set<std::string> applied;
        for (const auto& event : trajectory.events) {
            if (event.type != EventType::RecordApplied) continue;
            const std::string id = event.payload.value("record_id", std::string{});
            EvolutionRecord* rec = load.experience.find(id);
            if (!rec) {
                throw DomainError("trajectory applies unknown record \"" + id + "\"");
            }
            *rec = record_applied(*rec);
            applied.insert(id);
            out << "  applied: " << id << "\n";
        }

        // Outcomes are attributed to every offered-and-applied record.
        const Outcome outcome =
            session.outcome == "success" ? Outcome::Success : Outcome::Failure;
        int observed = 0;
        for (const auto& id : load.context.offered_record_ids) {
            if (!applied.count(id)) continue;
            EvolutionRecord* rec = load.experience.find(id);
            *rec = observe_outcome(*rec, outcome, session.clock, config);
            ++observed;
        }
        out << "  observed " << session.outcome << " on " << observed << " record(s)\n";
        write_evolutions(skill_dir, load.experience);

        // PATCH: analyze against the persisted state.
        skill = parse_skill(skill_dir);
        const auto findings = analyze_friction(trajectory, skill);
        out << "  analysis: " << findings.size() << " finding(s)\n";
        if (!findings.empty()) {
            const EvolutionExperience before = skill.experience;
            skill.experience = emit_records(findings, skill, session.clock);
            for (std::size_t i = before.records.size(); i < skill.experience.records.size();
                 ++i) {
                const auto& rec = skill.experience.records[i];
                out << "    emitted " << rec.id << " ("
                    << rec.change_directive.action << " -> ";
                for (std::size_t k = 0; k < rec.change_directive.target_files.size(); ++k) {
                    if (k) out << ", ";
                    out << rec.change_directive.target_files[k];
                }
                out << ")\n";
            }
            write_evolutions(skill_dir, skill.experience);
        }

        // Governance: simplify automatically at capacity.
        if (should_govern(skill.experience, config)) {
            out << "  governance: capacity reached (" << skill.experience.non_terminal_count()
                << " non-terminal records >= " << config.simplify_capacity << ") -> SIMPLIFY\n";
            StubCurator curator;
            const SimplifyResult result = simplify(skill, curator, config, session.clock);
            std::size_t merged_members = 0;
            for (const auto& group : result.plan.merges) merged_members += group.size();
            out << "  simplify: " << result.plan.deletions.size() << " deleted, "
                << merged_members << " merged -> " << result.merged_ids.size()
                << " replacement(s), " << result.plan.retentions.size() << " retained\n";
            skill = result.skill;
            write_evolutions(skill_dir, skill.experience);
        }

        if (session.rebuild) {
            bool approved = true;
            if (!session.approvals.empty()) approved = affirmative(session.approvals.front());
            if (!approved) {
                out << "  rebuild: declined\n";
            } else {
                StubRewriter rewriter;
                ArchiveStore store(skill_dir);
                const RebuildResult result = rebuild(skill, rewriter, store, session.clock);
                out << "  rebuild: archived v" << result.archived_version << "; "
                    << result.skill.roles.size() << " roles; experience cleared\n";
            }
        }
    }

    const SwarmSkill final_skill = parse_skill(skill_dir);
    out << "final score @ " << format_rfc3339(last_clock) << "\n";
    out << render_score_table(final_skill.experience, config, last_clock);
    out << "final: roles=" << final_skill.roles.size()
        << " archive_versions=" << ArchiveStore(skill_dir).versions().size()
        << " records=" << final_skill.experience.non_terminal_count() << "\n";

    SimulationResult result;
    result.transcript = out.str();
    result.sessions_run = session_no;
    return result;
}

} // namespace swarmskills
