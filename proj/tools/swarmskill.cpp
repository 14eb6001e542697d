// swarmskill — portable multi-agent skill assets: validate, load, score,
// analyze, distill, and govern them from the command line.

#include "swarmskills/codec.hpp"
#include "swarmskills/disclosure.hpp"
#include "swarmskills/errors.hpp"
#include "swarmskills/governance.hpp"
#include "swarmskills/scoring.hpp"
#include "swarmskills/simulate.hpp"
#include "swarmskills/trajectory.hpp"
#include "swarmskills/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace swarmskills;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitParse = 2;

struct CliConfig {
    fs::path skills_root;
    ScoringConfig scoring;
    bool interactive = false;
    std::optional<Timestamp> clock_override;
};

Timestamp wall_clock() {
    return Timestamp{std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count()};
}

Timestamp resolve_now(const CliConfig& config, const std::string& now_flag) {
    if (!now_flag.empty()) {
        const auto t = parse_rfc3339(now_flag);
        if (!t) throw ParseError("invalid --now timestamp: " + now_flag);
        return *t;
    }
    if (config.clock_override) return *config.clock_override;
    return wall_clock();
}

void load_config_file(CliConfig& config, const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid config JSON: ") + e.what(), path.string());
    }
    if (j.contains("skills_root")) config.skills_root = j["skills_root"].get<std::string>();
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        if (w.contains("effectiveness")) config.scoring.w_effectiveness = w["effectiveness"];
        if (w.contains("utilization")) config.scoring.w_utilization = w["utilization"];
        if (w.contains("freshness")) config.scoring.w_freshness = w["freshness"];
    }
    if (j.contains("half_life_days")) {
        config.scoring.half_life_seconds = days(j["half_life_days"].get<double>());
    }
    if (j.contains("dormancy_threshold")) {
        config.scoring.dormancy_threshold = j["dormancy_threshold"];
    }
    if (j.contains("simplify_capacity")) {
        config.scoring.simplify_capacity = j["simplify_capacity"];
    }
    if (const auto reason = config.scoring.invalid_reason()) {
        throw ParseError("invalid scoring config: " + *reason, path.string());
    }
}

bool ask(const std::string& prompt) {
    std::cout << prompt << " [y/n] " << std::flush;
    std::string answer;
    if (!std::getline(std::cin, answer)) return false;
    const std::string a = to_lower(trim(answer));
    return a == "y" || a == "yes";
}

void print_report(const ValidationReport& report) {
    for (const auto& v : report.violations) {
        std::cout << to_string(v.severity) << " " << v.path << ": " << v.message << "\n";
    }
    std::cout << to_string(report.profile) << ": " << report.error_count() << " error(s), "
              << report.warning_count() << " warning(s)\n";
}

std::string describe_finding(const FrictionFinding& finding) {
    std::string targets;
    for (std::size_t i = 0; i < finding.proposed_directive.target_files.size(); ++i) {
        if (i) targets += ", ";
        targets += finding.proposed_directive.target_files[i];
    }
    return to_string(finding.kind) + ": " + finding.summary + " -> " +
           finding.proposed_directive.action + " [" + targets + "]";
}

// ─── Subcommands ───────────────────────────────────────────────────

int cmd_validate(const fs::path& dir, const std::string& profile_name) {
    const Profile profile =
        profile_name == "degraded" ? Profile::DegradedSingleAgent : Profile::Swarm;
    const SwarmSkill skill = parse_skill(dir);
    const ValidationReport report = validate(skill, profile);
    print_report(report);
    return report.conformant() ? kExitOk : kExitDomain;
}

int cmd_score(const CliConfig& config, const fs::path& dir, const std::string& now_flag) {
    const SwarmSkill skill = parse_skill(dir);
    const Timestamp now = resolve_now(config, now_flag);
    std::cout << render_score_table(skill.experience, config.scoring, now);
    return kExitOk;
}

int cmd_index(const CliConfig& config, fs::path root) {
    if (root.empty()) root = config.skills_root;
    if (root.empty()) throw DomainError("no skills root given (flag, config, or env)");
    const SkillIndex index = index_skills(root);
    std::cout << load_metadata(index);
    for (const auto& warning : index.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    return kExitOk;
}

int cmd_load(const CliConfig& config, const fs::path& dir, std::int64_t budget,
             const std::string& now_flag) {
    const SwarmSkill skill = parse_skill(dir);
    const Timestamp now = resolve_now(config, now_flag);
    DirectoryLock lock(dir);
    const LoadResult result = load_skill(skill, config.scoring, budget, now);
    write_evolutions(dir, result.experience);
    std::cout << "stage: " << to_string(result.context.stage) << "\n";
    for (const auto& fragment : result.context.fragments) {
        std::cout << fragment.source << " (" << fragment.text.size() << " chars)\n";
    }
    std::cout << "offered: " << result.context.offered_record_ids.size() << " record(s), "
              << result.context.used() << "/" << budget << " chars used\n";
    return kExitOk;
}

int cmd_analyze(const CliConfig& config, const fs::path& trajectory_path, const fs::path& dir,
                const std::string& now_flag) {
    const SwarmSkill skill = parse_skill(dir);
    const Trajectory trajectory = parse_trajectory(trajectory_path);
    const Timestamp now = resolve_now(config, now_flag);

    const auto findings = analyze_friction(trajectory, skill);
    if (findings.empty()) {
        std::cout << "no findings\n";
        return kExitOk;
    }

    std::vector<FrictionFinding> accepted;
    for (const auto& finding : findings) {
        std::cout << "finding " << describe_finding(finding) << "\n";
        if (config.interactive && !ask("append this record?")) {
            std::cout << "skipped\n";
            continue;
        }
        accepted.push_back(finding);
    }

    const EvolutionExperience before = skill.experience;
    const EvolutionExperience updated = emit_records(accepted, skill, now);
    {
        DirectoryLock lock(dir);
        write_evolutions(dir, updated);
    }
    for (std::size_t i = before.records.size(); i < updated.records.size(); ++i) {
        std::cout << "appended " << updated.records[i].id << "\n";
    }
    if (should_govern(updated, config.scoring)) {
        std::cout << "warning: capacity reached (" << updated.non_terminal_count()
                  << " non-terminal records >= " << config.scoring.simplify_capacity
                  << "); consider running simplify\n";
    }
    return kExitOk;
}

int cmd_distill(const fs::path& trajectory_path, const fs::path& staging) {
    const Trajectory trajectory = parse_trajectory(trajectory_path);
    StubSynthesizer synthesizer;
    const SwarmSkill candidate = distill_candidate(trajectory, synthesizer, staging);
    std::cout << "staged: " << candidate.source_dir.string() << "\n";
    return kExitOk;
}

int cmd_simplify(const CliConfig& config, const fs::path& dir, const std::string& now_flag) {
    const SwarmSkill skill = parse_skill(dir);
    const Timestamp now = resolve_now(config, now_flag);
    DirectoryLock lock(dir);
    StubCurator curator;
    const SimplifyResult result = simplify(skill, curator, config.scoring, now);
    write_evolutions(dir, result.skill.experience);
    std::size_t merged_members = 0;
    for (const auto& group : result.plan.merges) merged_members += group.size();
    std::cout << "simplify: " << result.plan.deletions.size() << " deleted, " << merged_members
              << " merged -> " << result.merged_ids.size() << " replacement(s), "
              << result.plan.refinements.size() << " refined, "
              << result.plan.retentions.size() << " retained; "
              << result.skill.experience.non_terminal_count() << " non-terminal record(s)\n";
    return kExitOk;
}

int cmd_rebuild(const CliConfig& config, const fs::path& dir, const std::string& now_flag,
                bool include_dormant) {
    const SwarmSkill skill = parse_skill(dir);
    const Timestamp now = resolve_now(config, now_flag);

    int active = 0;
    for (const auto& rec : skill.experience.records) {
        if (rec.status == RecordStatus::Active) ++active;
    }
    if (config.interactive) {
        std::cout << "rebuild will fold " << active << " active record(s) into the base files";
        for (const auto& rec : skill.experience.records) {
            if (rec.status != RecordStatus::Active) continue;
            std::cout << "\n  " << rec.id << " " << rec.change_directive.action;
        }
        std::cout << "\n";
        if (!ask("proceed?")) {
            std::cout << "rebuild declined\n";
            return kExitOk;
        }
    }

    DirectoryLock lock(dir);
    StubRewriter rewriter;
    ArchiveStore store(dir);
    RebuildOptions options;
    options.include_dormant = include_dormant;
    const RebuildResult result = rebuild(skill, rewriter, store, now, options);
    std::cout << "archived v" << result.archived_version << "; " << result.skill.roles.size()
              << " roles; experience cleared\n";
    return kExitOk;
}

int cmd_rollback(const CliConfig& config, const fs::path& dir, int version,
                 const std::string& now_flag) {
    const Timestamp now = resolve_now(config, now_flag);
    DirectoryLock lock(dir);
    ArchiveStore store(dir);
    const SwarmSkill restored = rollback(dir, store, version, now);
    std::cout << "restored v" << version << "; " << restored.roles.size() << " roles\n";
    return kExitOk;
}

int cmd_simulate(const CliConfig& config, const fs::path& scenario_path) {
    const Scenario scenario = load_scenario(scenario_path);
    const SimulationResult result = run_scenario(scenario, config.scoring);
    std::cout << result.transcript;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swarm Skills: portable, self-evolving multi-agent skill assets"};
    app.require_subcommand(1);

    CliConfig config;
    if (const char* env_root = std::getenv("SWARMSKILL_SKILLS_ROOT")) {
        config.skills_root = env_root;
    }

    std::string config_path;
    std::string clock_override;
    app.add_option("--config", config_path, "JSON config file (skills_root, weights, ...)");
    app.add_option("--clock-override", clock_override,
                   "fixed RFC 3339 timestamp for every clock-dependent command");
    app.add_flag("--interactive", config.interactive,
                 "ask for confirmation before appending records or rebuilding");

    std::string dir, profile = "swarm", now_flag, trajectory_path, staging = "staging";
    std::string scenario_path, root;
    std::int64_t budget = 0;
    int version = 0;
    bool include_dormant = false;

    auto* validate_cmd = app.add_subcommand("validate", "check conformance under a profile");
    validate_cmd->add_option("dir", dir)->required();
    validate_cmd->add_option("--profile", profile)->check(CLI::IsMember({"swarm", "degraded"}));

    auto* score_cmd = app.add_subcommand("score", "score table for the evolution records");
    score_cmd->add_option("dir", dir)->required();
    score_cmd->add_option("--now", now_flag, "RFC 3339 evaluation time");

    auto* index_cmd = app.add_subcommand("index", "one-line digest per skill under a root");
    index_cmd->add_option("root", root);

    auto* load_cmd = app.add_subcommand("load", "progressive disclosure under a budget");
    load_cmd->add_option("dir", dir)->required();
    load_cmd->add_option("--budget", budget, "character budget")->required();
    load_cmd->add_option("--now", now_flag);

    auto* analyze_cmd = app.add_subcommand("analyze", "detect friction and append records");
    analyze_cmd->add_option("trajectory", trajectory_path)->required();
    analyze_cmd->add_option("--skill", dir)->required();
    analyze_cmd->add_option("--now", now_flag);

    auto* distill_cmd = app.add_subcommand("distill", "distill a candidate skill from a trace");
    distill_cmd->add_option("trajectory", trajectory_path)->required();
    distill_cmd->add_option("--staging", staging);

    auto* simplify_cmd = app.add_subcommand("simplify", "prune and merge evolution records");
    simplify_cmd->add_option("dir", dir)->required();
    simplify_cmd->add_option("--now", now_flag);

    auto* rebuild_cmd = app.add_subcommand("rebuild", "fold active records into the base files");
    rebuild_cmd->add_option("dir", dir)->required();
    rebuild_cmd->add_option("--now", now_flag);
    rebuild_cmd->add_flag("--include-dormant", include_dormant,
                          "fold dormant records too instead of discarding them");

    auto* rollback_cmd = app.add_subcommand("rollback", "restore an archived version");
    rollback_cmd->add_option("dir", dir)->required();
    rollback_cmd->add_option("--to", version, "archive version")->required();
    rollback_cmd->add_option("--now", now_flag);

    auto* simulate_cmd = app.add_subcommand("simulate", "replay a scripted lifecycle scenario");
    simulate_cmd->add_option("scenario", scenario_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) load_config_file(config, config_path);
        if (!clock_override.empty()) {
            const auto t = parse_rfc3339(clock_override);
            if (!t) throw ParseError("invalid --clock-override timestamp: " + clock_override);
            config.clock_override = t;
        }

        if (validate_cmd->parsed()) return cmd_validate(dir, profile);
        if (score_cmd->parsed()) return cmd_score(config, dir, now_flag);
        if (index_cmd->parsed()) return cmd_index(config, root);
        if (load_cmd->parsed()) return cmd_load(config, dir, budget, now_flag);
        if (analyze_cmd->parsed()) return cmd_analyze(config, trajectory_path, dir, now_flag);
        if (distill_cmd->parsed()) return cmd_distill(trajectory_path, staging);
        if (simplify_cmd->parsed()) return cmd_simplify(config, dir, now_flag);
        if (rebuild_cmd->parsed()) return cmd_rebuild(config, dir, now_flag, include_dormant);
        if (rollback_cmd->parsed()) return cmd_rollback(config, dir, version, now_flag);
        if (simulate_cmd->parsed()) return cmd_simulate(config, scenario_path);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}
