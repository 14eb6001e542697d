#include "swarmskills/trajectory.hpp"

#include "swarmskills/codec.hpp"
#include "swarmskills/errors.hpp"
#include "swarmskills/util.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

namespace swarmskills {

// ─── Event log ─────────────────────────────────────────────────────

std::string to_string(EventType t) {
    switch (t) {
        case EventType::SpawnRole: return "spawn_role";
        case EventType::Message: return "message";
        case EventType::TaskStart: return "task_start";
        case EventType::TaskEnd: return "task_end";
        case EventType::Dependency: return "dependency";
        case EventType::Feedback: return "feedback";
        case EventType::SkillLoaded: return "skill_loaded";
        case EventType::RecordOffered: return "record_offered";
        case EventType::RecordApplied: return "record_applied";
        case EventType::Outcome: return "outcome";
    }
    return "message";
}

std::optional<EventType> event_type_from_string(const std::string& s) {
    static const std::map<std::string, EventType> table = {
        {"spawn_role", EventType::SpawnRole},
        {"message", EventType::Message},
        {"task_start", EventType::TaskStart},
        {"task_end", EventType::TaskEnd},
        {"dependency", EventType::Dependency},
        {"feedback", EventType::Feedback},
        {"skill_loaded", EventType::SkillLoaded},
        {"record_offered", EventType::RecordOffered},
        {"record_applied", EventType::RecordApplied},
        {"outcome", EventType::Outcome},
    };
    const auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

Trajectory parse_trajectory(const fs::path& path) {
    const std::string text = read_text_file(path);
    Trajectory trajectory;
    trajectory.source = path;

    int lineno = 0;
    std::optional<Timestamp> previous;
    for (const auto& line : split_lines(text)) {
        ++lineno;
        if (trim(line).empty()) continue;

        njson j;
        try {
            j = njson::parse(line);
        } catch (const std::exception& e) {
            throw ParseError(std::string("invalid JSON event: ") + e.what(), path.string(),
                             lineno);
        }
        if (!j.is_object()) throw ParseError("event must be an object", path.string(), lineno);

        TrajectoryEvent event;
        if (!j.contains("at") || !j["at"].is_string()) {
            throw ParseError("event missing \"at\" timestamp", path.string(), lineno);
        }
        const auto at = parse_rfc3339(j["at"].get<std::string>());
        if (!at) {
            throw ParseError("invalid RFC 3339 timestamp: " + j["at"].get<std::string>(),
                             path.string(), lineno);
        }
        event.at = *at;
        if (previous && event.at < *previous) {
            throw ParseError("out-of-order timestamp (events must be non-decreasing)",
                             path.string(), lineno);
        }
        previous = event.at;

        event.actor = j.value("actor", std::string{});
        if (!j.contains("type") || !j["type"].is_string()) {
            throw ParseError("event missing \"type\"", path.string(), lineno);
        }
        const auto type = event_type_from_string(j["type"].get<std::string>());
        if (!type) {
            throw ParseError("unknown event type \"" + j["type"].get<std::string>() + "\"",
                             path.string(), lineno);
        }
        event.type = *type;
        if (j.contains("payload")) {
            if (!j["payload"].is_object()) {
                throw ParseError("payload must be an object", path.string(), lineno);
            }
            event.payload = j["payload"];
        } else {
            event.payload = njson::object();
        }
        trajectory.events.push_back(std::move(event));
    }
    return trajectory;
}

// ─── CREATE detection ──────────────────────────────────────────────

namespace {

// task id -> owning actor, from task_start (task_end fills gaps)
std::map<std::string, std::string> task_owners(const Trajectory& t) {
    std::map<std::string, std::string> owners;
    for (const auto& e : t.events) {
        if (e.type != EventType::TaskStart && e.type != EventType::TaskEnd) continue;
        const std::string task = e.payload.value("task", std::string{});
        if (task.empty() || e.actor.empty()) continue;
        owners.emplace(task, e.actor);
    }
    return owners;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

} // namespace

CreateSignal detect_create_signal(const Trajectory& t) {
    CreateSignal signal;
    std::set<std::string> roles;
    for (const auto& e : t.events) {
        if (e.type == EventType::SpawnRole && !e.actor.empty()) roles.insert(e.actor);
    }
    signal.roles.assign(roles.begin(), roles.end());

    const auto owners = task_owners(t);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : t.events) {
        if (e.type != EventType::Dependency) continue;
        const std::string from = e.payload.value("from_task", std::string{});
        const std::string to = e.payload.value("to_task", std::string{});
        const auto fo = owners.find(from);
        const auto to_it = owners.find(to);
        if (fo == owners.end() || to_it == owners.end()) continue;
        if (fo->second == to_it->second) continue;
        if (seen.insert({from, to}).second) signal.cross_edges.emplace_back(from, to);
    }

    signal.detected = signal.roles.size() >= 2 && !signal.cross_edges.empty();
    std::ostringstream summary;
    if (signal.detected) {
        summary << "create signal: roles [" << join(signal.roles, ", ") << "], "
                << signal.cross_edges.size() << " cross-role dependency edge(s)";
    } else if (signal.roles.size() < 2) {
        summary << "no create signal: fewer than 2 distinct roles spawned (found "
                << signal.roles.size() << ")";
    } else {
        summary << "no create signal: no dependency links tasks owned by different roles";
    }
    signal.summary = summary.str();
    return signal;
}

// ─── Distillation ──────────────────────────────────────────────────

TrajectorySummary summarize_trajectory(const Trajectory& t) {
    TrajectorySummary summary;
    std::set<std::string> seen_roles;
    std::set<std::pair<std::string, std::string>> seen_edges;
    std::set<std::string> seen_categories;
    for (const auto& e : t.events) {
        switch (e.type) {
            case EventType::SpawnRole:
                if (!e.actor.empty() && seen_roles.insert(e.actor).second) {
                    summary.roles.emplace_back(e.actor,
                                               e.payload.value("persona_text", std::string{}));
                }
                break;
            case EventType::Dependency: {
                const std::string from = e.payload.value("from_task", std::string{});
                const std::string to = e.payload.value("to_task", std::string{});
                if (!from.empty() && !to.empty() && seen_edges.insert({from, to}).second) {
                    summary.edges.emplace_back(from, to);
                }
                break;
            }
            case EventType::TaskStart: {
                const std::string category = e.payload.value("category", std::string{});
                if (!category.empty() && seen_categories.insert(category).second) {
                    summary.categories.push_back(category);
                }
                break;
            }
            case EventType::Message:
                ++summary.message_count;
                break;
            default:
                break;
        }
    }

    std::ostringstream text;
    text << "Observed collaboration with " << summary.roles.size() << " role(s), "
         << summary.edges.size() << " dependency edge(s), " << summary.message_count
         << " message(s).\n";
    if (!summary.categories.empty()) {
        text << "Task categories: " << join(summary.categories, ", ") << "\n";
    }
    for (const auto& [id, persona] : summary.roles) {
        text << "role " << id << ":\n" << persona << "\n";
    }
    for (const auto& [from, to] : summary.edges) {
        text << "dependency: " << from << " -> " << to << "\n";
    }
    summary.text = text.str();
    return summary;
}

namespace {

std::string slugify(const std::string& s) {
    std::string out;
    bool dash = false;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
            dash = false;
        } else if (!out.empty() && !dash) {
            out.push_back('-');
            dash = true;
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

std::string mermaid_id(const std::string& s) {
    std::string out;
    for (unsigned char c : s) {
        out.push_back(std::isalnum(c) ? static_cast<char>(c) : '_');
    }
    return out.empty() ? "task" : out;
}

} // namespace

std::map<std::string, std::string> StubSynthesizer::synthesize(const TrajectorySummary& summary) {
    const std::string categories =
        summary.categories.empty() ? "general" : join(summary.categories, ", ");
    const std::string slug =
        summary.categories.empty() ? "workflow" : slugify(join(summary.categories, "-"));
    const std::string name = "distilled-" + (slug.empty() ? "workflow" : slug);

    Frontmatter fm;
    fm.name = name;
    fm.description =
        std::to_string(summary.roles.size()) + "-role workflow: " + categories;
    fm.kind = kSwarmSkillKind;
    fm.teammate_mode = kBuildMode;
    std::vector<RoleDecl> decls;
    for (const auto& [id, persona] : summary.roles) {
        (void)persona;
        decls.push_back(RoleDecl{id, {}, {}, std::nullopt});
    }
    fm.roles = std::move(decls);
    fm.dependencies = std::vector<std::string>{};

    std::string body = "\n# " + name + "\n\nDistilled from an observed " +
                       std::to_string(summary.roles.size()) +
                       "-role collaboration session.\n\nSpawn one teammate per declared role "
                       "and brief it with its persona file:\n\n";
    for (const auto& [id, persona] : summary.roles) {
        (void)persona;
        body += "- roles/" + id + ".md\n";
    }
    body += "\nFollow the dependency order in workflow.md and respect the limits in bind.md.\n";

    std::string workflow = "# Workflow\n\nObserved dependency order:\n\n```mermaid\ngraph TD\n";
    for (const auto& [from, to] : summary.edges) {
        workflow += "  " + mermaid_id(from) + " --> " + mermaid_id(to) + "\n";
    }
    workflow += "```\n";

    std::string bind = "# Execution Bounds\n\n";
    if (summary.message_count > 0) {
        bind += "```bounds\nmax_turns: " + std::to_string(summary.message_count) + "\n```\n";
    } else {
        bind += "No message-turn limit was observed.\n";
    }

    std::map<std::string, std::string> files;
    files["SKILL.md"] = render_skill_md(fm, body);
    for (const auto& [id, persona] : summary.roles) {
        files["roles/" + id + ".md"] = persona;
    }
    files["workflow.md"] = workflow;
    files["bind.md"] = bind;
    files["evolutions.json"] = render_evolutions_json(EvolutionExperience{});
    return files;
}

SwarmSkill distill_candidate(const Trajectory& t, SkillSynthesizer& synthesizer,
                             const fs::path& staging) {
    const CreateSignal signal = detect_create_signal(t);
    if (!signal.detected) throw DomainError(signal.summary);

    const TrajectorySummary summary = summarize_trajectory(t);
    const auto files = synthesizer.synthesize(summary);

    const auto skill_md = files.find("SKILL.md");
    if (skill_md == files.end()) {
        throw DomainError("synthesizer produced no SKILL.md");
    }
    // The frontmatter name decides the staging directory.
    std::string name;
    try {
        name = parse_skill_md_text(skill_md->second, "SKILL.md").first.name_or_empty();
    } catch (const ParseError& e) {
        throw DomainError(std::string("synthesizer produced malformed SKILL.md: ") + e.what());
    }
    if (name.empty()) throw DomainError("synthesizer produced a skill without a name");

    std::error_code ec;
    fs::create_directories(staging, ec);
    fs::path dest = staging / name;
    for (int suffix = 2; fs::exists(dest); ++suffix) {
        dest = staging / (name + "_" + std::to_string(suffix));
    }

    for (const auto& [rel, content] : files) {
        if (!is_safe_relative_path(rel)) {
            throw DomainError("synthesizer produced an unsafe path: " + rel);
        }
        write_text_file(dest / rel, content);
    }

    SwarmSkill candidate = parse_skill(dest);
    const ValidationReport report = validate(candidate, Profile::Swarm);
    if (!report.conformant()) {
        fs::remove_all(dest);
        throw DomainError("synthesizer produced a non-conformant skill: " +
                          report.violations.front().message);
    }
    return candidate;
}

// ─── Dependency cycles ─────────────────────────────────────────────

std::vector<std::vector<std::string>>
find_elementary_cycles(const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<std::string> nodes;
    {
        std::set<std::string> names;
        for (const auto& [from, to] : edges) {
            names.insert(from);
            names.insert(to);
        }
        nodes.assign(names.begin(), names.end());
    }
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = static_cast<int>(i);

    std::vector<std::set<int>> adj(nodes.size());
    for (const auto& [from, to] : edges) adj[index[from]].insert(index[to]);

    // Each elementary cycle is discovered exactly once: paths start at their
    // smallest vertex and may only visit larger ones.
    std::vector<std::vector<std::string>> cycles;
    std::vector<int> path;
    std::vector<bool> on_path(nodes.size(), false);

    auto dfs = [&](auto&& self, int start, int u) -> void {
        for (int v : adj[u]) {
            if (v == start) {
                std::vector<std::string> cycle;
                for (int p : path) cycle.push_back(nodes[p]);
                cycles.push_back(std::move(cycle));
            } else if (v > start && !on_path[v]) {
                on_path[v] = true;
                path.push_back(v);
                self(self, start, v);
                path.pop_back();
                on_path[v] = false;
            }
        }
    };

    for (int start = 0; start < static_cast<int>(nodes.size()); ++start) {
        path = {start};
        std::fill(on_path.begin(), on_path.end(), false);
        on_path[start] = true;
        dfs(dfs, start, start);
    }
    std::sort(cycles.begin(), cycles.end());
    return cycles;
}

// ─── PATCH detection ───────────────────────────────────────────────

std::string to_string(FrictionKind k) {
    switch (k) {
        case FrictionKind::CircularDependency: return "circular_dependency";
        case FrictionKind::RedundantCommunication: return "redundant_communication";
        case FrictionKind::PrematureTermination: return "premature_termination";
        case FrictionKind::RoleCoupling: return "role_coupling";
        case FrictionKind::ExplicitSignal: return "explicit_signal";
    }
    return "explicit_signal";
}

namespace {

// "copywriting" -> "copywriter"; otherwise the category label verbatim.
std::string role_id_for_category(const std::string& category) {
    if (category.size() > 4 && category.ends_with("ing")) {
        return category.substr(0, category.size() - 3) + "er";
    }
    return category;
}

std::string payload_text(const njson& payload) {
    std::string out;
    for (const auto& [key, value] : payload.items()) {
        (void)key;
        if (value.is_string()) {
            out += value.get<std::string>();
            out += "\n";
        }
    }
    return out;
}

} // namespace

std::vector<FrictionFinding> analyze_friction(const Trajectory& t, const SwarmSkill& skill,
                                              const DetectorConfig& config) {
    bool loaded = false;
    for (const auto& e : t.events) {
        if (e.type == EventType::SkillLoaded &&
            e.payload.value("skill", std::string{}) == skill.name()) {
            loaded = true;
            break;
        }
    }
    if (!loaded) {
        throw DomainError("trajectory has no skill_loaded event naming \"" + skill.name() +
                          "\"");
    }

    std::vector<FrictionFinding> findings;

    // circular_dependency
    {
        std::vector<std::pair<std::string, std::string>> edges;
        std::map<std::pair<std::string, std::string>, std::size_t> first_index;
        for (std::size_t i = 0; i < t.events.size(); ++i) {
            const auto& e = t.events[i];
            if (e.type != EventType::Dependency) continue;
            const std::string from = e.payload.value("from_task", std::string{});
            const std::string to = e.payload.value("to_task", std::string{});
            if (from.empty() || to.empty()) continue;
            if (first_index.emplace(std::make_pair(from, to), i).second) {
                edges.emplace_back(from, to);
            }
        }
        for (const auto& cycle : find_elementary_cycles(edges)) {
            FrictionFinding finding;
            finding.kind = FrictionKind::CircularDependency;
            for (std::size_t i = 0; i < cycle.size(); ++i) {
                const auto& from = cycle[i];
                const auto& to = cycle[(i + 1) % cycle.size()];
                finding.evidence.push_back(first_index.at({from, to}));
            }
            std::sort(finding.evidence.begin(), finding.evidence.end());
            std::string chain = join(cycle, " -> ") + " -> " + cycle.front();
            finding.summary = "tasks form a dependency cycle: " + chain;
            finding.proposed_directive =
                ChangeDirective{{"workflow.md"},
                                action::kInsert,
                                "Break the dependency cycle " + chain +
                                    ": define a strict hand-off order for these tasks."};
            findings.push_back(std::move(finding));
        }
    }

    // redundant_communication
    {
        struct Group {
            std::vector<std::size_t> indices;
            std::string actor;
            std::string to;
        };
        std::map<std::string, Group> groups;
        std::vector<std::string> group_order;
        for (std::size_t i = 0; i < t.events.size(); ++i) {
            const auto& e = t.events[i];
            if (e.type != EventType::Message) continue;
            const std::string to = e.payload.value("to", std::string{});
            const std::string key =
                e.actor + "\x01" + to + "\x01" + normalize_text(e.payload.value("text", std::string{}));
            auto [it, inserted] = groups.try_emplace(key);
            if (inserted) {
                it->second.actor = e.actor;
                it->second.to = to;
                group_order.push_back(key);
            }
            it->second.indices.push_back(i);
        }
        for (const auto& key : group_order) {
            const Group& g = groups.at(key);
            if (static_cast<int>(g.indices.size()) < config.redundancy_threshold) continue;
            FrictionFinding finding;
            finding.kind = FrictionKind::RedundantCommunication;
            finding.evidence = g.indices;
            finding.summary = g.actor + " sent " + std::to_string(g.indices.size()) +
                              " identical messages to " + g.to;
            finding.proposed_directive =
                ChangeDirective{{"workflow.md"},
                                action::kInsert,
                                "Replace repeated messages from " + g.actor + " to " + g.to +
                                    " with a single consolidated update."};
            findings.push_back(std::move(finding));
        }
    }

    // premature_termination
    {
        std::optional<std::size_t> success_at;
        for (std::size_t i = 0; i < t.events.size(); ++i) {
            const auto& e = t.events[i];
            if (e.type == EventType::Outcome &&
                e.payload.value("status", std::string{}) == "success") {
                success_at = i;
                break;
            }
        }
        if (success_at && skill.bounds) {
            std::string task_end_text;
            for (const auto& e : t.events) {
                if (e.type == EventType::TaskEnd) task_end_text += payload_text(e.payload);
            }
            for (const auto& gate : skill.bounds->quality_gates) {
                if (task_end_text.find(gate) != std::string::npos) continue;
                FrictionFinding finding;
                finding.kind = FrictionKind::PrematureTermination;
                finding.evidence = {*success_at};
                finding.summary =
                    "outcome reported success but quality gate \"" + gate + "\" never surfaced";
                finding.proposed_directive =
                    ChangeDirective{{"workflow.md"},
                                    action::kInsert,
                                    "Ensure quality gate \"" + gate +
                                        "\" is explicitly verified by a task before completion."};
                findings.push_back(std::move(finding));
            }
        }
    }

    // role_coupling
    {
        struct ActorLoad {
            std::vector<std::string> categories;
            std::vector<std::size_t> indices;
        };
        std::map<std::string, ActorLoad> by_actor;
        std::vector<std::string> actor_order;
        for (std::size_t i = 0; i < t.events.size(); ++i) {
            const auto& e = t.events[i];
            if (e.type != EventType::TaskStart || e.actor.empty()) continue;
            const std::string category = e.payload.value("category", std::string{});
            if (category.empty()) continue;
            auto [it, inserted] = by_actor.try_emplace(e.actor);
            if (inserted) actor_order.push_back(e.actor);
            auto& load = it->second;
            if (std::find(load.categories.begin(), load.categories.end(), category) ==
                load.categories.end()) {
                load.categories.push_back(category);
            }
            load.indices.push_back(i);
        }
        for (const auto& actor : actor_order) {
            const ActorLoad& load = by_actor.at(actor);
            if (load.categories.size() < 2) continue;
            const std::string& primary = load.categories[0];
            const std::string& split = load.categories[1];
            const std::string new_role = role_id_for_category(split);
            FrictionFinding finding;
            finding.kind = FrictionKind::RoleCoupling;
            finding.evidence = load.indices;
            finding.summary = actor + " owns tasks in disjoint categories: " +
                              join(load.categories, ", ");
            finding.proposed_directive = ChangeDirective{
                {"roles/" + new_role + ".md", "workflow.md"},
                action::kSplitRole,
                "Create a dedicated '" + new_role + "' role for " + split +
                    " work. Update the workflow to run " + split + " in parallel with " +
                    primary + "."};
            findings.push_back(std::move(finding));
        }
    }

    // explicit_signal
    for (std::size_t i = 0; i < t.events.size(); ++i) {
        const auto& e = t.events[i];
        if (e.type != EventType::Feedback) continue;
        const std::string text = e.payload.value("text", std::string{});
        FrictionFinding finding;
        finding.kind = FrictionKind::ExplicitSignal;
        finding.evidence = {i};
        finding.summary = "explicit feedback from " + (e.actor.empty() ? "user" : e.actor);
        finding.proposed_directive = ChangeDirective{{"workflow.md"}, action::kInsert, text};
        findings.push_back(std::move(finding));
    }

    return findings;
}

EvolutionExperience emit_records(const std::vector<FrictionFinding>& findings,
                                 const SwarmSkill& skill, Timestamp now) {
    EvolutionExperience experience = skill.experience;
    const std::string date = utc_compact_date(now);
    int seq = 0;
    auto next_id = [&]() {
        char buf[32];
        do {
            ++seq;
            std::snprintf(buf, sizeof(buf), "evo_%s_%03d", date.c_str(), seq);
        } while (experience.contains(buf));
        return std::string(buf);
    };

    for (const auto& finding : findings) {
        EvolutionRecord record;
        record.id = next_id();
        record.created_at = now;
        std::string evidence = "events ";
        for (std::size_t i = 0; i < finding.evidence.size(); ++i) {
            if (i) evidence += ", ";
            evidence += std::to_string(finding.evidence[i]);
        }
        record.context = to_string(finding.kind) + ": " + finding.summary + " (" + evidence + ")";
        record.change_directive = finding.proposed_directive;
        record.score_state = new_score_state(now);
        record.status = RecordStatus::Active;
        experience.records.push_back(std::move(record));
    }
    return experience;
}

} // namespace swarmskills
