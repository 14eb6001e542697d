#include "swarmskills/codec.hpp"
#include "swarmskills/errors.hpp"
#include "swarmskills/trajectory.hpp"
#include "swarmskills/util.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

namespace fs = std::filesystem;
using namespace swarmskills;
using namespace testsupport;

namespace {

const Timestamp kT0 = *parse_rfc3339("2026-04-30T10:00:00Z");

fs::path write_log(const std::string& name, const std::string& content) {
    const auto dir = fresh_temp_dir("traj");
    const auto path = dir / name;
    write_text_file(path, content);
    return path;
}

TrajectoryEvent event(const std::string& at, const std::string& actor, EventType type,
                      nlohmann::ordered_json payload) {
    TrajectoryEvent e;
    e.at = *parse_rfc3339(at);
    e.actor = actor;
    e.type = type;
    e.payload = std::move(payload);
    return e;
}

// minimal two-role trace with one cross-role dependency
Trajectory minimal_pair() {
    Trajectory t;
    t.events.push_back(event("2026-04-30T09:00:00Z", "planner", EventType::SpawnRole,
                             {{"persona_text", "Planner persona."}}));
    t.events.push_back(event("2026-04-30T09:00:01Z", "builder", EventType::SpawnRole,
                             {{"persona_text", "Builder persona."}}));
    t.events.push_back(event("2026-04-30T09:01:00Z", "planner", EventType::TaskStart,
                             {{"task", "plan"}, {"category", "planning"}}));
    t.events.push_back(event("2026-04-30T09:02:00Z", "builder", EventType::TaskStart,
                             {{"task", "build"}, {"category", "construction"}}));
    t.events.push_back(event("2026-04-30T09:02:30Z", "leader", EventType::Dependency,
                             {{"from_task", "plan"}, {"to_task", "build"}}));
    t.events.push_back(event("2026-04-30T09:03:00Z", "planner", EventType::Message,
                             {{"to", "builder"}, {"text", "plan ready"}}));
    t.events.push_back(event("2026-04-30T09:04:00Z", "leader", EventType::Outcome,
                             {{"status", "success"}}));
    return t;
}

} // namespace

TEST_CASE("the travel session log parses with five role spawns") {
    const Trajectory t =
        parse_trajectory(fixtures_dir() / "trajectories" / "travel_session1.jsonl");
    int spawns = 0;
    for (const auto& e : t.events) spawns += e.type == EventType::SpawnRole;
    CHECK(spawns == 5);
    CHECK(t.events.size() == 26);
}

TEST_CASE("empty and blank files are empty trajectories") {
    CHECK(parse_trajectory(write_log("empty.jsonl", "")).events.empty());
    CHECK(parse_trajectory(write_log("blank.jsonl", "\n\n")).events.empty());
}

TEST_CASE("trajectory parse failures carry line numbers") {
    const std::string good =
        R"({"at":"2026-04-30T09:00:00Z","actor":"a","type":"message","payload":{}})";
    const std::string earlier =
        R"({"at":"2026-04-30T08:00:00Z","actor":"a","type":"message","payload":{}})";

    try {
        parse_trajectory(write_log("order.jsonl", good + "\n" + earlier + "\n"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("out-of-order") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_trajectory(write_log(
                        "type.jsonl",
                        R"({"at":"2026-04-30T09:00:00Z","actor":"a","type":"mystery"})" "\n")),
                    ParseError);
    CHECK_THROWS_AS(parse_trajectory(write_log("json.jsonl", "{not json}\n")), ParseError);
    CHECK_THROWS_AS(parse_trajectory(write_log(
                        "time.jsonl", R"({"at":"soon","actor":"a","type":"message"})" "\n")),
                    ParseError);
}

TEST_CASE("create signal truth table") {
    // both conjuncts hold
    CHECK(detect_create_signal(minimal_pair()).detected);

    // roles but no dependencies
    Trajectory no_deps;
    no_deps.events.push_back(event("2026-04-30T09:00:00Z", "a", EventType::SpawnRole, {}));
    no_deps.events.push_back(event("2026-04-30T09:00:01Z", "b", EventType::SpawnRole, {}));
    no_deps.events.push_back(event("2026-04-30T09:00:02Z", "c", EventType::SpawnRole, {}));
    const auto nd = detect_create_signal(no_deps);
    CHECK_FALSE(nd.detected);
    CHECK(nd.summary.find("no dependency") != std::string::npos);

    // one role with a self-dependency
    Trajectory self_dep;
    self_dep.events.push_back(event("2026-04-30T09:00:00Z", "solo", EventType::SpawnRole, {}));
    self_dep.events.push_back(event("2026-04-30T09:00:01Z", "solo", EventType::TaskStart,
                                    {{"task", "t1"}}));
    self_dep.events.push_back(event("2026-04-30T09:00:02Z", "solo", EventType::TaskStart,
                                    {{"task", "t2"}}));
    self_dep.events.push_back(event("2026-04-30T09:00:03Z", "leader", EventType::Dependency,
                                    {{"from_task", "t1"}, {"to_task", "t2"}}));
    const auto sd = detect_create_signal(self_dep);
    CHECK_FALSE(sd.detected);
    CHECK(sd.summary.find("fewer than 2") != std::string::npos);

    // neither conjunct
    CHECK_FALSE(detect_create_signal(Trajectory{}).detected);
}

TEST_CASE("create signal is a set-level predicate") {
    Trajectory t;
    const char* at = "2026-04-30T09:00:00Z"; // identical timestamps permit any order
    t.events.push_back(event(at, "a", EventType::SpawnRole, {}));
    t.events.push_back(event(at, "b", EventType::SpawnRole, {}));
    t.events.push_back(event(at, "a", EventType::TaskStart, {{"task", "t1"}}));
    t.events.push_back(event(at, "b", EventType::TaskStart, {{"task", "t2"}}));
    t.events.push_back(
        event(at, "leader", EventType::Dependency, {{"from_task", "t1"}, {"to_task", "t2"}}));

    std::mt19937 rng(99);
    const auto reference = detect_create_signal(t);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(t.events.begin(), t.events.end(), rng);
        const auto shuffled = detect_create_signal(t);
        CHECK(shuffled.detected == reference.detected);
        CHECK(shuffled.roles == reference.roles);
    }
}

TEST_CASE("distilled travel candidate passes swarm validation with five roles") {
    const Trajectory t =
        parse_trajectory(fixtures_dir() / "trajectories" / "travel_session1.jsonl");
    StubSynthesizer synthesizer;
    const auto staging = fresh_temp_dir("staging");
    const SwarmSkill candidate = distill_candidate(t, synthesizer, staging);
    CHECK(candidate.roles.size() == 5);
    CHECK(candidate.frontmatter.is_swarm_skill());
    CHECK(validate(candidate, Profile::Swarm).error_count() == 0);
    CHECK(candidate.experience.records.empty());
    // personas are carried verbatim
    CHECK(candidate.roles.at("budget-reviewer").find("sharing post") != std::string::npos);
    // max_turns mirrors the observed message count
    CHECK(candidate.bounds->max_turns == 3);
    fs::remove_all(staging);
}

TEST_CASE("a two-role trace distills to exactly one workflow edge") {
    StubSynthesizer synthesizer;
    const auto staging = fresh_temp_dir("staging2");
    const SwarmSkill candidate = distill_candidate(minimal_pair(), synthesizer, staging);
    const std::string& workflow = *candidate.workflow;
    std::size_t arrows = 0, pos = 0;
    while ((pos = workflow.find("-->", pos)) != std::string::npos) {
        ++arrows;
        pos += 3;
    }
    CHECK(arrows == 1);
    // second distillation of the same trace gets a fresh directory
    const SwarmSkill again = distill_candidate(minimal_pair(), synthesizer, staging);
    CHECK(again.source_dir != candidate.source_dir);
    fs::remove_all(staging);
}

TEST_CASE("distill refuses without a create signal and writes nothing") {
    Trajectory t;
    t.events.push_back(event("2026-04-30T09:00:00Z", "solo", EventType::SpawnRole, {}));
    StubSynthesizer synthesizer;
    const auto staging = fresh_temp_dir("staging3");
    CHECK_THROWS_AS(distill_candidate(t, synthesizer, staging), DomainError);
    CHECK(list_tree(staging).empty());
    fs::remove_all(staging);
}

TEST_CASE("friction analysis needs the skill_loaded event") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "travel-planning-swarm");
    CHECK_THROWS_AS(analyze_friction(minimal_pair(), skill), DomainError);
}

TEST_CASE("the travel session yields exactly one role-coupling finding") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "travel-planning-swarm");
    const Trajectory t =
        parse_trajectory(fixtures_dir() / "trajectories" / "travel_session1.jsonl");
    const auto findings = analyze_friction(t, skill);
    REQUIRE(findings.size() == 1);
    const auto& finding = findings[0];
    CHECK(finding.kind == FrictionKind::RoleCoupling);
    CHECK(finding.proposed_directive.action == action::kSplitRole);
    REQUIRE(finding.proposed_directive.target_files.size() == 2);
    CHECK(finding.proposed_directive.target_files[0] == "roles/copywriter.md");
    CHECK(finding.proposed_directive.target_files[1] == "workflow.md");
    CHECK_FALSE(finding.evidence.empty());
}

TEST_CASE("a three-task cycle is reported once") {
    SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "data-pipeline-swarm");
    Trajectory t;
    t.events.push_back(event("2026-04-30T09:00:00Z", "leader", EventType::SkillLoaded,
                             {{"skill", "data-pipeline-swarm"}}));
    t.events.push_back(event("2026-04-30T09:01:00Z", "leader", EventType::Dependency,
                             {{"from_task", "A"}, {"to_task", "B"}}));
    t.events.push_back(event("2026-04-30T09:01:01Z", "leader", EventType::Dependency,
                             {{"from_task", "B"}, {"to_task", "C"}}));
    t.events.push_back(event("2026-04-30T09:01:02Z", "leader", EventType::Dependency,
                             {{"from_task", "C"}, {"to_task", "A"}}));
    const auto findings = analyze_friction(t, skill);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == FrictionKind::CircularDependency);
    CHECK(findings[0].evidence == std::vector<std::size_t>{1, 2, 3});
    CHECK(findings[0].summary.find("A -> B -> C -> A") != std::string::npos);
}

TEST_CASE("a quiet gateless trace yields no findings") {
    SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "data-pipeline-swarm");
    Trajectory t;
    t.events.push_back(event("2026-04-30T09:00:00Z", "leader", EventType::SkillLoaded,
                             {{"skill", "data-pipeline-swarm"}}));
    t.events.push_back(event("2026-04-30T09:05:00Z", "leader", EventType::Outcome,
                             {{"status", "success"}}));
    CHECK(analyze_friction(t, skill).empty());
}

TEST_CASE("redundant messaging trips at the threshold") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "travel-planning-swarm");
    const Trajectory t =
        parse_trajectory(fixtures_dir() / "trajectories" / "travel_session2.jsonl");
    const auto findings = analyze_friction(t, skill);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == FrictionKind::RedundantCommunication);
    CHECK(findings[0].evidence.size() == 3); // case and whitespace folded together
}

TEST_CASE("an unmet quality gate on success is premature termination") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "travel-planning-swarm");
    Trajectory t;
    t.events.push_back(event("2026-04-30T09:00:00Z", "leader", EventType::SkillLoaded,
                             {{"skill", "travel-planning-swarm"}}));
    t.events.push_back(event("2026-04-30T09:01:00Z", "budget-reviewer", EventType::TaskEnd,
                             {{"task", "audit"}, {"status", "done"},
                              {"note", "total cost within budget"}}));
    t.events.push_back(event("2026-04-30T09:02:00Z", "leader", EventType::Outcome,
                             {{"status", "success"}}));
    const auto findings = analyze_friction(t, skill);
    REQUIRE(findings.size() == 1); // "all temporal conflicts resolved" never surfaced
    CHECK(findings[0].kind == FrictionKind::PrematureTermination);
    CHECK(findings[0].summary.find("all temporal conflicts resolved") != std::string::npos);

    // a failure outcome is not premature termination
    Trajectory failed = t;
    failed.events.back().payload["status"] = "failure";
    CHECK(analyze_friction(failed, skill).empty());
}

TEST_CASE("explicit feedback becomes an INSERT directive with the feedback text") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "data-pipeline-swarm");
    const Trajectory t =
        parse_trajectory(fixtures_dir() / "trajectories" / "feedback_session.jsonl");
    const auto findings = analyze_friction(t, skill);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == FrictionKind::ExplicitSignal);
    CHECK(findings[0].proposed_directive.action == action::kInsert);
    CHECK(findings[0].proposed_directive.content.find("Persist intermediate artifacts") !=
          std::string::npos);
}

TEST_CASE("emit_records appends fresh active records with sequential ids") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "travel-planning-swarm");
    const Trajectory t =
        parse_trajectory(fixtures_dir() / "trajectories" / "travel_session1.jsonl");
    const auto findings = analyze_friction(t, skill);

    const EvolutionExperience one = emit_records(findings, skill, kT0);
    REQUIRE(one.records.size() == 1);
    const auto& rec = one.records[0];
    CHECK(rec.id == "evo_20260430_001");
    CHECK(rec.status == RecordStatus::Active);
    CHECK(rec.score_state.success_count == 0);
    CHECK(rec.score_state.offered_count == 0);
    CHECK(rec.score_state.last_observed_at == kT0);
    CHECK(rec.context.find("role_coupling") != std::string::npos);
    CHECK(validate_record(rec).empty());

    // same-day emissions get increasing sequence numbers
    std::vector<FrictionFinding> two = {findings[0], findings[0]};
    const EvolutionExperience pair = emit_records(two, skill, kT0);
    CHECK(pair.records[0].id == "evo_20260430_001");
    CHECK(pair.records[1].id == "evo_20260430_002");

    // collisions with existing ids are skipped
    SwarmSkill seeded = skill;
    seeded.experience = one;
    const EvolutionExperience bumped = emit_records(findings, seeded, kT0);
    REQUIRE(bumped.records.size() == 2);
    CHECK(bumped.records[1].id == "evo_20260430_002");

    CHECK(emit_records({}, skill, kT0).records.empty());
}

TEST_CASE("cycle enumerator agrees with the brute-force oracle") {
    // canonical 3-cycle plus a self-loop
    const std::vector<std::pair<std::string, std::string>> edges = {
        {"a", "b"}, {"b", "c"}, {"c", "a"}, {"d", "d"}, {"a", "c"}};
    CHECK(find_elementary_cycles(edges) == brute_force_cycles(edges));

    std::mt19937 rng(20260808);
    for (int i = 0; i < 50; ++i) {
        const auto graph = random_graph(rng);
        CAPTURE(i);
        CHECK(find_elementary_cycles(graph) == brute_force_cycles(graph));
    }

    CHECK(find_elementary_cycles({}).empty());
    CHECK(find_elementary_cycles({{"a", "b"}}).empty());
}
