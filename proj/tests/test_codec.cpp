#include "swarmskills/codec.hpp"
#include "swarmskills/errors.hpp"
#include "swarmskills/util.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>

namespace fs = std::filesystem;
using namespace swarmskills;
using namespace testsupport;

namespace {

std::vector<fs::path> fixture_skills() {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(fixtures_dir() / "skills")) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

} // namespace

TEST_CASE("travel fixture parses with five roles and structured bounds") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "travel-planning-swarm");
    CHECK(skill.name() == "travel-planning-swarm");
    CHECK(skill.frontmatter.kind == std::string{kSwarmSkillKind});
    CHECK(skill.frontmatter.teammate_mode == std::string{kBuildMode});
    REQUIRE(skill.frontmatter.roles.has_value());
    CHECK(skill.frontmatter.roles->size() == 5);
    CHECK(skill.roles.size() == 5);
    CHECK(skill.roles.count("budget-reviewer") == 1);
    REQUIRE(skill.bounds.has_value());
    CHECK(skill.bounds->max_turns == 24);
    CHECK(skill.bounds->token_budget == 60000);
    REQUIRE(skill.bounds->quality_gates.size() == 2);
    CHECK(skill.bounds->quality_gates[0] == "total cost within budget");
    CHECK(skill.experience.records.empty());
    CHECK(skill.frontmatter.dependencies == std::vector<std::string>{});
}

TEST_CASE("fixture corpus round-trips byte-identically") {
    const auto dirs = fixture_skills();
    REQUIRE(dirs.size() >= 5);
    for (const auto& src : dirs) {
        CAPTURE(src.string());
        const auto dst = fresh_temp_dir("rt_" + src.filename().string());
        serialize_skill(parse_skill(src), dst);
        for (const auto& rel : list_tree(src)) {
            CAPTURE(rel);
            CHECK(read_text_file(src / rel) == read_text_file(dst / rel));
        }
        // one more pass reaches a fixed point even for skills that had no
        // evolutions.json (it is materialized on the first serialization)
        const auto dst2 = fresh_temp_dir("rt2_" + src.filename().string());
        serialize_skill(parse_skill(dst), dst2);
        CHECK(list_tree(dst) == list_tree(dst2));
        for (const auto& rel : list_tree(dst)) {
            CHECK(read_text_file(dst / rel) == read_text_file(dst2 / rel));
        }
        fs::remove_all(dst);
        fs::remove_all(dst2);
    }
}

TEST_CASE("parse is deterministic") {
    const auto dir = fixtures_dir() / "skills" / "incident-response-swarm";
    CHECK(parse_skill(dir) == parse_skill(dir));
}

TEST_CASE("missing or malformed SKILL.md is fatal") {
    const auto dir = fresh_temp_dir("bad_skill");
    CHECK_THROWS_AS(parse_skill(dir / "nope"), ParseError);
    CHECK_THROWS_AS(parse_skill(dir), ParseError); // no SKILL.md

    write_text_file(dir / "SKILL.md", "# no frontmatter here\n");
    CHECK_THROWS_AS(parse_skill(dir), ParseError);

    write_text_file(dir / "SKILL.md", "---\nname: x\n"); // unterminated
    try {
        parse_skill(dir);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() > 0);
    }

    write_text_file(dir / "SKILL.md", "---\nname x\n---\nbody\n"); // no colon
    CHECK_THROWS_AS(parse_skill(dir), ParseError);
    fs::remove_all(dir);
}

TEST_CASE("unknown frontmatter fields survive byte-identically") {
    const auto src = fixtures_dir() / "skills" / "code-review-swarm";
    const SwarmSkill skill = parse_skill(src);
    REQUIRE(skill.frontmatter.extra_fields.size() == 1);
    CHECK(skill.frontmatter.extra_fields[0].key == "x-maintainer");

    SwarmSkill extended = skill;
    extended.frontmatter.extra_fields.push_back(ExtraField{"x-custom", "x-custom: 7\n"});
    const std::string rendered = render_skill_md(extended.frontmatter, extended.body);
    CHECK(rendered.find("x-custom: 7\n") != std::string::npos);

    const auto [reparsed, body] = parse_skill_md_text(rendered, "SKILL.md");
    (void)body;
    CHECK(reparsed == extended.frontmatter);
}

TEST_CASE("empty experience serializes to the canonical empty array") {
    CHECK(render_evolutions_json(EvolutionExperience{}) == "{\n  \"records\": []\n}\n");
}

TEST_CASE("evolutions reader accepts the single-record object form") {
    // compact single-record form: no wrapper, no counters, no status
    const std::string single_record_form = R"({
      "id": "evo_20260430_001",
      "context": "The Budget Reviewer experienced context switching.",
      "change_directive": {
        "target_files": ["roles/copywriter.md", "workflow.md"],
        "action": "SPLIT_ROLE",
        "content": "Create a dedicated Copywriting Expert."
      },
      "metrics": {
        "effectiveness_score": 0.5,
        "utilization_rate": 0.0,
        "freshness_decay": 1.0
      }
    })";
    const EvolutionExperience exp = parse_evolutions_json(single_record_form, "evolutions.json");
    REQUIRE(exp.records.size() == 1);
    const auto& rec = exp.records[0];
    CHECK(rec.id == "evo_20260430_001");
    CHECK(rec.status == RecordStatus::Active);
    CHECK(rec.score_state.success_count == 0);
    CHECK(rec.score_state.offered_count == 0);
    CHECK(rec.change_directive.action == "SPLIT_ROLE");
    REQUIRE(rec.change_directive.target_files.size() == 2);
    CHECK(rec.change_directive.target_files[0] == "roles/copywriter.md");

    // bare array form
    const EvolutionExperience arr = parse_evolutions_json("[" + single_record_form + "]", "x");
    CHECK(arr.records.size() == 1);

    CHECK_THROWS_AS(parse_evolutions_json("{\"surprise\": true}", "x"), ParseError);
    CHECK_THROWS_AS(parse_evolutions_json("not json", "x"), ParseError);
}

TEST_CASE("absent evolutions.json means an empty experience") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "research-synthesis-swarm");
    CHECK(skill.experience.records.empty());
}

TEST_CASE("swarm profile accepts every fixture; degraded is implied") {
    for (const auto& dir : fixture_skills()) {
        CAPTURE(dir.string());
        const SwarmSkill skill = parse_skill(dir);
        const auto swarm = validate(skill, Profile::Swarm);
        CHECK(swarm.error_count() == 0);
        // profile monotonicity
        CHECK(validate(skill, Profile::DegradedSingleAgent).error_count() == 0);
    }
}

TEST_CASE("unknown directive actions are warnings, not errors") {
    const SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "incident-response-swarm");
    const auto report = validate(skill, Profile::Swarm);
    CHECK(report.error_count() == 0);
    bool flagged = false;
    for (const auto& v : report.violations) {
        flagged = flagged || (v.severity == Severity::Warning &&
                              v.message.find("REWEIGHT") != std::string::npos);
    }
    CHECK(flagged);
}

TEST_CASE("a missing persona file fails swarm with one error and passes degraded") {
    const auto dir = fresh_temp_dir("broken");
    copy_tree(fixtures_dir() / "skills" / "travel-planning-swarm", dir);
    fs::remove(dir / "roles" / "attraction.md");

    const SwarmSkill skill = parse_skill(dir);
    const auto swarm = validate(skill, Profile::Swarm);
    REQUIRE(swarm.error_count() == 1);
    bool names_persona = false;
    for (const auto& v : swarm.violations) {
        if (v.severity == Severity::Error) {
            names_persona = v.path == "roles/attraction.md";
        }
    }
    CHECK(names_persona);
    CHECK(validate(skill, Profile::DegradedSingleAgent).error_count() == 0);
    fs::remove_all(dir);
}

TEST_CASE("swarm profile flags missing workflow, bind, and empty body") {
    const auto dir = fresh_temp_dir("gutted");
    copy_tree(fixtures_dir() / "skills" / "data-pipeline-swarm", dir);
    fs::remove(dir / "workflow.md");
    fs::remove(dir / "bind.md");
    const auto report = validate(parse_skill(dir), Profile::Swarm);
    int missing = 0;
    for (const auto& v : report.violations) {
        if (v.severity == Severity::Error && (v.path == "workflow.md" || v.path == "bind.md")) {
            ++missing;
        }
    }
    CHECK(missing == 2);
    CHECK(validate(parse_skill(dir), Profile::DegradedSingleAgent).error_count() == 0);
    fs::remove_all(dir);
}

TEST_CASE("body references to missing files are errors") {
    const auto dir = fresh_temp_dir("bodyref");
    copy_tree(fixtures_dir() / "skills" / "data-pipeline-swarm", dir);
    SwarmSkill skill = parse_skill(dir);
    skill.body += "\nAlso consult playbooks/missing.md before loading.\n";
    serialize_skill(skill, dir);
    const auto report = validate(parse_skill(dir), Profile::Swarm);
    bool flagged = false;
    for (const auto& v : report.violations) {
        flagged = flagged || (v.severity == Severity::Error && v.path == "playbooks/missing.md");
    }
    CHECK(flagged);
    fs::remove_all(dir);
}

TEST_CASE("bounds fence problems surface with severities") {
    const auto [bounds, violations] = parse_execution_bounds(
        "# Bounds\n\n```bounds\nmax_turns: 0\ntoken_budget: many\nmystery: 1\nquality_gate: x\n```\n");
    CHECK_FALSE(bounds.max_turns.has_value());
    CHECK_FALSE(bounds.token_budget.has_value());
    REQUIRE(bounds.quality_gates.size() == 1);
    int errors = 0, warnings = 0;
    for (const auto& v : violations) {
        (v.severity == Severity::Error ? errors : warnings)++;
    }
    CHECK(errors == 2);  // non-positive max_turns, non-numeric token_budget
    CHECK(warnings == 1); // unknown key
}

TEST_CASE("serialize refuses duplicate role declarations") {
    SwarmSkill skill = parse_skill(fixtures_dir() / "skills" / "data-pipeline-swarm");
    skill.frontmatter.roles->push_back(skill.frontmatter.roles->front());
    const auto dir = fresh_temp_dir("dup");
    CHECK_THROWS_AS(serialize_skill(skill, dir), DomainError);
    CHECK_FALSE(fs::exists(dir / "SKILL.md"));
    fs::remove_all(dir);
}

TEST_CASE("index lists fixtures sorted and isolates broken entries") {
    const SkillIndex index = index_skills(fixtures_dir() / "skills");
    REQUIRE(index.entries.size() == 5);
    CHECK(index.warnings.empty());
    for (std::size_t i = 0; i + 1 < index.entries.size(); ++i) {
        CHECK(index.entries[i].name < index.entries[i + 1].name);
    }
    CHECK(index.entries.front().name == "code-review-swarm");
    CHECK(index.entries.front().kind == kSwarmSkillKind);

    const auto root = fresh_temp_dir("index");
    copy_tree(fixtures_dir() / "skills" / "data-pipeline-swarm", root / "ok-skill");
    write_text_file(root / "broken-skill" / "SKILL.md", "no frontmatter\n");
    write_text_file(root / "not-a-skill" / "readme.txt", "hello\n");
    const SkillIndex mixed = index_skills(root);
    CHECK(mixed.entries.size() == 1);
    CHECK(mixed.warnings.size() == 2);

    const auto empty_root = fresh_temp_dir("index_empty");
    CHECK(index_skills(empty_root).entries.empty());
    CHECK_THROWS_AS(index_skills(empty_root / "missing"), ParseError);
    fs::remove_all(root);
    fs::remove_all(empty_root);
}
