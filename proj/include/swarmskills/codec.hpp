#pragma once

#include "swarmskills/model.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace swarmskills {

enum class Severity { Error, Warning };
enum class Profile { Swarm, DegradedSingleAgent };

std::string to_string(Severity s);
std::string to_string(Profile p);

struct Violation {
    Severity severity = Severity::Error;
    std::string path;
    std::string message;
};

struct ValidationReport {
    Profile profile = Profile::Swarm;
    std::vector<Violation> violations;

    int error_count() const;
    int warning_count() const;
    bool conformant() const { return error_count() == 0; }
};

struct IndexEntry {
    std::string name;
    std::string description;
    std::string kind;
    std::filesystem::path path;
};

struct SkillIndex {
    std::vector<IndexEntry> entries;   // sorted by name
    std::vector<std::string> warnings; // unparseable subdirectories
};

// ─── Directory codec ───────────────────────────────────────────────

// Reads SKILL.md (required), every roles/*.md, workflow.md, bind.md and
// evolutions.json. Missing supplementary files parse fine and surface later
// in validate(); a missing or malformed SKILL.md throws ParseError.
SwarmSkill parse_skill(const std::filesystem::path& dir);

// Writes SKILL.md, roles/<id>.md per entry, workflow.md and bind.md when
// present, and evolutions.json (always, canonical array form). Refuses
// duplicate or unsafe role ids.
void serialize_skill(const SwarmSkill& skill, const std::filesystem::path& dir);

ValidationReport validate(const SwarmSkill& skill, Profile profile);

// One entry per direct subdirectory with a parseable SKILL.md, sorted by
// skill name. Hidden directories are skipped; broken ones become warnings.
SkillIndex index_skills(const std::filesystem::path& root);

// ─── Pieces reused by the engines ──────────────────────────────────

// Structured fields from bind.md plus any complaints about the bounds fence
// (non-positive or non-numeric values as errors, unknown keys as warnings).
std::pair<ExecutionBounds, std::vector<Violation>>
parse_execution_bounds(const std::string& raw_text);

EvolutionExperience parse_evolutions_json(const std::string& text,
                                          const std::string& path_for_errors);
std::string render_evolutions_json(const EvolutionExperience& experience);

// Persists only evolutions.json; base files are never touched.
void write_evolutions(const std::filesystem::path& skill_dir,
                      const EvolutionExperience& experience);

std::string render_skill_md(const Frontmatter& frontmatter, const std::string& body);

// Frontmatter + body from SKILL.md text. Throws ParseError with a line number
// on malformed input.
std::pair<Frontmatter, std::string> parse_skill_md_text(const std::string& text,
                                                        const std::string& path_for_errors);

// Relative .md/.json paths mentioned in a SKILL.md body (skips URLs).
std::vector<std::string> extract_body_references(const std::string& body);

} // namespace swarmskills
