#include "swarmskills/codec.hpp"

#include "swarmskills/errors.hpp"
#include "swarmskills/scoring.hpp"
#include "swarmskills/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

namespace swarmskills {

namespace {

bool is_identifier(const std::string& s) {
    if (s.empty() || s.front() == '.') return false;
    if (s.find("..") != std::string::npos) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '_' || c == '.';
    });
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

std::string flow_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out + "]";
}

std::vector<std::string> parse_flow_list(const std::string& value, const std::string& path,
                                         int line) {
    const std::string v = trim(value);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
        throw ParseError("expected a flow list like [a, b]", path, line);
    }
    std::vector<std::string> items;
    const std::string inner = trim(v.substr(1, v.size() - 2));
    if (inner.empty()) return items;
    std::size_t start = 0;
    while (start <= inner.size()) {
        const std::size_t comma = inner.find(',', start);
        const std::string item = unquote(trim(
            inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (item.empty()) throw ParseError("empty list item", path, line);
        items.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return items;
}

bool is_fence(const std::string& line) { return trim(line) == "---"; }

struct SkillMdParse {
    Frontmatter frontmatter;
    std::string body;
};

SkillMdParse parse_skill_md(const std::string& text, const std::string& path) {
    // Locate the frontmatter fences on raw offsets so the body survives
    // byte-exactly.
    std::size_t first_nl = text.find('\n');
    if (first_nl == std::string::npos || !is_fence(text.substr(0, first_nl))) {
        throw ParseError("missing frontmatter block (expected leading ---)", path, 1);
    }

    std::vector<std::pair<int, std::string>> lines; // line number, content
    std::string body;
    bool closed = false;
    int lineno = 1;
    std::size_t pos = first_nl + 1;
    while (pos <= text.size()) {
        ++lineno;
        const std::size_t nl = text.find('\n', pos);
        const std::string line =
            text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        if (is_fence(line)) {
            closed = true;
            body = nl == std::string::npos ? std::string() : text.substr(nl + 1);
            break;
        }
        if (nl == std::string::npos) break;
        lines.emplace_back(lineno, line);
        pos = nl + 1;
    }
    if (!closed) throw ParseError("unterminated frontmatter block", path, lineno);

    Frontmatter fm;
    std::vector<std::string> seen;
    auto mark_seen = [&](const std::string& key, int at) {
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw ParseError("duplicate frontmatter key: " + key, path, at);
        }
        seen.push_back(key);
    };

    std::size_t i = 0;
    while (i < lines.size()) {
        const auto& [at, line] = lines[i];
        if (trim(line).empty()) {
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(line[0]))) {
            throw ParseError("unexpected indentation", path, at);
        }
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos || colon == 0) {
            throw ParseError("expected 'key: value'", path, at);
        }
        const std::string key = line.substr(0, colon);
        if (key.find(' ') != std::string::npos) {
            throw ParseError("malformed frontmatter key: " + key, path, at);
        }
        const std::string rest = line.substr(colon + 1);

        if (key == "name" || key == "description" || key == "kind" || key == "teammate_mode") {
            mark_seen(key, at);
            const std::string value = unquote(trim(rest));
            if (key == "name") fm.name = value;
            else if (key == "description") fm.description = value;
            else if (key == "kind") fm.kind = value;
            else fm.teammate_mode = value;
            ++i;
        } else if (key == "dependencies") {
            mark_seen(key, at);
            fm.dependencies = parse_flow_list(rest, path, at);
            ++i;
        } else if (key == "roles") {
            mark_seen(key, at);
            std::vector<RoleDecl> roles;
            const std::string rest_t = trim(rest);
            if (rest_t == "[]") {
                ++i;
            } else if (!rest_t.empty()) {
                throw ParseError("roles must be a block sequence or []", path, at);
            } else {
                ++i;
                while (i < lines.size() && lines[i].second.rfind("  - ", 0) == 0) {
                    RoleDecl role;
                    std::vector<std::string> role_seen;
                    auto role_entry = [&](const std::string& kv, int kv_at) {
                        const std::size_t c = kv.find(':');
                        if (c == std::string::npos || c == 0) {
                            throw ParseError("expected 'key: value' in role entry", path, kv_at);
                        }
                        const std::string rkey = trim(kv.substr(0, c));
                        const std::string rval = kv.substr(c + 1);
                        if (std::find(role_seen.begin(), role_seen.end(), rkey) !=
                            role_seen.end()) {
                            throw ParseError("duplicate role key: " + rkey, path, kv_at);
                        }
                        role_seen.push_back(rkey);
                        if (rkey == "id") role.id = unquote(trim(rval));
                        else if (rkey == "model") role.model = unquote(trim(rval));
                        else if (rkey == "skills") role.skills = parse_flow_list(rval, path, kv_at);
                        else if (rkey == "tools") role.tools = parse_flow_list(rval, path, kv_at);
                        else throw ParseError("unknown role key: " + rkey, path, kv_at);
                    };
                    const int dash_at = lines[i].first;
                    role_entry(lines[i].second.substr(4), dash_at);
                    ++i;
                    while (i < lines.size() && lines[i].second.rfind("    ", 0) == 0 &&
                           lines[i].second.size() > 4 && lines[i].second[4] != ' ' &&
                           lines[i].second[4] != '-') {
                        role_entry(lines[i].second.substr(4), lines[i].first);
                        ++i;
                    }
                    if (role.id.empty()) {
                        throw ParseError("role entry missing id", path, dash_at);
                    }
                    roles.push_back(std::move(role));
                }
            }
            fm.roles = std::move(roles);
        } else {
            // Unknown key: preserve the raw block byte-identically.
            mark_seen(key, at);
            std::string raw = line + "\n";
            ++i;
            while (i < lines.size() && !lines[i].second.empty() &&
                   std::isspace(static_cast<unsigned char>(lines[i].second[0]))) {
                raw += lines[i].second + "\n";
                ++i;
            }
            fm.extra_fields.push_back(ExtraField{key, std::move(raw)});
        }
    }

    return SkillMdParse{std::move(fm), std::move(body)};
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

EvolutionRecord parse_record_json(const njson& r, const std::string& path) {
    if (!r.is_object()) throw ParseError("evolution record must be an object", path);
    EvolutionRecord rec;
    if (!r.contains("id") || !r["id"].is_string()) {
        throw ParseError("evolution record missing string id", path);
    }
    rec.id = r["id"].get<std::string>();

    auto read_time = [&](const char* key) -> std::optional<Timestamp> {
        if (!r.contains(key)) return std::nullopt;
        if (!r[key].is_string()) throw ParseError(std::string(key) + " must be a string", path);
        auto t = parse_rfc3339(r[key].get<std::string>());
        if (!t) {
            throw ParseError("invalid RFC 3339 timestamp in " + std::string(key) + " of record " +
                                 rec.id,
                             path);
        }
        return t;
    };
    const auto created = read_time("created_at");
    const auto observed = read_time("last_observed_at");
    rec.created_at = created.value_or(observed.value_or(Timestamp{0}));
    rec.score_state.last_observed_at = observed.value_or(rec.created_at);

    if (r.contains("context")) rec.context = r["context"].get<std::string>();

    if (r.contains("change_directive")) {
        const auto& cd = r["change_directive"];
        if (!cd.is_object()) throw ParseError("change_directive must be an object", path);
        if (cd.contains("target_files")) {
            for (const auto& t : cd["target_files"]) {
                rec.change_directive.target_files.push_back(t.get<std::string>());
            }
        }
        if (cd.contains("action")) rec.change_directive.action = cd["action"].get<std::string>();
        if (cd.contains("content")) {
            rec.change_directive.content = cd["content"].get<std::string>();
        }
    }

    if (r.contains("counters")) {
        const auto& c = r["counters"];
        auto read_count = [&](const char* key) -> std::int64_t {
            if (!c.contains(key)) return 0;
            if (!c[key].is_number_integer() || c[key].get<std::int64_t>() < 0) {
                throw ParseError("counter " + std::string(key) +
                                     " must be a non-negative integer in record " + rec.id,
                                 path);
            }
            return c[key].get<std::int64_t>();
        };
        rec.score_state.success_count = read_count("success");
        rec.score_state.failure_count = read_count("failure");
        rec.score_state.offered_count = read_count("offered");
        rec.score_state.applied_count = read_count("applied");
    }

    if (r.contains("metrics") && r["metrics"].is_object() &&
        r["metrics"].contains("freshness_decay")) {
        rec.score_state.freshness_snapshot = r["metrics"]["freshness_decay"].get<double>();
    }

    if (r.contains("status")) {
        const auto status = record_status_from_string(r["status"].get<std::string>());
        if (!status) {
            throw ParseError("unknown record status \"" + r["status"].get<std::string>() +
                                 "\" in record " + rec.id,
                             path);
        }
        rec.status = *status;
    }
    return rec;
}

} // namespace

std::pair<Frontmatter, std::string> parse_skill_md_text(const std::string& text,
                                                        const std::string& path_for_errors) {
    auto parsed = parse_skill_md(text, path_for_errors);
    return {std::move(parsed.frontmatter), std::move(parsed.body)};
}

std::string to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

std::string to_string(Profile p) {
    return p == Profile::Swarm ? "swarm" : "degraded-single-agent";
}

int ValidationReport::error_count() const {
    return static_cast<int>(std::count_if(violations.begin(), violations.end(), [](const auto& v) {
        return v.severity == Severity::Error;
    }));
}

int ValidationReport::warning_count() const {
    return static_cast<int>(violations.size()) - error_count();
}

// ─── bind.md bounds fence ──────────────────────────────────────────

std::pair<ExecutionBounds, std::vector<Violation>>
parse_execution_bounds(const std::string& raw_text) {
    ExecutionBounds bounds;
    bounds.raw_text = raw_text;
    std::vector<Violation> violations;
    auto err = [&](const std::string& m) {
        violations.push_back({Severity::Error, "bind.md", m});
    };
    auto warn = [&](const std::string& m) {
        violations.push_back({Severity::Warning, "bind.md", m});
    };

    const auto lines = split_lines(raw_text);
    bool in_fence = false;
    bool fence_done = false;
    for (const auto& line : lines) {
        const std::string t = trim(line);
        if (!in_fence) {
            if (t == "```bounds") {
                if (fence_done) {
                    warn("multiple bounds fences; only the first is read");
                    break;
                }
                in_fence = true;
            }
            continue;
        }
        if (t == "```") {
            in_fence = false;
            fence_done = true;
            continue;
        }
        if (t.empty()) continue;
        const std::size_t colon = t.find(':');
        if (colon == std::string::npos || colon == 0) {
            err("malformed bounds line: " + t);
            continue;
        }
        const std::string key = trim(t.substr(0, colon));
        const std::string value = trim(t.substr(colon + 1));
        if (key == "max_turns" || key == "token_budget") {
            std::int64_t n = 0;
            bool numeric = !value.empty() &&
                           std::all_of(value.begin(), value.end(),
                                       [](unsigned char c) { return std::isdigit(c); });
            if (numeric) n = std::stoll(value);
            if (!numeric || n <= 0) {
                err(key + " must be a positive integer, got \"" + value + "\"");
            } else if (key == "max_turns") {
                bounds.max_turns = n;
            } else {
                bounds.token_budget = n;
            }
        } else if (key == "quality_gate") {
            if (value.empty()) err("quality_gate must not be empty");
            else bounds.quality_gates.push_back(value);
        } else {
            warn("unknown bounds key: " + key);
        }
    }
    if (in_fence) err("unterminated bounds fence");
    return {std::move(bounds), std::move(violations)};
}

// ─── evolutions.json ───────────────────────────────────────────────

EvolutionExperience parse_evolutions_json(const std::string& text,
                                          const std::string& path_for_errors) {
    EvolutionExperience exp;
    if (trim(text).empty()) return exp;

    njson j;
    try {
        j = njson::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), path_for_errors);
    }

    njson records = njson::array();
    if (j.is_array()) {
        records = j;
    } else if (j.is_object() && j.contains("records")) {
        if (!j["records"].is_array()) {
            throw ParseError("\"records\" must be an array", path_for_errors);
        }
        records = j["records"];
    } else if (j.is_object() && j.contains("id")) {
        records.push_back(j); // single-record form
    } else {
        throw ParseError("unrecognized evolutions.json shape", path_for_errors);
    }

    try {
        for (const auto& r : records) {
            exp.records.push_back(parse_record_json(r, path_for_errors));
        }
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid evolution record: ") + e.what(), path_for_errors);
    }
    return exp;
}

std::string render_evolutions_json(const EvolutionExperience& experience) {
    njson j;
    j["records"] = njson::array();
    for (const auto& rec : experience.records) {
        njson r;
        r["id"] = rec.id;
        r["created_at"] = format_rfc3339(rec.created_at);
        r["context"] = rec.context;
        njson cd;
        cd["target_files"] = rec.change_directive.target_files;
        cd["action"] = rec.change_directive.action;
        cd["content"] = rec.change_directive.content;
        r["change_directive"] = cd;
        njson m;
        m["effectiveness_score"] = round6(effectiveness(rec.score_state));
        m["utilization_rate"] = round6(utilization(rec.score_state));
        m["freshness_decay"] = round6(rec.score_state.freshness_snapshot);
        r["metrics"] = m;
        njson c;
        c["success"] = rec.score_state.success_count;
        c["failure"] = rec.score_state.failure_count;
        c["offered"] = rec.score_state.offered_count;
        c["applied"] = rec.score_state.applied_count;
        r["counters"] = c;
        r["last_observed_at"] = format_rfc3339(rec.score_state.last_observed_at);
        r["status"] = to_string(rec.status);
        j["records"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

void write_evolutions(const fs::path& skill_dir, const EvolutionExperience& experience) {
    write_text_file(skill_dir / "evolutions.json", render_evolutions_json(experience));
}

// ─── SKILL.md ──────────────────────────────────────────────────────

std::string render_skill_md(const Frontmatter& fm, const std::string& body) {
    std::string out = "---\n";
    auto scalar = [&](const char* key, const std::optional<std::string>& value) {
        if (value) out += std::string(key) + ": " + *value + "\n";
    };
    scalar("name", fm.name);
    scalar("description", fm.description);
    scalar("kind", fm.kind);
    scalar("teammate_mode", fm.teammate_mode);
    if (fm.roles) {
        if (fm.roles->empty()) {
            out += "roles: []\n";
        } else {
            out += "roles:\n";
            for (const auto& role : *fm.roles) {
                out += "  - id: " + role.id + "\n";
                out += "    skills: " + flow_list(role.skills) + "\n";
                out += "    tools: " + flow_list(role.tools) + "\n";
                if (role.model) out += "    model: " + *role.model + "\n";
            }
        }
    }
    if (fm.dependencies) out += "dependencies: " + flow_list(*fm.dependencies) + "\n";
    for (const auto& extra : fm.extra_fields) out += extra.raw;
    out += "---\n";
    out += body;
    return out;
}

std::vector<std::string> extract_body_references(const std::string& body) {
    std::vector<std::string> refs;
    auto is_path_char = [](unsigned char c) {
        return std::isalnum(c) || c == '.' || c == '/' || c == '_' || c == '-';
    };
    std::size_t i = 0;
    while (i < body.size()) {
        if (!is_path_char(static_cast<unsigned char>(body[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < body.size() && is_path_char(static_cast<unsigned char>(body[j]))) ++j;
        std::string token = body.substr(i, j - i);
        i = j;
        while (!token.empty() && token.back() == '.') token.pop_back();
        if (token.rfind("./", 0) == 0) token = token.substr(2);
        if (token.size() < 4) continue;
        const bool md = token.ends_with(".md");
        const bool json = token.ends_with(".json");
        if (!md && !json) continue;
        if (token.front() == '.') continue;
        if (std::find(refs.begin(), refs.end(), token) == refs.end()) refs.push_back(token);
    }
    return refs;
}

// ─── Directory operations ──────────────────────────────────────────

SwarmSkill parse_skill(const fs::path& dir) {
    if (!fs::exists(dir) || !fs::is_directory(dir)) {
        throw ParseError("skill directory not found", dir.string());
    }
    const fs::path skill_md = dir / "SKILL.md";
    if (!fs::exists(skill_md)) throw ParseError("missing SKILL.md", skill_md.string());

    SwarmSkill skill;
    skill.source_dir = dir;
    auto parsed = parse_skill_md(read_text_file(skill_md), skill_md.string());
    skill.frontmatter = std::move(parsed.frontmatter);
    skill.body = std::move(parsed.body);

    const fs::path roles_dir = dir / "roles";
    if (fs::exists(roles_dir) && fs::is_directory(roles_dir)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(roles_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".md") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            skill.roles[f.stem().string()] = read_text_file(f);
        }
    }

    const fs::path workflow_md = dir / "workflow.md";
    if (fs::exists(workflow_md)) skill.workflow = read_text_file(workflow_md);

    const fs::path bind_md = dir / "bind.md";
    if (fs::exists(bind_md)) {
        skill.bounds = parse_execution_bounds(read_text_file(bind_md)).first;
    }

    const fs::path evolutions = dir / "evolutions.json";
    if (fs::exists(evolutions)) {
        skill.experience = parse_evolutions_json(read_text_file(evolutions), evolutions.string());
    }
    return skill;
}

void serialize_skill(const SwarmSkill& skill, const fs::path& dir) {
    std::vector<std::string> declared;
    for (const auto& role : skill.frontmatter.declared_roles()) {
        if (std::find(declared.begin(), declared.end(), role.id) != declared.end()) {
            throw DomainError("refusing to serialize: duplicate role id \"" + role.id + "\"");
        }
        declared.push_back(role.id);
    }
    for (const auto& [id, persona] : skill.roles) {
        (void)persona;
        if (!is_identifier(id)) {
            throw DomainError("refusing to serialize: unsafe role id \"" + id + "\"");
        }
    }

    write_text_file(dir / "SKILL.md", render_skill_md(skill.frontmatter, skill.body));
    for (const auto& [id, persona] : skill.roles) {
        write_text_file(dir / "roles" / (id + ".md"), persona);
    }
    if (skill.workflow) write_text_file(dir / "workflow.md", *skill.workflow);
    if (skill.bounds) write_text_file(dir / "bind.md", skill.bounds->raw_text);
    write_evolutions(dir, skill.experience);
}

ValidationReport validate(const SwarmSkill& skill, Profile profile) {
    ValidationReport report;
    report.profile = profile;
    auto err = [&](const std::string& path, const std::string& message) {
        report.violations.push_back({Severity::Error, path, message});
    };
    auto warn = [&](const std::string& path, const std::string& message) {
        report.violations.push_back({Severity::Warning, path, message});
    };

    const Frontmatter& fm = skill.frontmatter;
    if (fm.name_or_empty().empty()) err("SKILL.md", "name is missing or empty");
    if (fm.description_or_empty().empty()) err("SKILL.md", "description is missing or empty");
    if (trim(skill.body).empty()) err("SKILL.md", "body is empty");

    if (profile == Profile::DegradedSingleAgent) {
        // Multi-agent fields are ignored entirely under this profile.
        return report;
    }

    if (!fm.name_or_empty().empty() && !is_identifier(*fm.name)) {
        err("SKILL.md", "name is not filesystem-safe: \"" + *fm.name + "\"");
    }
    if (!fm.is_swarm_skill()) {
        err("SKILL.md", "kind must be \"swarm-skill\" under the swarm profile");
    }
    if (!fm.teammate_mode) {
        warn("SKILL.md", "teammate_mode is missing");
    } else if (*fm.teammate_mode != kBuildMode && *fm.teammate_mode != kPlanMode) {
        warn("SKILL.md", "unknown teammate_mode: \"" + *fm.teammate_mode + "\"");
    }

    if (!fm.roles || fm.roles->empty()) {
        err("SKILL.md", "roles must be non-empty for a swarm skill");
    } else {
        std::vector<std::string> ids;
        for (const auto& role : *fm.roles) {
            if (role.id.empty()) {
                err("SKILL.md", "role with empty id");
                continue;
            }
            if (!is_identifier(role.id)) {
                err("SKILL.md", "role id is not filesystem-safe: \"" + role.id + "\"");
            }
            if (std::find(ids.begin(), ids.end(), role.id) != ids.end()) {
                err("SKILL.md", "duplicate role id: \"" + role.id + "\"");
            }
            ids.push_back(role.id);
            if (!skill.roles.count(role.id)) {
                err("roles/" + role.id + ".md", "persona file missing for declared role");
            }
        }
        for (const auto& [id, persona] : skill.roles) {
            (void)persona;
            if (!fm.find_role(id)) {
                warn("roles/" + id + ".md", "persona file has no role declaration");
            }
        }
    }

    if (!skill.workflow) err("workflow.md", "missing");
    else if (trim(*skill.workflow).empty()) err("workflow.md", "empty");

    if (!skill.bounds) {
        err("bind.md", "missing");
    } else {
        auto [bounds, bound_violations] = parse_execution_bounds(skill.bounds->raw_text);
        (void)bounds;
        for (auto& v : bound_violations) report.violations.push_back(std::move(v));
    }

    if (!skill.source_dir.empty() && fs::is_directory(skill.source_dir)) {
        // References owned by a dedicated check above are skipped here so a
        // single missing file is reported once.
        auto covered_elsewhere = [&](const std::string& ref) {
            if (ref == "SKILL.md" || ref == "workflow.md" || ref == "bind.md" ||
                ref == "evolutions.json") {
                return true;
            }
            if (ref.rfind("roles/", 0) == 0 && ref.ends_with(".md")) {
                return fm.find_role(ref.substr(6, ref.size() - 9)) != nullptr;
            }
            return false;
        };
        for (const auto& ref : extract_body_references(skill.body)) {
            if (!is_safe_relative_path(ref)) {
                err(ref, "body reference escapes the skill directory");
            } else if (!covered_elsewhere(ref) && !fs::exists(skill.source_dir / ref)) {
                err(ref, "body references a missing file");
            }
        }
    }

    std::vector<std::string> record_ids;
    for (const auto& rec : skill.experience.records) {
        if (std::find(record_ids.begin(), record_ids.end(), rec.id) != record_ids.end()) {
            err("evolutions.json", "duplicate record id: \"" + rec.id + "\"");
        }
        record_ids.push_back(rec.id);
        for (const auto& violation : validate_record(rec)) {
            err("evolutions.json", "record " + rec.id + ": " + violation);
        }
        if (!rec.change_directive.action.empty() &&
            !is_known_action(rec.change_directive.action)) {
            warn("evolutions.json",
                 "record " + rec.id + ": unknown directive action \"" +
                     rec.change_directive.action + "\"");
        }
    }
    return report;
}

SkillIndex index_skills(const fs::path& root) {
    if (!fs::exists(root) || !fs::is_directory(root)) {
        throw ParseError("skills root not found or not a directory", root.string());
    }
    SkillIndex index;
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const std::string base = entry.path().filename().string();
        if (!base.empty() && base.front() == '.') continue;
        subdirs.push_back(entry.path());
    }
    std::sort(subdirs.begin(), subdirs.end());

    for (const auto& sub : subdirs) {
        const fs::path skill_md = sub / "SKILL.md";
        if (!fs::exists(skill_md)) {
            index.warnings.push_back(sub.string() + ": no SKILL.md");
            continue;
        }
        try {
            const auto parsed = parse_skill_md(read_text_file(skill_md), skill_md.string());
            index.entries.push_back(IndexEntry{parsed.frontmatter.name_or_empty(),
                                               parsed.frontmatter.description_or_empty(),
                                               parsed.frontmatter.kind.value_or(""), sub});
        } catch (const ParseError& e) {
            index.warnings.push_back(e.what());
        }
    }
    std::sort(index.entries.begin(), index.entries.end(),
              [](const IndexEntry& a, const IndexEntry& b) {
                  return a.name == b.name ? a.path < b.path : a.name < b.name;
              });
    return index;
}

} // namespace swarmskills
