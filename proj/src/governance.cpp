#include "swarmskills/governance.hpp"

#include "swarmskills/errors.hpp"
#include "swarmskills/scoring.hpp"
#include "swarmskills/sha256.hpp"
#include "swarmskills/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fcntl.h>
#include <set>
#include <unistd.h>

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

namespace swarmskills {

namespace {

const std::vector<std::string> kRuntimeEntries = {kArchiveDirName, kLockFileName};

std::string join_versions(const std::vector<int>& versions) {
    std::string out = "[";
    for (std::size_t i = 0; i < versions.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(versions[i]);
    }
    return out + "]";
}

std::string next_evo_id(const EvolutionExperience& experience, Timestamp now, int& seq) {
    const std::string date = utc_compact_date(now);
    char buf[32];
    do {
        ++seq;
        std::snprintf(buf, sizeof(buf), "evo_%s_%03d", date.c_str(), seq);
    } while (experience.contains(buf));
    return buf;
}

} // namespace

// ─── Archive store ─────────────────────────────────────────────────

ArchiveStore::ArchiveStore(fs::path skill_dir)
    : skill_dir_(std::move(skill_dir)), archive_root_(skill_dir_ / kArchiveDirName) {}

std::vector<int> ArchiveStore::versions() const {
    std::vector<int> out;
    if (!fs::exists(archive_root_)) return out;
    for (const auto& entry : fs::directory_iterator(archive_root_)) {
        if (!entry.is_directory()) continue;
        const std::string base = entry.path().filename().string();
        if (base.empty() ||
            !std::all_of(base.begin(), base.end(), [](unsigned char c) { return std::isdigit(c); }))
            continue;
        out.push_back(std::stoi(base));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool ArchiveStore::has_version(int version) const {
    return fs::exists(archive_root_ / std::to_string(version) / "manifest.json");
}

ArchiveSnapshot ArchiveStore::manifest(int version) const {
    if (!has_version(version)) {
        throw DomainError("unknown archive version " + std::to_string(version) +
                          "; available: " + join_versions(versions()));
    }
    const fs::path manifest_path = archive_root_ / std::to_string(version) / "manifest.json";
    njson j;
    try {
        j = njson::parse(read_text_file(manifest_path));
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid manifest: ") + e.what(), manifest_path.string());
    }
    ArchiveSnapshot snap;
    snap.version = j.value("version", version);
    const auto at = parse_rfc3339(j.value("created_at", std::string{}));
    snap.created_at = at.value_or(Timestamp{0});
    snap.reason = j.value("reason", std::string{});
    if (j.contains("files")) {
        for (const auto& [rel, hash] : j["files"].items()) {
            snap.file_hashes[rel] = hash.get<std::string>();
        }
    }
    return snap;
}

int ArchiveStore::snapshot(const std::string& reason, Timestamp now) {
    const auto existing = versions();
    const int version = existing.empty() ? 1 : existing.back() + 1;
    const fs::path dest = archive_root_ / std::to_string(version);
    if (fs::exists(dest)) {
        throw DomainError("archive version " + std::to_string(version) + " already exists");
    }

    njson files = njson::object();
    for (const auto& rel : list_tree(skill_dir_, kRuntimeEntries)) {
        const std::string content = read_text_file(skill_dir_ / rel);
        write_text_file(dest / rel, content);
        files[rel] = sha256_hex(content);
    }
    njson manifest;
    manifest["version"] = version;
    manifest["created_at"] = format_rfc3339(now);
    manifest["reason"] = reason;
    manifest["files"] = files;
    write_text_file(dest / "manifest.json", manifest.dump(2) + "\n");
    return version;
}

void ArchiveStore::restore(int version) {
    const ArchiveSnapshot snap = manifest(version);
    const fs::path src = archive_root_ / std::to_string(version);

    // Integrity first: nothing is wiped if the archive itself is damaged.
    std::map<std::string, std::string> contents;
    for (const auto& [rel, expected] : snap.file_hashes) {
        const std::string content = read_text_file(src / rel);
        if (sha256_hex(content) != expected) {
            throw DomainError("archive version " + std::to_string(version) +
                              " is corrupted at " + rel);
        }
        contents[rel] = content;
    }

    wipe_dir_except(skill_dir_, kRuntimeEntries);
    for (const auto& [rel, content] : contents) {
        write_text_file(skill_dir_ / rel, content);
    }
}

// ─── Directory lock ────────────────────────────────────────────────

DirectoryLock::DirectoryLock(const fs::path& skill_dir)
    : lock_path_(skill_dir / kLockFileName) {
    const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw DomainError("skill directory is locked: " + lock_path_.string());
    }
    ::close(fd);
}

DirectoryLock::~DirectoryLock() {
    std::error_code ec;
    fs::remove(lock_path_, ec);
}

// ─── SIMPLIFY ──────────────────────────────────────────────────────

bool should_govern(const EvolutionExperience& experience, const ScoringConfig& config) {
    return experience.non_terminal_count() >= config.simplify_capacity;
}

SimplifyPlan StubCurator::plan(const std::vector<EvolutionRecord>& non_terminal,
                               const ScoringConfig& config, Timestamp now) {
    SimplifyPlan plan;
    std::vector<const EvolutionRecord*> remaining;
    for (const auto& rec : non_terminal) {
        const double score = composite(rec.score_state, now, config);
        const double fresh = freshness(rec.score_state, now, config);
        if (score < config.dormancy_threshold && fresh < 0.25) {
            plan.deletions.push_back(rec.id);
        } else {
            remaining.push_back(&rec);
        }
    }

    // Merge candidates: active records sharing (action, target-file set).
    std::map<std::string, std::vector<std::string>> groups;
    std::vector<std::string> group_order;
    for (const auto* rec : remaining) {
        if (rec->status != RecordStatus::Active) {
            plan.retentions.push_back(rec->id);
            continue;
        }
        std::vector<std::string> targets = rec->change_directive.target_files;
        std::sort(targets.begin(), targets.end());
        std::string key = rec->change_directive.action;
        for (const auto& target : targets) key += "\x01" + target;
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) group_order.push_back(key);
        it->second.push_back(rec->id);
    }
    for (const auto& key : group_order) {
        auto& ids = groups.at(key);
        if (ids.size() >= 2) {
            plan.merges.push_back(ids);
        } else {
            plan.retentions.push_back(ids.front());
        }
    }
    return plan;
}

namespace {

void check_plan(const SimplifyPlan& plan, const std::vector<EvolutionRecord>& non_terminal) {
    std::set<std::string> eligible;
    std::map<std::string, RecordStatus> status_of;
    for (const auto& rec : non_terminal) {
        eligible.insert(rec.id);
        status_of[rec.id] = rec.status;
    }

    std::set<std::string> used;
    auto claim = [&](const std::string& id, const char* bucket) {
        if (!eligible.count(id)) {
            throw DomainError("curator plan rejected: " + std::string(bucket) +
                              " names unknown or terminal record \"" + id + "\"");
        }
        if (!used.insert(id).second) {
            throw DomainError("curator plan rejected: record \"" + id +
                              "\" appears in more than one partition");
        }
    };
    for (const auto& id : plan.deletions) claim(id, "deletions");
    for (const auto& group : plan.merges) {
        if (group.size() < 2) {
            throw DomainError("curator plan rejected: merge group smaller than 2");
        }
        for (const auto& id : group) {
            claim(id, "merges");
            if (status_of.at(id) != RecordStatus::Active) {
                throw DomainError("curator plan rejected: merge member \"" + id +
                                  "\" is not active (no dormant -> merged transition)");
            }
        }
    }
    for (const auto& [id, context] : plan.refinements) {
        (void)context;
        claim(id, "refinements");
    }
    for (const auto& id : plan.retentions) claim(id, "retentions");

    if (used.size() != eligible.size()) {
        throw DomainError("curator plan rejected: plan does not cover every non-terminal record");
    }
}

} // namespace

SimplifyResult simplify(const SwarmSkill& skill, Curator& curator, const ScoringConfig& config,
                        Timestamp now) {
    std::vector<EvolutionRecord> non_terminal;
    for (const auto& rec : skill.experience.records) {
        if (!is_terminal(rec.status)) non_terminal.push_back(rec);
    }

    SimplifyPlan plan = curator.plan(non_terminal, config, now);
    check_plan(plan, non_terminal);

    SimplifyResult result;
    result.skill = skill;
    result.plan = plan;
    EvolutionExperience& experience = result.skill.experience;

    for (const auto& id : plan.deletions) {
        experience.find(id)->status = RecordStatus::Deleted;
    }
    int seq = 0;
    for (const auto& group : plan.merges) {
        EvolutionRecord merged;
        merged.id = next_evo_id(experience, now, seq);
        merged.created_at = now;
        merged.status = RecordStatus::Active;
        merged.score_state = new_score_state(Timestamp{0});
        std::vector<std::string> contents;
        for (const auto& id : group) {
            EvolutionRecord* member = experience.find(id);
            member->status = RecordStatus::Merged;
            if (!merged.context.empty()) merged.context += "\n";
            merged.context += member->context;
            if (merged.change_directive.action.empty()) {
                merged.change_directive = member->change_directive;
            }
            const std::string& content = member->change_directive.content;
            if (std::find(contents.begin(), contents.end(), content) == contents.end()) {
                contents.push_back(content);
            }
            merged.score_state.success_count += member->score_state.success_count;
            merged.score_state.failure_count += member->score_state.failure_count;
            merged.score_state.offered_count += member->score_state.offered_count;
            merged.score_state.applied_count += member->score_state.applied_count;
            merged.score_state.last_observed_at = std::max(
                merged.score_state.last_observed_at, member->score_state.last_observed_at);
        }
        merged.change_directive.content.clear();
        for (std::size_t i = 0; i < contents.size(); ++i) {
            if (i) merged.change_directive.content += "\n";
            merged.change_directive.content += contents[i];
        }
        result.merged_ids.push_back(merged.id);
        experience.records.push_back(std::move(merged));
    }
    for (const auto& [id, context] : plan.refinements) {
        experience.find(id)->context = context;
    }
    return result;
}

// ─── REBUILD ───────────────────────────────────────────────────────

namespace {

void append_evolved_guidance(std::string& text, const std::string& content) {
    if (text.find("## Evolved Guidance") == std::string::npos) {
        if (!text.empty() && text.back() != '\n') text += "\n";
        text += "\n## Evolved Guidance\n";
    }
    text += "\n" + content + "\n";
}

// Mutable view over the fold targets the mechanical rewriter understands.
std::string* target_text(SwarmSkill& skill, const std::string& target) {
    if (target == "SKILL.md") return &skill.body;
    if (target == "workflow.md") {
        if (!skill.workflow) skill.workflow = std::string{};
        return &*skill.workflow;
    }
    if (target == "bind.md") {
        if (!skill.bounds) skill.bounds = ExecutionBounds{};
        return &skill.bounds->raw_text;
    }
    if (target.rfind("roles/", 0) == 0 && target.ends_with(".md")) {
        const std::string id = target.substr(6, target.size() - 9);
        return &skill.roles[id];
    }
    return nullptr;
}

std::string role_id_from_target(const std::string& target) {
    if (target.rfind("roles/", 0) == 0 && target.ends_with(".md")) {
        return target.substr(6, target.size() - 9);
    }
    return {};
}

} // namespace

SwarmSkill StubRewriter::rewrite(const SwarmSkill& skill,
                                 const std::vector<EvolutionRecord>& active) {
    SwarmSkill out = skill;
    for (const auto& rec : active) {
        const ChangeDirective& directive = rec.change_directive;
        const std::string& action_name = directive.action;

        if (action_name == action::kSplitRole || action_name == action::kAddRole) {
            std::string new_id;
            for (const auto& target : directive.target_files) {
                const std::string id = role_id_from_target(target);
                if (!id.empty() && !out.frontmatter.find_role(id)) {
                    new_id = id;
                    break;
                }
            }
            if (new_id.empty()) {
                throw DomainError("record " + rec.id + ": " + action_name +
                                  " names no new roles/<id>.md target");
            }
            out.roles[new_id] = directive.content;
            if (!out.frontmatter.roles) out.frontmatter.roles = std::vector<RoleDecl>{};
            out.frontmatter.roles->push_back(RoleDecl{new_id, {}, {}, std::nullopt});
            if (action_name == action::kSplitRole) {
                if (!out.workflow) out.workflow = std::string{};
                append_evolved_guidance(*out.workflow,
                                        "Routing: run the '" + new_id +
                                            "' role in parallel once its inputs are ready "
                                            "(split from an existing role).");
            }
        } else if (action_name == action::kRemoveRole) {
            for (const auto& target : directive.target_files) {
                const std::string id = role_id_from_target(target);
                if (id.empty()) continue;
                out.roles.erase(id);
                if (out.frontmatter.roles) {
                    auto& decls = *out.frontmatter.roles;
                    decls.erase(std::remove_if(decls.begin(), decls.end(),
                                               [&](const RoleDecl& r) { return r.id == id; }),
                                decls.end());
                }
            }
        } else if (action_name == action::kReplace) {
            const std::size_t marker = directive.content.find("\n=>\n");
            if (marker == std::string::npos) {
                // No marker pair: fold as a note so the content survives.
                for (const auto& target : directive.target_files) {
                    if (std::string* text = target_text(out, target)) {
                        append_evolved_guidance(*text, directive.content);
                    } else {
                        throw DomainError("record " + rec.id + ": unsupported target " + target);
                    }
                }
                continue;
            }
            const std::string old_text = directive.content.substr(0, marker);
            const std::string new_text = directive.content.substr(marker + 4);
            for (const auto& target : directive.target_files) {
                std::string* text = target_text(out, target);
                if (!text) {
                    throw DomainError("record " + rec.id + ": unsupported target " + target);
                }
                const std::size_t at = text->find(old_text);
                if (at != std::string::npos && !old_text.empty()) {
                    text->replace(at, old_text.size(), new_text);
                }
            }
        } else if (action_name == action::kDelete) {
            for (const auto& target : directive.target_files) {
                std::string* text = target_text(out, target);
                if (!text) {
                    throw DomainError("record " + rec.id + ": unsupported target " + target);
                }
                if (directive.content.empty()) continue;
                const std::size_t at = text->find(directive.content);
                if (at != std::string::npos) text->erase(at, directive.content.size());
            }
        } else {
            // INSERT and preserved unknown actions fold as appended guidance.
            for (const auto& target : directive.target_files) {
                std::string* text = target_text(out, target);
                if (!text) {
                    throw DomainError("record " + rec.id + ": unsupported target " + target);
                }
                append_evolved_guidance(*text, directive.content);
            }
        }
    }
    if (out.bounds) {
        out.bounds = parse_execution_bounds(out.bounds->raw_text).first;
    }
    return out;
}

RebuildResult rebuild(const SwarmSkill& skill, SkillRewriter& rewriter, ArchiveStore& store,
                      Timestamp now, const RebuildOptions& options) {
    std::vector<EvolutionRecord> active;
    for (const auto& rec : skill.experience.records) {
        if (rec.status == RecordStatus::Active ||
            (options.include_dormant && rec.status == RecordStatus::Dormant)) {
            active.push_back(rec);
        }
    }
    if (active.empty()) {
        throw DomainError("rebuild refused: no active evolution records to fold");
    }
    const fs::path dir = skill.source_dir;
    if (dir.empty() || !fs::is_directory(dir)) {
        throw DomainError("rebuild requires a skill backed by a directory");
    }

    // Archive first; a failing snapshot aborts before any base-file mutation.
    const int version = store.snapshot(kPreRebuild, now);

    try {
        SwarmSkill updated = rewriter.rewrite(skill, active);
        updated.experience = EvolutionExperience{};
        updated.source_dir = dir;

        // Replace the managed file set wholesale so dropped roles disappear.
        std::error_code ec;
        fs::remove(dir / "SKILL.md", ec);
        fs::remove(dir / "workflow.md", ec);
        fs::remove(dir / "bind.md", ec);
        fs::remove(dir / "evolutions.json", ec);
        fs::remove_all(dir / "roles", ec);
        serialize_skill(updated, dir);

        SwarmSkill reparsed = parse_skill(dir);
        const ValidationReport report = validate(reparsed, Profile::Swarm);
        if (!report.conformant()) {
            std::string detail;
            for (const auto& v : report.violations) {
                if (v.severity != Severity::Error) continue;
                detail = v.path + ": " + v.message;
                break;
            }
            throw DomainError("rebuild validation failed: " + detail);
        }
        return RebuildResult{std::move(reparsed), version, static_cast<int>(active.size())};
    } catch (...) {
        store.restore(version);
        throw;
    }
}

SwarmSkill rollback(const fs::path& skill_dir, ArchiveStore& store, int version, Timestamp now) {
    if (!store.has_version(version)) {
        throw DomainError("unknown archive version " + std::to_string(version) +
                          "; available: " + join_versions(store.versions()));
    }
    store.snapshot(kPreRollback, now);
    store.restore(version);
    return parse_skill(skill_dir);
}

} // namespace swarmskills
