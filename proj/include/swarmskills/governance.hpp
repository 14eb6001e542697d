#pragma once

#include "swarmskills/codec.hpp"
#include "swarmskills/model.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace swarmskills {

// ─── Versioned archive ─────────────────────────────────────────────

struct ArchiveSnapshot {
    int version = 0;
    Timestamp created_at;
    std::string reason; // "pre_rebuild" | "pre_rollback"
    std::map<std::string, std::string> file_hashes; // relative path -> sha256
};

inline constexpr const char* kArchiveDirName = ".archive";
inline constexpr const char* kLockFileName = ".swarmskills.lock";
inline constexpr const char* kPreRebuild = "pre_rebuild";
inline constexpr const char* kPreRollback = "pre_rollback";

// Byte-exact snapshots of a skill directory under <dir>/.archive/<version>/,
// one manifest.json per version. Snapshots are immutable and versions only
// grow; the archive directory and lock file are never captured.
class ArchiveStore {
public:
    explicit ArchiveStore(std::filesystem::path skill_dir);

    std::vector<int> versions() const;
    bool has_version(int version) const;
    ArchiveSnapshot manifest(int version) const;

    // Returns the new version number.
    int snapshot(const std::string& reason, Timestamp now);

    // Replaces the live tree with the archived one: every archived file is
    // restored byte-exactly and files absent from the archive are removed.
    // Verifies manifest hashes first.
    void restore(int version);

private:
    std::filesystem::path skill_dir_;
    std::filesystem::path archive_root_;
};

// Advisory single-writer lock, held for governance operations and experience
// persistence. Throws DomainError when the directory is already locked.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& skill_dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

// ─── SIMPLIFY ──────────────────────────────────────────────────────

// Disjoint partitions over the non-terminal record ids. Every non-terminal
// id appears in exactly one of them; merge groups have >= 2 members and only
// active records (there is no dormant -> merged transition).
struct SimplifyPlan {
    std::vector<std::string> deletions;
    std::vector<std::vector<std::string>> merges;
    std::map<std::string, std::string> refinements; // id -> rewritten context
    std::vector<std::string> retentions;
};

class Curator {
public:
    virtual ~Curator() = default;
    virtual SimplifyPlan plan(const std::vector<EvolutionRecord>& non_terminal,
                              const ScoringConfig& config, Timestamp now) = 0;
};

// Delete when composite < dormancy threshold AND freshness < 0.25; merge
// active records sharing (action, target-file set); refine nothing; retain
// the rest.
class StubCurator final : public Curator {
public:
    SimplifyPlan plan(const std::vector<EvolutionRecord>& non_terminal,
                      const ScoringConfig& config, Timestamp now) override;
};

struct SimplifyResult {
    SwarmSkill skill;
    SimplifyPlan plan;
    std::vector<std::string> merged_ids; // replacement record ids, one per group
};

// True iff the count of non-terminal records has reached capacity.
bool should_govern(const EvolutionExperience& experience, const ScoringConfig& config);

// Applies the curator's plan in memory and returns the updated skill. A plan
// violating the partition rules is rejected (DomainError) and the skill is
// unchanged. Base files are untouched; only the experience changes.
SimplifyResult simplify(const SwarmSkill& skill, Curator& curator,
                        const ScoringConfig& config, Timestamp now);

// ─── REBUILD / ROLLBACK ────────────────────────────────────────────

class SkillRewriter {
public:
    virtual ~SkillRewriter() = default;
    virtual SwarmSkill rewrite(const SwarmSkill& skill,
                               const std::vector<EvolutionRecord>& active) = 0;
};

// Mechanical fold of each active directive into the base files:
//   INSERT      append content under an "## Evolved Guidance" heading
//   REPLACE     content "old\n=>\nnew", first occurrence swapped
//   DELETE      first occurrence of content removed
//   SPLIT_ROLE  new roles/<id>.md from content, RoleDecl appended, routing
//               note added to workflow.md
//   ADD_ROLE    new role + persona file
//   REMOVE_ROLE role decl and persona file dropped
// Unknown actions fold as INSERT-style notes so their content survives the
// experience wipe.
class StubRewriter final : public SkillRewriter {
public:
    SwarmSkill rewrite(const SwarmSkill& skill,
                       const std::vector<EvolutionRecord>& active) override;
};

struct RebuildResult {
    SwarmSkill skill;
    int archived_version = 0;
    int folded_records = 0;
};

struct RebuildOptions {
    // Dormant records are discarded with the cleared experience by default;
    // set this to fold them alongside the active ones.
    bool include_dormant = false;
};

// Snapshot (pre_rebuild), fold the selected records into the base files,
// clear the experience, then re-validate under the swarm profile. Any
// failure after the snapshot restores it, leaving the directory
// byte-identical. Refuses when nothing would be folded. Caller holds the
// directory lock.
RebuildResult rebuild(const SwarmSkill& skill, SkillRewriter& rewriter, ArchiveStore& store,
                      Timestamp now, const RebuildOptions& options = {});

// Snapshot current state (pre_rollback), then restore the requested version.
// Unknown versions raise DomainError listing what exists.
SwarmSkill rollback(const std::filesystem::path& skill_dir, ArchiveStore& store,
                    int version, Timestamp now);

} // namespace swarmskills
