#ifndef MLAB_SZZ_HPP
#define MLAB_SZZ_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlab/store.hpp"

namespace mlab {

struct FixEvidence {
  std::string keyword;      // matched closing keyword, lowercased
  std::size_t offset = 0;   // byte offset of the keyword in the scanned text
};

enum class FixerKind { commit, pull_request };

struct FixLink {
  std::int64_t issue_number = 0;
  FixerKind fixer_kind = FixerKind::commit;
  std::string commit_sha;                 // when fixer_kind == commit
  std::int64_t pr_number = 0;             // when fixer_kind == pull_request
  FixEvidence evidence;
  std::vector<std::string> fixing_shas;   // resolved fixing commit(s)
};

struct FixScan {
  std::vector<FixLink> links;
  std::vector<FixLink> dangling;  // reference a thread number absent from the store
};

// Closing-keyword scan over commit messages and pull-request opening posts.
// A PR link attributes fixing to the PR's merge commit(s); duplicates are
// collapsed per (issue, fixer).
FixScan find_fix_links(const ProjectStore& store);

struct SzzOptions {
  bool skip_whitespace_only = true;  // skip cosmetic prior changes while blaming
  bool track_renames = true;
  // When set, fix links whose evidence (fixing commits, and the PR opening
  // post for PR links) is not strictly before this instant are ignored.
  // Windowed counts default this to the window end so that covariates never
  // depend on later data.
  std::optional<UtcTime> evidence_cutoff;
};

struct BuggyAttribution {
  std::string buggy_sha;
  std::string fixing_sha;
  std::vector<std::pair<std::string, std::int64_t>> lines;  // (path, parent-side line)
};

struct AttributionResult {
  std::vector<BuggyAttribution> attributions;
  std::int64_t unresolved_lines = 0;
  std::vector<std::string> warnings;
};

// Indexed commit DAG for blame walks (mainline/first-parent traversal).
class CommitHistory {
public:
  explicit CommitHistory(std::span<const CommitRecord> commits);
  const CommitRecord* find(std::string_view sha) const;

private:
  std::map<std::string, const CommitRecord*> by_sha_;
};

// For every line deleted or modified by the fix, walks the per-file line
// history back to the most recent earlier commit that last touched the line
// and flags it buggy. Pure-addition fixes attribute nothing.
AttributionResult attribute_buggy(const FixLink& fix, const CommitHistory& history,
                                  const SzzOptions& options = {});

AttributionResult attribute_all(const ProjectStore& store, const SzzOptions& options = {});

// Distinct buggy commits per developer, windowed by buggy-commit author date.
std::map<std::string, std::int64_t> buggy_commit_counts(const ProjectStore& store,
                                                        const TimeWindow& window,
                                                        const SzzOptions& options = {});

// Fixing-commit authorship counts; reported in metrics output only.
std::map<std::string, std::int64_t> fixing_commit_counts(const ProjectStore& store,
                                                         const TimeWindow& window);

void write_attributions_jsonl(const std::filesystem::path& path, const AttributionResult& result);

}  // namespace mlab

#endif  // MLAB_SZZ_HPP
