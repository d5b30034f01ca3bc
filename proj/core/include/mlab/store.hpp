#ifndef MLAB_STORE_HPP
#define MLAB_STORE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mlab/records.hpp"

namespace mlab {

struct StoreManifest {
  ProjectId project;
  std::map<std::string, std::int64_t> counts;  // threads, commits, developers
  std::string digest;                          // fnv-1a64 of the canonical jsonl bytes
  bool complete = true;
  std::string source;                          // "fixtures" or "api"
  std::vector<std::string> incomplete_reasons;
};

// Immutable per-project snapshot backed by threads/commits/developers.jsonl.
// Records are canonically ordered: threads by number, commits by
// (author_date, sha), developers by canonical login.
class ProjectStore {
public:
  static ProjectStore open(const std::filesystem::path& store_dir, const ProjectId& project);
  static bool exists(const std::filesystem::path& store_dir, const ProjectId& project);
  static std::vector<ProjectId> list_projects(const std::filesystem::path& store_dir);

  const ProjectId& project() const { return manifest_.project; }
  const StoreManifest& manifest() const { return manifest_; }
  const std::vector<ThreadRecord>& threads() const { return threads_; }
  const std::vector<CommitRecord>& commits() const { return commits_; }
  const std::vector<DeveloperRecord>& developers() const { return developers_; }

  const ThreadRecord* find_thread(std::int64_t number) const;
  const CommitRecord* find_commit(std::string_view sha) const;
  const DeveloperRecord* find_developer(std::string_view login) const;

  // In-memory construction (tests, synthetic data); applies canonical ordering.
  static ProjectStore from_records(ProjectId project, std::vector<ThreadRecord> threads,
                                   std::vector<CommitRecord> commits,
                                   std::vector<DeveloperRecord> developers);

private:
  ProjectStore() = default;
  void index();

  StoreManifest manifest_;
  std::vector<ThreadRecord> threads_;
  std::vector<CommitRecord> commits_;
  std::vector<DeveloperRecord> developers_;
  std::map<std::int64_t, std::size_t> thread_by_number_;
  std::map<std::string, std::size_t> commit_by_sha_;
  std::map<std::string, std::size_t> developer_by_login_;
};

// Writes the canonical store for one project under store_dir/<owner>__<name>/.
// Re-writing is a full replacement; identical inputs give identical bytes.
StoreManifest write_store(const std::filesystem::path& store_dir, const ProjectId& project,
                          std::vector<ThreadRecord> threads, std::vector<CommitRecord> commits,
                          std::vector<DeveloperRecord> developers, bool complete,
                          const std::string& source,
                          const std::vector<std::string>& incomplete_reasons = {});

struct ValidationReport {
  bool complete = false;
  std::vector<std::string> reasons;
  std::int64_t zero_event_threads = 0;
  std::int64_t commits_without_author = 0;
  std::int64_t committers_missing_developer_record = 0;
};

// Completeness gate used downstream: incomplete projects are excluded from
// feature assembly. Unattributable commits and zero-event threads are
// reported but not fatal; an empty thread set or a crawl marked partial is.
ValidationReport validate_store(const ProjectStore& store);

}  // namespace mlab

#endif  // MLAB_STORE_HPP
