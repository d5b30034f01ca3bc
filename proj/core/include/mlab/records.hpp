#ifndef MLAB_RECORDS_HPP
#define MLAB_RECORDS_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlab/time.hpp"

namespace mlab {

struct ProjectId {
  std::string owner;
  std::string name;

  // Parses "owner/name"; both parts must be nonempty and free of '/'.
  static ProjectId parse(std::string_view owner_slash_name);

  std::string slug() const { return owner + "/" + name; }
  std::string dir_name() const { return owner + "__" + name; }  // filesystem-safe

  auto operator<=>(const ProjectId&) const = default;
};

enum class ThreadKind { issue, pull_request };

std::string_view to_string(ThreadKind k);
std::optional<ThreadKind> thread_kind_from_string(std::string_view s);

struct CommentEvent {
  std::string author;
  UtcTime timestamp;
  std::string body;  // raw markdown, stored verbatim
};

// events[0] is the opening post of the thread.
struct ThreadRecord {
  ProjectId project;
  std::int64_t number = 0;
  ThreadKind kind = ThreadKind::issue;
  UtcTime created_at;
  std::string author;
  std::vector<CommentEvent> events;
};

// One contiguous edit: `deleted` lines start at parent-side line `old_start`,
// `added` lines start at child-side line `new_start`. Line numbers are 1-based.
struct DiffHunk {
  std::int64_t old_start = 0;
  std::vector<std::string> deleted;
  std::int64_t new_start = 0;
  std::vector<std::string> added;
};

struct FileChange {
  std::string path;
  std::optional<std::string> old_path;  // set when this commit renamed the file
  std::vector<DiffHunk> hunks;
};

struct CommitRecord {
  std::string sha;  // 40-hex
  std::optional<std::string> author_login;
  UtcTime author_date;
  std::string message;
  std::vector<std::string> parents;  // first parent is the mainline
  std::vector<FileChange> file_changes;
};

struct DeveloperRecord {
  std::string login;
  UtcTime github_created_at;
};

// Canonical login: strips one leading '@' and lowercases (GitHub logins are
// case-insensitive).
std::string lower_login(std::string_view login);
bool same_login(std::string_view a, std::string_view b);

bool is_hex_sha(std::string_view sha);

}  // namespace mlab

#endif  // MLAB_RECORDS_HPP
