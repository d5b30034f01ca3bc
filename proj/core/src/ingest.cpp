#include "mlab/ingest.hpp"

#include <cstdio>
#include <sstream>

#include "json_io.hpp"
#include "mlab/error.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace fs = std::filesystem;

// Implemented in github_api.cpp.
void crawl_github_project(const IngestOptions& options, const ProjectId& project,
                          std::vector<ThreadRecord>& threads, std::vector<CommitRecord>& commits,
                          std::vector<DeveloperRecord>& developers, bool& complete,
                          std::vector<std::string>& incomplete_reasons,
                          const fs::path& cursor_path);

namespace {

template <typename Record, typename ParseFn>
std::vector<Record> load_fixture_jsonl(const fs::path& file, ParseFn parse, bool required) {
  if (!fs::exists(file)) {
    if (required) throw Error("fixture file missing: " + file.string());
    return {};
  }
  std::vector<Record> out;
  std::istringstream in(read_file(file));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

fs::path resolve_fixture_dir(const IngestOptions& options, const ProjectId& project) {
  const fs::path nested = options.fixtures_dir / project.dir_name();
  if (fs::exists(nested / "threads.jsonl")) return nested;
  return options.fixtures_dir;
}

}  // namespace

StoreManifest ingest_project(const IngestOptions& options, const ProjectId& project,
                             const fs::path& store_dir) {
  std::vector<ThreadRecord> threads;
  std::vector<CommitRecord> commits;
  std::vector<DeveloperRecord> developers;
  bool complete = true;
  std::vector<std::string> reasons;

  if (options.source == IngestSource::fixtures) {
    const fs::path dir = resolve_fixture_dir(options, project);
    if (!fs::exists(dir)) throw Error("fixture directory not found: " + dir.string());
    threads = load_fixture_jsonl<ThreadRecord>(dir / "threads.jsonl", jsonio::thread_from_json, true);
    commits = load_fixture_jsonl<CommitRecord>(dir / "commits.jsonl", jsonio::commit_from_json, false);
    developers = load_fixture_jsonl<DeveloperRecord>(dir / "developers.jsonl",
                                                     jsonio::developer_from_json, false);
    for (const auto& t : threads)
      if (!(t.project == project))
        throw Error("fixture thread " + std::to_string(t.number) + " belongs to " +
                    t.project.slug() + ", expected " + project.slug());
  } else {
    const fs::path cursor = store_dir / project.dir_name() / "crawl_state.json";
    crawl_github_project(options, project, threads, commits, developers, complete, reasons, cursor);
  }

  return write_store(store_dir, project, std::move(threads), std::move(commits),
                     std::move(developers), complete, options.source == IngestSource::api ? "api" : "fixtures",
                     reasons);
}

std::vector<DiffHunk> parse_unified_patch(std::string_view patch) {
  std::vector<DiffHunk> hunks;
  std::istringstream in{std::string(patch)};
  std::string line;
  std::int64_t old_line = 0, new_line = 0;
  bool in_hunk = false;
  DiffHunk current;
  bool current_open = false;

  const auto flush = [&] {
    if (current_open && (!current.deleted.empty() || !current.added.empty()))
      hunks.push_back(std::move(current));
    current = DiffHunk{};
    current_open = false;
  };

  while (std::getline(in, line)) {
    if (line.rfind("@@", 0) == 0) {
      flush();
      // @@ -old_start[,old_count] +new_start[,new_count] @@
      long long os = 0, ns = 0;
      const char* s = line.c_str();
      const char* minus = std::strchr(s, '-');
      const char* plus = minus ? std::strchr(minus, '+') : nullptr;
      if (!minus || !plus || std::sscanf(minus, "-%lld", &os) != 1 ||
          std::sscanf(plus, "+%lld", &ns) != 1)
        throw Error("malformed hunk header: " + line);
      old_line = os;
      new_line = ns;
      in_hunk = true;
      continue;
    }
    if (!in_hunk) continue;
    if (line.empty()) continue;
    const char tag = line[0];
    const std::string text = line.substr(1);
    if (tag == '-') {
      if (!current_open) {
        current.old_start = old_line;
        current.new_start = new_line;
        current_open = true;
      }
      current.deleted.push_back(text);
      ++old_line;
    } else if (tag == '+') {
      if (!current_open) {
        current.old_start = old_line;
        current.new_start = new_line;
        current_open = true;
      }
      current.added.push_back(text);
      ++new_line;
    } else if (tag == ' ') {
      flush();
      ++old_line;
      ++new_line;
    } else if (tag == '\\') {
      // "\ No newline at end of file"
      continue;
    } else {
      throw Error("unexpected diff line: " + line);
    }
  }
  flush();
  return hunks;
}

}  // namespace mlab
