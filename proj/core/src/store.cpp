#include "mlab/store.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "mlab/error.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace {

namespace fs = std::filesystem;

fs::path project_dir(const fs::path& store_dir, const ProjectId& project) {
  return store_dir / project.dir_name();
}

void canonical_order(std::vector<ThreadRecord>& threads, std::vector<CommitRecord>& commits,
                     std::vector<DeveloperRecord>& developers) {
  std::sort(threads.begin(), threads.end(),
            [](const auto& a, const auto& b) { return a.number < b.number; });
  std::sort(commits.begin(), commits.end(), [](const auto& a, const auto& b) {
    return std::tie(a.author_date, a.sha) < std::tie(b.author_date, b.sha);
  });
  std::sort(developers.begin(), developers.end(), [](const auto& a, const auto& b) {
    return lower_login(a.login) < lower_login(b.login);
  });
  for (auto& t : threads)
    std::stable_sort(t.events.begin(), t.events.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
}

void check_invariants(const ProjectId& project, const std::vector<ThreadRecord>& threads,
                      const std::vector<CommitRecord>& commits,
                      const std::vector<DeveloperRecord>& developers) {
  std::set<std::int64_t> numbers;
  for (const auto& t : threads) {
    if (!(t.project == project))
      throw Error("thread " + std::to_string(t.number) + " belongs to " + t.project.slug() +
                  ", not " + project.slug());
    if (!numbers.insert(t.number).second)
      throw Error("duplicate thread number " + std::to_string(t.number) + " in " + project.slug());
    for (const auto& e : t.events)
      if (e.timestamp < t.created_at)
        throw Error("thread " + std::to_string(t.number) + " of " + project.slug() +
                    " has a comment dated before thread creation (" +
                    format_iso8601(e.timestamp) + " < " + format_iso8601(t.created_at) + ")");
  }
  std::set<std::string> shas;
  for (const auto& c : commits)
    if (!shas.insert(c.sha).second) throw Error("duplicate commit sha " + c.sha);
  std::set<std::string> logins;
  for (const auto& d : developers)
    if (!logins.insert(lower_login(d.login)).second)
      throw Error("duplicate developer login " + d.login);
}

std::string render_threads(const std::vector<ThreadRecord>& threads) {
  std::string out;
  for (const auto& t : threads) out += jsonio::to_jsonl_line(jsonio::thread_to_json(t));
  return out;
}

std::string render_commits(const std::vector<CommitRecord>& commits) {
  std::string out;
  for (const auto& c : commits) out += jsonio::to_jsonl_line(jsonio::commit_to_json(c));
  return out;
}

std::string render_developers(const std::vector<DeveloperRecord>& developers) {
  std::string out;
  for (const auto& d : developers) out += jsonio::to_jsonl_line(jsonio::developer_to_json(d));
  return out;
}

template <typename Record, typename ParseFn>
std::vector<Record> parse_jsonl(const fs::path& file, ParseFn parse) {
  std::vector<Record> out;
  if (!fs::exists(file)) return out;
  const std::string content = read_file(file);
  std::istringstream in(content);
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

}  // namespace

ProjectStore ProjectStore::from_records(ProjectId project, std::vector<ThreadRecord> threads,
                                        std::vector<CommitRecord> commits,
                                        std::vector<DeveloperRecord> developers) {
  canonical_order(threads, commits, developers);
  check_invariants(project, threads, commits, developers);
  ProjectStore s;
  s.manifest_.project = std::move(project);
  s.manifest_.counts = {{"threads", static_cast<std::int64_t>(threads.size())},
                        {"commits", static_cast<std::int64_t>(commits.size())},
                        {"developers", static_cast<std::int64_t>(developers.size())}};
  s.manifest_.source = "memory";
  s.threads_ = std::move(threads);
  s.commits_ = std::move(commits);
  s.developers_ = std::move(developers);
  Fnv1a64 digest;
  digest.update(render_threads(s.threads_));
  digest.update(render_commits(s.commits_));
  digest.update(render_developers(s.developers_));
  s.manifest_.digest = digest.hex();
  s.index();
  return s;
}

void ProjectStore::index() {
  for (std::size_t i = 0; i < threads_.size(); ++i) thread_by_number_[threads_[i].number] = i;
  for (std::size_t i = 0; i < commits_.size(); ++i) commit_by_sha_[commits_[i].sha] = i;
  for (std::size_t i = 0; i < developers_.size(); ++i)
    developer_by_login_[lower_login(developers_[i].login)] = i;
}

const ThreadRecord* ProjectStore::find_thread(std::int64_t number) const {
  const auto it = thread_by_number_.find(number);
  return it == thread_by_number_.end() ? nullptr : &threads_[it->second];
}

const CommitRecord* ProjectStore::find_commit(std::string_view sha) const {
  const auto it = commit_by_sha_.find(std::string(sha));
  return it == commit_by_sha_.end() ? nullptr : &commits_[it->second];
}

const DeveloperRecord* ProjectStore::find_developer(std::string_view login) const {
  const auto it = developer_by_login_.find(lower_login(login));
  return it == developer_by_login_.end() ? nullptr : &developers_[it->second];
}

bool ProjectStore::exists(const fs::path& store_dir, const ProjectId& project) {
  return fs::exists(project_dir(store_dir, project) / "manifest.json");
}

std::vector<ProjectId> ProjectStore::list_projects(const fs::path& store_dir) {
  std::vector<ProjectId> out;
  if (!fs::exists(store_dir)) return out;
  for (const auto& entry : fs::directory_iterator(store_dir)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "manifest.json")) continue;
    const auto j = nlohmann::json::parse(read_file(entry.path() / "manifest.json"));
    out.push_back(jsonio::manifest_from_json(j).project);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ProjectStore ProjectStore::open(const fs::path& store_dir, const ProjectId& project) {
  const fs::path dir = project_dir(store_dir, project);
  if (!fs::exists(dir / "manifest.json"))
    throw Error("unknown project " + project.slug() + " in store " + store_dir.string());
  ProjectStore s;
  s.manifest_ = jsonio::manifest_from_json(nlohmann::json::parse(read_file(dir / "manifest.json")));
  s.threads_ = parse_jsonl<ThreadRecord>(dir / "threads.jsonl", jsonio::thread_from_json);
  s.commits_ = parse_jsonl<CommitRecord>(dir / "commits.jsonl", jsonio::commit_from_json);
  s.developers_ =
      parse_jsonl<DeveloperRecord>(dir / "developers.jsonl", jsonio::developer_from_json);
  check_invariants(project, s.threads_, s.commits_, s.developers_);
  s.index();
  return s;
}

StoreManifest write_store(const fs::path& store_dir, const ProjectId& project,
                          std::vector<ThreadRecord> threads, std::vector<CommitRecord> commits,
                          std::vector<DeveloperRecord> developers, bool complete,
                          const std::string& source,
                          const std::vector<std::string>& incomplete_reasons) {
  canonical_order(threads, commits, developers);
  check_invariants(project, threads, commits, developers);

  const std::string threads_bytes = render_threads(threads);
  const std::string commits_bytes = render_commits(commits);
  const std::string developers_bytes = render_developers(developers);

  Fnv1a64 digest;
  digest.update(threads_bytes);
  digest.update(commits_bytes);
  digest.update(developers_bytes);

  StoreManifest m;
  m.project = project;
  m.counts = {{"threads", static_cast<std::int64_t>(threads.size())},
              {"commits", static_cast<std::int64_t>(commits.size())},
              {"developers", static_cast<std::int64_t>(developers.size())}};
  m.digest = digest.hex();
  m.complete = complete;
  m.source = source;
  m.incomplete_reasons = incomplete_reasons;

  const fs::path dir = project_dir(store_dir, project);
  fs::create_directories(dir);
  write_file(dir / "threads.jsonl", threads_bytes);
  write_file(dir / "commits.jsonl", commits_bytes);
  write_file(dir / "developers.jsonl", developers_bytes);
  write_file(dir / "manifest.json", jsonio::manifest_to_json(m).dump(2) + "\n");
  return m;
}

ValidationReport validate_store(const ProjectStore& store) {
  ValidationReport r;
  for (const auto& t : store.threads())
    if (t.events.empty()) ++r.zero_event_threads;

  std::set<std::string> committers;
  for (const auto& c : store.commits()) {
    if (!c.author_login || c.author_login->empty())
      ++r.commits_without_author;
    else
      committers.insert(lower_login(*c.author_login));
  }
  for (const auto& login : committers)
    if (!store.find_developer(login)) ++r.committers_missing_developer_record;

  r.complete = true;
  if (store.threads().empty()) {
    r.complete = false;
    r.reasons.emplace_back("no threads");
  }
  if (!store.manifest().complete) {
    r.complete = false;
    r.reasons.insert(r.reasons.end(), store.manifest().incomplete_reasons.begin(),
                     store.manifest().incomplete_reasons.end());
    if (store.manifest().incomplete_reasons.empty()) r.reasons.emplace_back("marked incomplete at ingest");
  }
  return r;
}

}  // namespace mlab
