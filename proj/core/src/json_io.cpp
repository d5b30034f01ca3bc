#include "json_io.hpp"

#include "mlab/error.hpp"

namespace mlab::jsonio {

namespace {

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw Error(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t require_int(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) throw Error(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

UtcTime require_time(const json& j, const char* key) {
  const auto s = require_string(j, key);
  const auto t = parse_iso8601(s);
  if (!t) throw Error(std::string("field '") + key + "' is not an ISO-8601 UTC timestamp: '" + s + "'");
  return *t;
}

}  // namespace

json thread_to_json(const ThreadRecord& t) {
  json events = json::array();
  for (const auto& e : t.events) {
    events.push_back(json{{"author", e.author},
                          {"timestamp", format_iso8601(e.timestamp)},
                          {"body", e.body}});
  }
  return json{{"project", t.project.slug()},
              {"number", t.number},
              {"kind", std::string(to_string(t.kind))},
              {"created_at", format_iso8601(t.created_at)},
              {"author", t.author},
              {"events", std::move(events)}};
}

ThreadRecord thread_from_json(const json& j) {
  ThreadRecord t;
  t.project = ProjectId::parse(require_string(j, "project"));
  t.number = require_int(j, "number");
  if (t.number <= 0) throw Error("thread 'number' must be positive");
  const auto kind = thread_kind_from_string(require_string(j, "kind"));
  if (!kind) throw Error("thread 'kind' must be 'issue' or 'pull_request'");
  t.kind = *kind;
  t.created_at = require_time(j, "created_at");
  t.author = require_string(j, "author");
  const json& events = require(j, "events");
  if (!events.is_array()) throw Error("thread 'events' must be an array");
  for (const auto& ej : events) {
    CommentEvent e;
    e.author = require_string(ej, "author");
    e.timestamp = require_time(ej, "timestamp");
    e.body = require_string(ej, "body");
    t.events.push_back(std::move(e));
  }
  return t;
}

json commit_to_json(const CommitRecord& c) {
  json changes = json::array();
  for (const auto& fc : c.file_changes) {
    json hunks = json::array();
    for (const auto& h : fc.hunks) {
      hunks.push_back(json{{"old_start", h.old_start},
                           {"deleted", h.deleted},
                           {"new_start", h.new_start},
                           {"added", h.added}});
    }
    json fj{{"path", fc.path}, {"hunks", std::move(hunks)}};
    if (fc.old_path) fj["old_path"] = *fc.old_path;
    changes.push_back(std::move(fj));
  }
  json out{{"sha", c.sha},
           {"author_date", format_iso8601(c.author_date)},
           {"message", c.message},
           {"parents", c.parents},
           {"file_changes", std::move(changes)}};
  if (c.author_login) out["author_login"] = *c.author_login;
  return out;
}

CommitRecord commit_from_json(const json& j) {
  CommitRecord c;
  c.sha = require_string(j, "sha");
  if (!is_hex_sha(c.sha)) throw Error("commit 'sha' must be 40 hex characters: '" + c.sha + "'");
  if (const auto it = j.find("author_login"); it != j.end() && !it->is_null())
    c.author_login = it->get<std::string>();
  c.author_date = require_time(j, "author_date");
  c.message = require_string(j, "message");
  if (const auto it = j.find("parents"); it != j.end()) {
    if (!it->is_array()) throw Error("commit 'parents' must be an array");
    for (const auto& p : *it) c.parents.push_back(p.get<std::string>());
  }
  const json& changes = require(j, "file_changes");
  if (!changes.is_array()) throw Error("commit 'file_changes' must be an array");
  for (const auto& fj : changes) {
    FileChange fc;
    fc.path = require_string(fj, "path");
    if (const auto it = fj.find("old_path"); it != fj.end() && !it->is_null())
      fc.old_path = it->get<std::string>();
    const json& hunks = require(fj, "hunks");
    if (!hunks.is_array()) throw Error("file change 'hunks' must be an array");
    for (const auto& hj : hunks) {
      DiffHunk h;
      h.old_start = require_int(hj, "old_start");
      h.new_start = require_int(hj, "new_start");
      for (const auto& line : require(hj, "deleted")) h.deleted.push_back(line.get<std::string>());
      for (const auto& line : require(hj, "added")) h.added.push_back(line.get<std::string>());
      fc.hunks.push_back(std::move(h));
    }
    c.file_changes.push_back(std::move(fc));
  }
  return c;
}

json developer_to_json(const DeveloperRecord& d) {
  return json{{"login", d.login}, {"github_created_at", format_iso8601(d.github_created_at)}};
}

DeveloperRecord developer_from_json(const json& j) {
  DeveloperRecord d;
  d.login = require_string(j, "login");
  if (d.login.empty()) throw Error("developer 'login' must be nonempty");
  d.github_created_at = require_time(j, "github_created_at");
  return d;
}

json manifest_to_json(const StoreManifest& m) {
  return json{{"project", m.project.slug()},
              {"counts", m.counts},
              {"digest", m.digest},
              {"complete", m.complete},
              {"source", m.source},
              {"incomplete_reasons", m.incomplete_reasons}};
}

StoreManifest manifest_from_json(const json& j) {
  StoreManifest m;
  m.project = ProjectId::parse(require_string(j, "project"));
  for (const auto& [k, v] : require(j, "counts").items()) m.counts[k] = v.get<std::int64_t>();
  m.digest = require_string(j, "digest");
  m.complete = require(j, "complete").get<bool>();
  m.source = require_string(j, "source");
  if (const auto it = j.find("incomplete_reasons"); it != j.end())
    for (const auto& r : *it) m.incomplete_reasons.push_back(r.get<std::string>());
  return m;
}

std::string to_jsonl_line(const json& j) { return j.dump() + "\n"; }

}  // namespace mlab::jsonio
