// Live GitHub acquisition. Exercised only when `ingest --from-api` is used;
// fixture ingestion never touches the network.

#include <chrono>
#include <cstdlib>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "json_io.hpp"
#include "mlab/error.hpp"
#include "mlab/ingest.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ApiClient {
  explicit ApiClient(const IngestOptions& options) : options_(options) {
    token_ = options.token;
    if (token_.empty())
      if (const char* env = std::getenv("MENTION_LAB_TOKEN")) token_ = env;
    auto scheme_end = options.api_base.find("://");
    if (scheme_end == std::string::npos) throw Error("bad api base: " + options.api_base);
    host_ = options.api_base;
  }

  json get_json(const std::string& path) {
    const std::string body = get(path);
    return json::parse(body);
  }

  std::string get(const std::string& path) {
    int attempt = 0;
    long backoff_ms = 500;
    while (true) {
#ifndef MLAB_HAVE_TLS
      throw Error("live API ingestion requires a TLS-enabled build");
#else
      httplib::Client cli(host_);
      cli.set_connection_timeout(15);
      cli.set_read_timeout(60);
      httplib::Headers headers{{"Accept", "application/vnd.github+json"},
                               {"User-Agent", "mention-lab"}};
      if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
      auto res = cli.Get(path, headers);
      if (res && res->status >= 200 && res->status < 300) return res->body;

      std::optional<long> retry_after;
      std::string reason;
      if (!res) {
        reason = "network failure contacting " + host_ + path;
      } else {
        reason = "HTTP " + std::to_string(res->status) + " for " + path;
        if (res->has_header("Retry-After"))
          retry_after = std::strtol(res->get_header_value("Retry-After").c_str(), nullptr, 10);
        else if (res->get_header_value("X-RateLimit-Remaining") == "0" &&
                 res->has_header("X-RateLimit-Reset")) {
          const long reset = std::strtol(res->get_header_value("X-RateLimit-Reset").c_str(), nullptr, 10);
          const long now = static_cast<long>(std::chrono::duration_cast<std::chrono::seconds>(
                                                 std::chrono::system_clock::now().time_since_epoch())
                                                 .count());
          retry_after = std::max(1L, reset - now);
          reason += " (rate limited)";
        }
        // 4xx other than rate limiting will not improve on retry.
        if (res->status >= 400 && res->status < 500 && res->status != 403 && res->status != 429)
          throw Error(reason);
      }
      if (++attempt > options_.max_retries) throw RetriableError(reason, retry_after);
      const long wait_ms = retry_after ? *retry_after * 1000 : backoff_ms;
      std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
      backoff_ms = std::min(backoff_ms * 2, 60'000L);
#endif
    }
  }

  const IngestOptions& options_;
  std::string host_;
  std::string token_;
};

UtcTime api_time(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return UtcTime{0};
  return parse_iso8601_or_throw(j[key].get<std::string>());
}

std::string api_login(const json& user) {
  if (user.is_null() || !user.contains("login")) return "ghost";
  return user["login"].get<std::string>();
}

}  // namespace

void crawl_github_project(const IngestOptions& options, const ProjectId& project,
                          std::vector<ThreadRecord>& threads, std::vector<CommitRecord>& commits,
                          std::vector<DeveloperRecord>& developers, bool& complete,
                          std::vector<std::string>& incomplete_reasons, const fs::path& cursor_path) {
  ApiClient client(options);
  const std::string repo = "/repos/" + project.owner + "/" + project.name;

  // Resume support: the cursor records the last fully ingested page per phase.
  json cursor = json::object();
  if (fs::exists(cursor_path)) cursor = json::parse(read_file(cursor_path));
  const auto save_cursor = [&] { write_file(cursor_path, cursor.dump(2) + "\n"); };

  std::set<std::string> seen_logins;
  const auto note_login = [&](const std::string& login) {
    if (!login.empty()) seen_logins.insert(login);
  };

  complete = true;
  try {
    // Issues (pull requests included: PRs are issues with a pull_request key).
    for (int page = cursor.value("issues_page", 1);; ++page) {
      const json items = client.get_json(repo + "/issues?state=all&sort=created&direction=asc&per_page=100&page=" +
                                         std::to_string(page));
      if (!items.is_array() || items.empty()) break;
      for (const json& it : items) {
        ThreadRecord t;
        t.project = project;
        t.number = it["number"].get<std::int64_t>();
        t.kind = it.contains("pull_request") ? ThreadKind::pull_request : ThreadKind::issue;
        t.created_at = api_time(it, "created_at");
        t.author = api_login(it["user"]);
        note_login(t.author);
        CommentEvent opening;
        opening.author = t.author;
        opening.timestamp = t.created_at;
        const std::string title = it.value("title", "");
        const std::string body = it["body"].is_null() ? "" : it["body"].get<std::string>();
        opening.body = title.empty() ? body : title + "\n\n" + body;
        t.events.push_back(std::move(opening));
        if (it.value("comments", 0) > 0) {
          for (int cpage = 1;; ++cpage) {
            const json comments =
                client.get_json(repo + "/issues/" + std::to_string(t.number) +
                                "/comments?per_page=100&page=" + std::to_string(cpage));
            if (!comments.is_array() || comments.empty()) break;
            for (const json& cj : comments) {
              CommentEvent e;
              e.author = api_login(cj["user"]);
              e.timestamp = api_time(cj, "created_at");
              e.body = cj["body"].is_null() ? "" : cj["body"].get<std::string>();
              note_login(e.author);
              // GitHub occasionally reports comments a second before thread
              // creation after issue transfers; clamp instead of rejecting.
              if (e.timestamp < t.created_at) e.timestamp = t.created_at;
              t.events.push_back(std::move(e));
            }
            if (comments.size() < 100) break;
          }
        }
        threads.push_back(std::move(t));
      }
      cursor["issues_page"] = page + 1;
      save_cursor();
      if (items.size() < 100) break;
    }

    // Commits with per-commit diffs.
    for (int page = cursor.value("commits_page", 1);; ++page) {
      const json items =
          client.get_json(repo + "/commits?per_page=100&page=" + std::to_string(page));
      if (!items.is_array() || items.empty()) break;
      for (const json& it : items) {
        CommitRecord c;
        c.sha = it["sha"].get<std::string>();
        if (!it["author"].is_null()) {
          c.author_login = api_login(it["author"]);
          note_login(*c.author_login);
        }
        c.author_date = api_time(it["commit"]["author"], "date");
        c.message = it["commit"]["message"].get<std::string>();
        if (it.contains("parents"))
          for (const json& p : it["parents"]) c.parents.push_back(p["sha"].get<std::string>());

        const json detail = client.get_json(repo + "/commits/" + c.sha);
        if (detail.contains("files"))
          for (const json& f : detail["files"]) {
            FileChange fc;
            fc.path = f["filename"].get<std::string>();
            if (f.contains("previous_filename") && !f["previous_filename"].is_null())
              fc.old_path = f["previous_filename"].get<std::string>();
            if (f.contains("patch") && !f["patch"].is_null())
              fc.hunks = parse_unified_patch(f["patch"].get<std::string>());
            c.file_changes.push_back(std::move(fc));
          }
        commits.push_back(std::move(c));
      }
      cursor["commits_page"] = page + 1;
      save_cursor();
      if (items.size() < 100) break;
    }

    // Developer profiles for everyone observed.
    for (const std::string& login : seen_logins) {
      try {
        const json u = client.get_json("/users/" + login);
        developers.push_back(DeveloperRecord{login, api_time(u, "created_at")});
      } catch (const Error&) {
        // Deleted accounts 404; downstream falls back to first observed activity.
      }
    }
  } catch (const RetriableError&) {
    // Leave the cursor in place so a re-run resumes, and mark the crawl partial.
    complete = false;
    incomplete_reasons.emplace_back("partial crawl: rate limit or network failure, re-run to resume");
    throw;
  }

  if (fs::exists(cursor_path)) fs::remove(cursor_path);
}

}  // namespace mlab
