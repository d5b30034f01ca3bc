#include "mlab/szz.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "json_io.hpp"
#include "mlab/error.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace {

const std::regex& fix_pattern() {
  // close/closes/closed, fix/fixes/fixed, resolve/resolves/resolved, then an
  // optional colon and whitespace, then "#N" or a same-host issue URL.
  static const std::regex re(
      R"((?:^|[^A-Za-z])((?:close[sd]?|fix(?:e[sd])?|resolve[sd]?))\s*:?\s*(?:#(\d+)|https?://github\.com/([^/\s]+)/([^/\s]+)/issues/(\d+)))",
      std::regex::icase);
  return re;
}

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct RawLink {
  std::int64_t issue = 0;
  FixEvidence evidence;
};

std::vector<RawLink> scan_text(const std::string& text, const ProjectId& project) {
  std::vector<RawLink> out;
  const auto begin = std::sregex_iterator(text.begin(), text.end(), fix_pattern());
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    std::int64_t issue = 0;
    if (m[2].matched) {
      issue = std::stoll(m[2].str());
    } else {
      // URL form must name this very project.
      if (to_lower(m[3].str()) != to_lower(project.owner) ||
          to_lower(m[4].str()) != to_lower(project.name))
        continue;
      issue = std::stoll(m[5].str());
    }
    RawLink link;
    link.issue = issue;
    link.evidence.keyword = to_lower(m[1].str());
    link.evidence.offset = static_cast<std::size_t>(m.position(1));
    out.push_back(std::move(link));
  }
  return out;
}

// Merge commits created for PR #n: GitHub's auto-generated merge message or
// the squash-merge "(#n)" suffix on the subject line.
bool is_merge_commit_for_pr(const CommitRecord& c, std::int64_t pr) {
  const std::string subject = c.message.substr(0, c.message.find('\n'));
  const std::string merge_prefix = "Merge pull request #" + std::to_string(pr);
  if (subject.rfind(merge_prefix, 0) == 0) return true;
  const std::string squash_suffix = "(#" + std::to_string(pr) + ")";
  if (subject.size() >= squash_suffix.size() &&
      subject.compare(subject.size() - squash_suffix.size(), squash_suffix.size(),
                      squash_suffix) == 0)
    return true;
  return false;
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  for (const char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

const FileChange* change_for_path(const CommitRecord& c, const std::string& path) {
  for (const auto& fc : c.file_changes)
    if (fc.path == path) return &fc;
  return nullptr;
}

}  // namespace

FixScan find_fix_links(const ProjectStore& store) {
  FixScan scan;
  std::set<std::tuple<std::int64_t, int, std::string>> seen;  // (issue, kind, fixer id)

  const auto add = [&](FixLink link) {
    const std::string fixer_id =
        link.fixer_kind == FixerKind::commit ? link.commit_sha : std::to_string(link.pr_number);
    if (!seen.insert({link.issue_number, static_cast<int>(link.fixer_kind), fixer_id}).second)
      return;
    if (store.find_thread(link.issue_number) == nullptr)
      scan.dangling.push_back(std::move(link));
    else
      scan.links.push_back(std::move(link));
  };

  for (const auto& c : store.commits()) {
    for (const auto& raw : scan_text(c.message, store.project())) {
      FixLink link;
      link.issue_number = raw.issue;
      link.fixer_kind = FixerKind::commit;
      link.commit_sha = c.sha;
      link.evidence = raw.evidence;
      link.fixing_shas = {c.sha};
      add(std::move(link));
    }
  }

  for (const auto& t : store.threads()) {
    if (t.kind != ThreadKind::pull_request || t.events.empty()) continue;
    for (const auto& raw : scan_text(t.events.front().body, store.project())) {
      FixLink link;
      link.issue_number = raw.issue;
      link.fixer_kind = FixerKind::pull_request;
      link.pr_number = t.number;
      link.evidence = raw.evidence;
      for (const auto& c : store.commits())
        if (is_merge_commit_for_pr(c, t.number)) link.fixing_shas.push_back(c.sha);
      add(std::move(link));
    }
  }

  const auto order = [](const FixLink& a, const FixLink& b) {
    return std::tie(a.issue_number, a.commit_sha, a.pr_number) <
           std::tie(b.issue_number, b.commit_sha, b.pr_number);
  };
  std::sort(scan.links.begin(), scan.links.end(), order);
  std::sort(scan.dangling.begin(), scan.dangling.end(), order);
  return scan;
}

CommitHistory::CommitHistory(std::span<const CommitRecord> commits) {
  for (const auto& c : commits) by_sha_[c.sha] = &c;
}

const CommitRecord* CommitHistory::find(std::string_view sha) const {
  const auto it = by_sha_.find(std::string(sha));
  return it == by_sha_.end() ? nullptr : it->second;
}

namespace {

struct BlameOutcome {
  const CommitRecord* buggy = nullptr;  // null -> unresolved
};

// Walks the first-parent chain starting from the commit whose file version
// contains (path, line), looking for the last commit that added or modified
// that line. Cosmetic (whitespace-only) touches are skipped when requested.
BlameOutcome blame_line(const CommitHistory& history, const std::string& start_sha,
                        std::string path, std::int64_t line, const SzzOptions& options) {
  std::string cur = start_sha;
  // Hop count guards against malformed parent cycles in fixture data.
  for (int hops = 0; hops < 100000; ++hops) {
    const CommitRecord* c = history.find(cur);
    if (c == nullptr) return {};  // history gap

    if (const FileChange* fc = change_for_path(*c, path)) {
      // Inside an added range? Then this commit touched the line.
      for (const auto& h : fc->hunks) {
        const auto added = static_cast<std::int64_t>(h.added.size());
        if (line >= h.new_start && line < h.new_start + added) {
          const std::int64_t ai = line - h.new_start;
          const bool cosmetic =
              options.skip_whitespace_only && ai < static_cast<std::int64_t>(h.deleted.size()) &&
              normalize_whitespace(h.added[ai]) == normalize_whitespace(h.deleted[ai]);
          if (!cosmetic) return {c};
          line = h.old_start + ai;  // keep walking past the cosmetic rewrite
          goto next_parent;
        }
      }
      // Outside every edit: shift through hunks lying entirely above.
      {
        std::int64_t shift = 0;
        for (const auto& h : fc->hunks) {
          const auto added = static_cast<std::int64_t>(h.added.size());
          const auto deleted = static_cast<std::int64_t>(h.deleted.size());
          if (h.new_start + added <= line) shift += added - deleted;
        }
        line -= shift;
      }
    next_parent:
      if (options.track_renames && fc->old_path) path = *fc->old_path;
    }

    if (c->parents.empty()) return {};  // ran off the root without an adder
    cur = c->parents.front();
  }
  return {};
}

}  // namespace

AttributionResult attribute_buggy(const FixLink& fix, const CommitHistory& history,
                                  const SzzOptions& options) {
  AttributionResult result;
  for (const std::string& fixing_sha : fix.fixing_shas) {
    const CommitRecord* fixer = history.find(fixing_sha);
    if (fixer == nullptr) {
      result.warnings.push_back("fixing commit " + fixing_sha + " not in history");
      continue;
    }
    if (fixer->parents.empty()) continue;  // a root commit cannot delete lines
    const std::string& parent = fixer->parents.front();

    std::map<std::string, BuggyAttribution> by_buggy;
    for (const auto& fc : fixer->file_changes) {
      const std::string parent_path = fc.old_path.value_or(fc.path);
      for (const auto& h : fc.hunks) {
        for (std::size_t i = 0; i < h.deleted.size(); ++i) {
          const std::int64_t parent_line = h.old_start + static_cast<std::int64_t>(i);
          const BlameOutcome outcome =
              blame_line(history, parent, parent_path, parent_line, options);
          if (outcome.buggy == nullptr) {
            ++result.unresolved_lines;
            result.warnings.push_back("unresolved history for " + parent_path + ":" +
                                      std::to_string(parent_line) + " (fix " + fixing_sha + ")");
            continue;
          }
          if (!(outcome.buggy->author_date < fixer->author_date)) {
            result.warnings.push_back("skipped non-causal attribution " + outcome.buggy->sha +
                                      " for fix " + fixing_sha);
            continue;
          }
          auto& attr = by_buggy[outcome.buggy->sha];
          attr.buggy_sha = outcome.buggy->sha;
          attr.fixing_sha = fixing_sha;
          attr.lines.emplace_back(parent_path, parent_line);
        }
      }
    }
    for (auto& [_, attr] : by_buggy) result.attributions.push_back(std::move(attr));
  }
  std::sort(result.attributions.begin(), result.attributions.end(),
            [](const BuggyAttribution& a, const BuggyAttribution& b) {
              return std::tie(a.fixing_sha, a.buggy_sha) < std::tie(b.fixing_sha, b.buggy_sha);
            });
  return result;
}

namespace {

// Evidence visibility rule for windowed counts: every fixing commit (and,
// for PR links, the PR's opening post) must predate the cutoff.
bool evidence_before(const FixLink& link, const ProjectStore& store, UtcTime cutoff) {
  if (link.fixing_shas.empty()) return false;
  for (const auto& sha : link.fixing_shas) {
    const CommitRecord* c = store.find_commit(sha);
    if (c == nullptr || !(c->author_date < cutoff)) return false;
  }
  if (link.fixer_kind == FixerKind::pull_request) {
    const ThreadRecord* pr = store.find_thread(link.pr_number);
    if (pr == nullptr || pr->events.empty() || !(pr->events.front().timestamp < cutoff))
      return false;
  }
  return true;
}

}  // namespace

AttributionResult attribute_all(const ProjectStore& store, const SzzOptions& options) {
  const CommitHistory history(store.commits());
  const FixScan scan = find_fix_links(store);
  AttributionResult all;
  for (const auto& link : scan.links) {
    if (options.evidence_cutoff && !evidence_before(link, store, *options.evidence_cutoff))
      continue;
    AttributionResult r = attribute_buggy(link, history, options);
    std::move(r.attributions.begin(), r.attributions.end(), std::back_inserter(all.attributions));
    std::move(r.warnings.begin(), r.warnings.end(), std::back_inserter(all.warnings));
    all.unresolved_lines += r.unresolved_lines;
  }
  std::sort(all.attributions.begin(), all.attributions.end(),
            [](const BuggyAttribution& a, const BuggyAttribution& b) {
              return std::tie(a.fixing_sha, a.buggy_sha) < std::tie(b.fixing_sha, b.buggy_sha);
            });
  return all;
}

std::map<std::string, std::int64_t> buggy_commit_counts(const ProjectStore& store,
                                                        const TimeWindow& window,
                                                        const SzzOptions& options) {
  SzzOptions windowed = options;
  if (!windowed.evidence_cutoff) windowed.evidence_cutoff = window.end;
  const AttributionResult all = attribute_all(store, windowed);
  std::map<std::string, std::set<std::string>> distinct;
  for (const auto& attr : all.attributions) {
    const CommitRecord* buggy = store.find_commit(attr.buggy_sha);
    if (buggy == nullptr || !buggy->author_login || !window.contains(buggy->author_date)) continue;
    distinct[lower_login(*buggy->author_login)].insert(attr.buggy_sha);
  }
  std::map<std::string, std::int64_t> counts;
  for (const auto& [dev, shas] : distinct) counts[dev] = static_cast<std::int64_t>(shas.size());
  return counts;
}

std::map<std::string, std::int64_t> fixing_commit_counts(const ProjectStore& store,
                                                         const TimeWindow& window) {
  const FixScan scan = find_fix_links(store);
  std::map<std::string, std::set<std::string>> distinct;
  for (const auto& link : scan.links)
    for (const auto& sha : link.fixing_shas) {
      const CommitRecord* c = store.find_commit(sha);
      if (c == nullptr || !c->author_login || !window.contains(c->author_date)) continue;
      distinct[lower_login(*c->author_login)].insert(sha);
    }
  std::map<std::string, std::int64_t> counts;
  for (const auto& [dev, shas] : distinct) counts[dev] = static_cast<std::int64_t>(shas.size());
  return counts;
}

void write_attributions_jsonl(const std::filesystem::path& path, const AttributionResult& result) {
  std::string out;
  for (const auto& attr : result.attributions) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& [p, l] : attr.lines) lines.push_back({{"path", p}, {"line", l}});
    out += jsonio::to_jsonl_line(nlohmann::json{{"buggy_sha", attr.buggy_sha},
                                                {"fixing_sha", attr.fixing_sha},
                                                {"lines", std::move(lines)}});
  }
  write_file(path, out);
}

}  // namespace mlab
