#include "mlab/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/mention_graph.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace {

double log1p_count(double x) { return std::log1p(x); }

std::optional<UtcTime> min_opt(std::optional<UtcTime> a, UtcTime b) {
  if (!a || b < *a) return b;
  return a;
}

std::optional<UtcTime> max_opt(std::optional<UtcTime> a, UtcTime b) {
  if (!a || *a < b) return b;
  return a;
}

struct ActivitySpan {
  std::optional<UtcTime> first, last;
  void note(UtcTime t) {
    first = min_opt(first, t);
    last = max_opt(last, t);
  }
};

// Response-window call in-degree. The response period is classified as a
// self-contained event suffix: a mentionee counts as "posted" only via
// events inside the window. This keeps the response strictly independent of
// observation-window content, and vice versa.
std::map<std::string, std::int64_t> response_call_indegree(const ProjectStore& store,
                                                           const TimeWindow& window) {
  std::map<std::string, std::int64_t> calls;
  for (const auto& t : store.threads()) {
    std::map<std::string, UtcTime> first_posted;
    for (const auto& e : t.events) {
      if (!window.contains(e.timestamp)) continue;
      const std::string author = lower_login(e.author);
      const auto it = first_posted.find(author);
      if (it == first_posted.end() || e.timestamp < it->second) first_posted[author] = e.timestamp;
    }
    for (const auto& e : t.events) {
      if (!window.contains(e.timestamp)) continue;
      const std::string mentioner = lower_login(e.author);
      for (const auto& m : extract_mentions(e.body)) {
        const std::string mentionee = lower_login(m.username);
        if (mentionee == mentioner) continue;
        const auto it = first_posted.find(mentionee);
        const bool posted_before = it != first_posted.end() && it->second < e.timestamp;
        if (!posted_before) ++calls[mentionee];
      }
    }
  }
  return calls;
}

}  // namespace

TimeSplit make_split(const ProjectStore& store, int response_months) {
  if (response_months != 3 && response_months != 6 && response_months != 12)
    throw Error("response_months must be 3, 6 or 12");

  std::optional<UtcTime> lo, hi;
  for (const auto& t : store.threads()) {
    lo = min_opt(lo, t.created_at);
    hi = max_opt(hi, t.created_at);
    for (const auto& e : t.events) {
      lo = min_opt(lo, e.timestamp);
      hi = max_opt(hi, e.timestamp);
    }
  }
  for (const auto& c : store.commits()) {
    lo = min_opt(lo, c.author_date);
    hi = max_opt(hi, c.author_date);
  }
  if (!lo || !hi) throw Error("project " + store.project().slug() + " has no dated activity");

  TimeSplit split;
  split.data_start = *lo;
  split.data_end = *hi;
  split.response_months = response_months;
  split.t_split = add_months(*hi, -response_months);
  if (add_months(*lo, response_months + 3) > *hi)
    throw Error("project " + store.project().slug() + " excluded: needs at least " +
                std::to_string(response_months + 3) + " months of history");
  return split;
}

double feature_value(const FeatureRow& r, std::string_view column) {
  namespace col = columns;
  if (column == col::oss_rho) return r.oss_rho.value_or(0.0);
  if (column == col::oss_kappa) return r.oss_kappa.value_or(0.0);
  if (column == col::iss_kappa) return r.iss_kappa.value_or(0.0);
  if (column == col::daf) return r.daf.value_or(0.0);
  if (column == col::log_social_outdegree) return r.log_social_outdegree;
  if (column == col::log_buggy_commits) return r.log_buggy_commits;
  if (column == col::top_committer_or_owner) return r.top_committer_or_owner;
  if (column == col::log_commits) return r.log_commits;
  if (column == col::log_responsiveness) return r.log_responsiveness;
  if (column == col::committer_only) return r.committer_only;
  if (column == col::log_total_posts) return r.log_total_posts;
  if (column == col::log_observed_mentions) return r.log_observed_mentions;
  if (column == col::github_age_days) return r.github_age_days;
  if (column == col::github_age_days_sq) return r.github_age_days_sq;
  throw Error("unknown feature column: " + std::string(column));
}

std::vector<std::string> default_zero_columns() {
  namespace col = columns;
  return {col::oss_rho,     col::oss_kappa,      col::log_social_outdegree,
          col::log_buggy_commits, col::daf,      col::top_committer_or_owner,
          col::log_commits, col::committer_only, col::log_total_posts,
          col::github_age_days, col::github_age_days_sq};
}

std::vector<std::string> default_count_columns() {
  namespace col = columns;
  return {col::oss_rho,          col::oss_kappa,      col::iss_kappa,
          col::log_social_outdegree, col::log_buggy_commits, col::daf,
          col::top_committer_or_owner, col::log_commits, col::log_responsiveness,
          col::committer_only,   col::log_total_posts, col::log_observed_mentions,
          col::github_age_days};
}

std::vector<std::string> simplified_zero_columns() {
  namespace col = columns;
  return {col::oss_rho, col::log_social_outdegree, col::log_buggy_commits, col::log_commits,
          col::github_age_days};
}

std::vector<std::string> simplified_count_columns() {
  namespace col = columns;
  return {col::oss_rho,     col::iss_kappa,          col::log_social_outdegree,
          col::log_buggy_commits, col::log_commits,  col::log_responsiveness,
          col::github_age_days};
}

std::vector<FeatureRow> assemble(const ProjectStore& store, const TimeSplit& split,
                                 const AssembleOptions& options) {
  const TimeWindow obs = split.observation();
  const TimeWindow resp = split.response();

  // Full-span graph; covariates read only observation-window edges.
  MentionGraph graph = build_graph(store, TimeWindow{split.data_start, resp.end});
  MentionGraph obs_graph;
  obs_graph.project = graph.project;
  obs_graph.window = obs;
  for (const auto& e : graph.edges)
    if (obs.contains(e.timestamp)) obs_graph.edges.push_back(e);

  const InteractionMatrix reply_m = interaction_matrix(obs_graph, MentionKind::reply);
  const InteractionMatrix call_m = interaction_matrix(obs_graph, MentionKind::call);
  const InteractionMatrix modules =
      commit_module_matrix(store.commits(), obs, options.daf_granularity);
  const auto buggy = buggy_commit_counts(store, obs, options.szz);
  const auto future_calls = response_call_indegree(store, resp);

  std::map<std::string, std::int64_t> commit_counts;
  std::map<std::string, ActivitySpan> spans;
  for (const auto& c : store.commits()) {
    if (!c.author_login || !obs.contains(c.author_date)) continue;
    const std::string dev = lower_login(*c.author_login);
    ++commit_counts[dev];
    spans[dev].note(c.author_date);
  }
  std::map<std::string, std::int64_t> post_counts;
  std::map<std::string, ActivitySpan> first_activity_any;  // proxy for missing profiles
  for (const auto& t : store.threads())
    for (const auto& e : t.events) {
      const std::string dev = lower_login(e.author);
      first_activity_any[dev].note(e.timestamp);
      if (!obs.contains(e.timestamp)) continue;
      ++post_counts[dev];
      if (options.participation == AssembleOptions::Participation::any_activity)
        spans[dev].note(e.timestamp);
    }
  for (const auto& c : store.commits())
    if (c.author_login) first_activity_any[lower_login(*c.author_login)].note(c.author_date);

  std::int64_t max_commits = 0;
  for (const auto& [_, n] : commit_counts) max_commits = std::max(max_commits, n);
  const std::string owner = lower_login(store.project().owner);

  std::vector<FeatureRow> rows;
  for (const auto& [dev, n_commits] : commit_counts) {
    if (n_commits < 1) continue;
    const ActivitySpan& span = spans[dev];
    if (!span.first || add_months(*span.first, options.min_participation_months) > *span.last)
      continue;

    FeatureRow r;
    r.project = store.project();
    r.developer = dev;

    const SocialSpecialization social = social_specialization(reply_m, call_m, dev);
    r.oss_rho = social.oss_rho;
    r.oss_kappa = social.oss_kappa;
    r.iss_kappa = social.iss_kappa;
    r.daf = daf(modules, dev);

    const ActivityDegrees degrees =
        degree_and_responsiveness(obs_graph, store.threads(), dev, obs);
    r.log_social_outdegree = log1p_count(static_cast<double>(degrees.social_outdegree));
    r.log_observed_mentions = log1p_count(static_cast<double>(degrees.observed_call_indegree));
    r.log_responsiveness = log1p_count(static_cast<double>(degrees.responsiveness));

    const auto bug_it = buggy.find(dev);
    r.log_buggy_commits =
        log1p_count(bug_it == buggy.end() ? 0.0 : static_cast<double>(bug_it->second));
    r.log_commits = log1p_count(static_cast<double>(n_commits));
    const auto post_it = post_counts.find(dev);
    const std::int64_t posts = post_it == post_counts.end() ? 0 : post_it->second;
    r.log_total_posts = log1p_count(static_cast<double>(posts));
    r.committer_only = posts == 0 ? 1 : 0;
    r.top_committer_or_owner = (dev == owner || n_commits == max_commits) ? 1 : 0;

    UtcTime created_at;
    if (const DeveloperRecord* profile = store.find_developer(dev)) {
      created_at = profile->github_created_at;
    } else {
      // No profile record: fall back to first observed activity.
      created_at = first_activity_any[dev].first.value_or(split.t_split);
    }
    const double age_days = std::max(0.0, days_between(created_at, split.t_split));
    r.github_age_days = age_days / 1000.0;
    r.github_age_days_sq = r.github_age_days * r.github_age_days;

    const auto fut_it = future_calls.find(dev);
    r.future_mentions = fut_it == future_calls.end() ? 0 : fut_it->second;
    rows.push_back(std::move(r));
  }
  // commit_counts is an ordered map, so rows come out sorted by developer.
  return rows;
}

namespace {

constexpr const char* kCsvHeader =
    "project,developer,oss_rho,oss_kappa,iss_kappa,log_social_outdegree,log_buggy_commits,daf,"
    "top_committer_or_owner,log_commits,log_responsiveness,committer_only,log_total_posts,"
    "log_observed_mentions,github_age_days,github_age_days_sq,oss_rho_absent,oss_kappa_absent,"
    "iss_kappa_absent,daf_absent,future_mentions";

std::string opt_field(const std::optional<double>& v) {
  return fmt_double(v.value_or(0.0));
}

}  // namespace

void write_features_csv(const std::filesystem::path& path, std::span<const FeatureRow> rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += r.project.slug() + ',' + r.developer + ',';
    out += opt_field(r.oss_rho) + ',' + opt_field(r.oss_kappa) + ',' + opt_field(r.iss_kappa) + ',';
    out += fmt_double(r.log_social_outdegree) + ',' + fmt_double(r.log_buggy_commits) + ',';
    out += opt_field(r.daf) + ',';
    out += std::to_string(r.top_committer_or_owner) + ',' + fmt_double(r.log_commits) + ',';
    out += fmt_double(r.log_responsiveness) + ',' + std::to_string(r.committer_only) + ',';
    out += fmt_double(r.log_total_posts) + ',' + fmt_double(r.log_observed_mentions) + ',';
    out += fmt_double(r.github_age_days) + ',' + fmt_double(r.github_age_days_sq) + ',';
    out += std::string(r.oss_rho ? "0" : "1") + ',' + (r.oss_kappa ? "0" : "1") + ',';
    out += std::string(r.iss_kappa ? "0" : "1") + ',' + (r.daf ? "0" : "1") + ',';
    out += std::to_string(r.future_mentions) + '\n';
  }
  write_file(path, out);
}

std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error("empty features csv: " + path.string());
  if (trim(line) != kCsvHeader)
    throw Error("unexpected features csv header in " + path.string());

  std::vector<FeatureRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 21)
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected 21 fields");
    FeatureRow r;
    r.project = ProjectId::parse(f[0]);
    r.developer = f[1];
    const auto opt = [&](const std::string& value, const std::string& absent) -> std::optional<double> {
      if (absent == "1") return std::nullopt;
      return std::stod(value);
    };
    r.oss_rho = opt(f[2], f[16]);
    r.oss_kappa = opt(f[3], f[17]);
    r.iss_kappa = opt(f[4], f[18]);
    r.log_social_outdegree = std::stod(f[5]);
    r.log_buggy_commits = std::stod(f[6]);
    r.daf = opt(f[7], f[19]);
    r.top_committer_or_owner = std::stoi(f[8]);
    r.log_commits = std::stod(f[9]);
    r.log_responsiveness = std::stod(f[10]);
    r.committer_only = std::stoi(f[11]);
    r.log_total_posts = std::stod(f[12]);
    r.log_observed_mentions = std::stod(f[13]);
    r.github_age_days = std::stod(f[14]);
    r.github_age_days_sq = std::stod(f[15]);
    r.future_mentions = std::stoll(f[20]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::optional<double> SummaryReport::frac_issues_with_mention() const {
  if (issues == 0) return std::nullopt;
  return static_cast<double>(issues_with_mention) / static_cast<double>(issues);
}
std::optional<double> SummaryReport::frac_prs_with_mention() const {
  if (prs == 0) return std::nullopt;
  return static_cast<double>(prs_with_mention) / static_cast<double>(prs);
}
std::optional<double> SummaryReport::mean_mentions_per_issue() const {
  if (issues == 0) return std::nullopt;
  return static_cast<double>(mentions_in_issues) / static_cast<double>(issues);
}
std::optional<double> SummaryReport::mean_mentions_per_pr() const {
  if (prs == 0) return std::nullopt;
  return static_cast<double>(mentions_in_prs) / static_cast<double>(prs);
}
std::optional<double> SummaryReport::response_rate() const {
  if (call_instances == 0) return std::nullopt;
  return static_cast<double>(responded_instances) / static_cast<double>(call_instances);
}
std::optional<double> SummaryReport::response_rate_excluding_never() const {
  if (call_instances_excl_never == 0) return std::nullopt;
  return static_cast<double>(responded_instances_excl_never) /
         static_cast<double>(call_instances_excl_never);
}

SummaryReport population_stats(std::span<const ProjectStore* const> stores) {
  SummaryReport s;
  // Per-developer tallies of called instances and answered instances.
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_dev;  // called, responded

  for (const ProjectStore* store : stores) {
    for (const auto& t : store->threads()) {
      const auto edges = classify_thread(t);
      const auto n_mentions = static_cast<std::int64_t>(edges.size());
      if (t.kind == ThreadKind::issue) {
        ++s.issues;
        s.mentions_in_issues += n_mentions;
        if (n_mentions > 0) ++s.issues_with_mention;
      } else {
        ++s.prs;
        s.mentions_in_prs += n_mentions;
        if (n_mentions > 0) ++s.prs_with_mention;
      }

      // Distinct callees of this thread, with their earliest call time.
      std::map<std::string, UtcTime> earliest_call;
      for (const auto& e : edges) {
        if (e.kind != MentionKind::call) continue;
        const auto it = earliest_call.find(e.mentionee);
        if (it == earliest_call.end() || e.timestamp < it->second)
          earliest_call[e.mentionee] = e.timestamp;
      }
      for (const auto& [callee, called_at] : earliest_call) {
        bool responded = false;
        for (const auto& e : t.events)
          if (lower_login(e.author) == callee && called_at < e.timestamp) {
            responded = true;
            break;
          }
        auto& tally = per_dev[callee];
        ++tally.first;
        if (responded) ++tally.second;
      }
    }
  }

  for (const auto& [dev, tally] : per_dev) {
    (void)dev;
    s.call_instances += tally.first;
    s.responded_instances += tally.second;
    ++s.called_developers;
    if (tally.second > 0) {
      ++s.responding_developers;
      s.call_instances_excl_never += tally.first;
      s.responded_instances_excl_never += tally.second;
    }
  }
  return s;
}

}  // namespace mlab
