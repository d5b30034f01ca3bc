#ifndef MLAB_FEATURES_HPP
#define MLAB_FEATURES_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlab/focus_metrics.hpp"
#include "mlab/store.hpp"
#include "mlab/szz.hpp"

namespace mlab {

// Observation [data_start, t_split) and response [t_split, data_end] windows.
struct TimeSplit {
  UtcTime data_start;
  UtcTime t_split;
  UtcTime data_end;
  int response_months = 6;

  TimeWindow observation() const { return {data_start, t_split}; }
  // Half-open internally; +1s makes the stated closed end inclusive.
  TimeWindow response() const { return {t_split, UtcTime{data_end.secs + 1}}; }
};

// t_split sits response_months calendar months before the newest activity.
// Throws when the project has less than response_months + 3 months of
// history; accepted response lengths are 3, 6 and 12 months.
TimeSplit make_split(const ProjectStore& store, int response_months);

struct FeatureRow {
  ProjectId project;
  std::string developer;

  // Covariates, observation window only. Specialization values are absent
  // (not zero) when their denominators are undefined.
  std::optional<double> oss_rho;
  std::optional<double> oss_kappa;
  std::optional<double> iss_kappa;
  std::optional<double> daf;
  double log_social_outdegree = 0.0;
  double log_buggy_commits = 0.0;
  int top_committer_or_owner = 0;
  double log_commits = 0.0;
  double log_responsiveness = 0.0;
  int committer_only = 0;
  double log_total_posts = 0.0;
  double log_observed_mentions = 0.0;
  double github_age_days = 0.0;  // days / 1000, measured at t_split
  double github_age_days_sq = 0.0;

  // Response window only.
  std::int64_t future_mentions = 0;
};

// Feature-table column names (models address covariates by these).
namespace columns {
inline constexpr const char* intercept = "intercept";
inline constexpr const char* oss_rho = "oss_rho";
inline constexpr const char* oss_kappa = "oss_kappa";
inline constexpr const char* iss_kappa = "iss_kappa";
inline constexpr const char* log_social_outdegree = "log_social_outdegree";
inline constexpr const char* log_buggy_commits = "log_buggy_commits";
inline constexpr const char* daf = "daf";
inline constexpr const char* top_committer_or_owner = "top_committer_or_owner";
inline constexpr const char* log_commits = "log_commits";
inline constexpr const char* log_responsiveness = "log_responsiveness";
inline constexpr const char* committer_only = "committer_only";
inline constexpr const char* log_total_posts = "log_total_posts";
inline constexpr const char* log_observed_mentions = "log_observed_mentions";
inline constexpr const char* github_age_days = "github_age_days";
inline constexpr const char* github_age_days_sq = "github_age_days_sq";
}  // namespace columns

// Covariate value by column name; absent specialization scores impute to 0
// (their *_absent flags mark the imputation in the serialized table).
double feature_value(const FeatureRow& row, std::string_view column);

// Hurdle column layout mirroring the full model: the zero side carries the
// squared age term, the count side the observation-mention controls.
std::vector<std::string> default_zero_columns();
std::vector<std::string> default_count_columns();
// Reduced per-project sets for cross-project fitting.
std::vector<std::string> simplified_zero_columns();
std::vector<std::string> simplified_count_columns();

struct AssembleOptions {
  int min_participation_months = 3;
  enum class Participation { any_activity, commits_only };
  Participation participation = Participation::any_activity;
  ModuleGranularity daf_granularity = ModuleGranularity::top_dir;
  SzzOptions szz;
};

// One row per developer with at least one observation-window commit and an
// observation-window activity span of at least min_participation_months.
std::vector<FeatureRow> assemble(const ProjectStore& store, const TimeSplit& split,
                                 const AssembleOptions& options = {});

void write_features_csv(const std::filesystem::path& path, std::span<const FeatureRow> rows);
std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path);

struct SummaryReport {
  std::int64_t issues = 0;
  std::int64_t prs = 0;
  std::int64_t issues_with_mention = 0;
  std::int64_t prs_with_mention = 0;
  std::int64_t mentions_in_issues = 0;
  std::int64_t mentions_in_prs = 0;
  std::int64_t call_instances = 0;            // distinct (thread, callee) pairs
  std::int64_t responded_instances = 0;       // callee posted after the earliest call
  std::int64_t called_developers = 0;
  std::int64_t responding_developers = 0;     // called developers who ever respond
  std::int64_t call_instances_excl_never = 0;
  std::int64_t responded_instances_excl_never = 0;

  std::optional<double> frac_issues_with_mention() const;
  std::optional<double> frac_prs_with_mention() const;
  std::optional<double> mean_mentions_per_issue() const;
  std::optional<double> mean_mentions_per_pr() const;
  std::optional<double> response_rate() const;
  std::optional<double> response_rate_excluding_never() const;
};

SummaryReport population_stats(std::span<const ProjectStore* const> stores);

}  // namespace mlab

#endif  // MLAB_FEATURES_HPP
