#ifndef MLAB_PIPELINE_HPP
#define MLAB_PIPELINE_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mlab/features.hpp"
#include "mlab/glm.hpp"
#include "mlab/xeval.hpp"

namespace mlab {

// Flat sectioned key=value configuration. Every field has a default and the
// file form round-trips losslessly.
struct PipelineConfig {
  std::filesystem::path store_dir = "store";
  std::vector<ProjectId> projects;  // empty = every project in the store
  int response_months = 6;
  int min_participation_months = 3;
  std::string participation = "any";  // "any" or "commits"
  std::string daf_granularity = "top_dir";  // "top_dir" or "file"
  bool szz_whitespace_filter = true;
  bool szz_track_renames = true;
  std::vector<std::string> zero_columns;   // empty = defaults
  std::vector<std::string> count_columns;  // empty = defaults
  std::set<std::string> protected_columns;  // empty = default control set
  int min_rows_per_project = 30;
  std::filesystem::path out_dir = "out";

  static PipelineConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::string serialize() const;  // canonical text form
  bool operator==(const PipelineConfig&) const = default;

  AssembleOptions assemble_options() const;
  std::vector<std::string> effective_zero_columns() const;
  std::vector<std::string> effective_count_columns() const;
  std::set<std::string> effective_protected_columns() const;
};

struct ReportBundle {
  std::filesystem::path report_path;
  std::vector<std::filesystem::path> artifacts;  // relative to out_dir, ordered
  std::string digest;                            // content digest of all artifacts
};

// graph -> metrics -> szz -> features -> fit -> xeval -> report.md.
// Fails with the stage name on error; partial artifacts are left in place.
ReportBundle run_pipeline(const PipelineConfig& config);

struct Prediction {
  double p_first_mention = 0.0;
  double expected_count = 0.0;     // >= 1 by truncation
  double expected_mentions = 0.0;  // product of the two
};

// Applies a stored hurdle fit to one covariate row. Throws with the list of
// missing columns when the row does not match the fit schema.
Prediction predict_developer(const std::filesystem::path& fit_json,
                             const std::map<std::string, double>& row);

// Windowed per-developer metric table (specialization, degrees, fix counts).
void write_metrics_csv(const std::filesystem::path& path, const ProjectStore& store,
                       const TimeWindow& window, const AssembleOptions& options);

// Serialization of a fitted hurdle (plus selection diagnostics) to fit.json.
struct FitArtifact {
  HurdleFit hurdle;
  SelectionReport selection;
  VifResult vif;
  // Count-model columns with no variation among positive-response rows are
  // unestimable there and get excluded, recorded here.
  std::vector<std::string> degenerate_count_columns;
  double in_sample_mae = 0.0;
  double in_sample_mse = 0.0;
  std::int64_t n_rows = 0;
};

// The fit stage: VIF screen over the union column set, hurdle + selection
// fits on the surviving columns, in-sample MAE/MSE of the composed
// prediction. Shared by run_pipeline and the `fit` subcommand.
FitArtifact fit_feature_table(std::span<const FeatureRow> rows, const PipelineConfig& config);

void write_fit_json(const std::filesystem::path& path, const FitArtifact& artifact);

}  // namespace mlab

#endif  // MLAB_PIPELINE_HPP
