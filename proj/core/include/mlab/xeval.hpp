#ifndef MLAB_XEVAL_HPP
#define MLAB_XEVAL_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mlab/features.hpp"
#include "mlab/glm.hpp"

namespace mlab {

// Per-project simplified zero/count fits plus the data they were fit on,
// retained so models can be evaluated on each other's projects.
struct ProjectModelPair {
  ProjectId project;
  FitResult zero;   // logistic
  FitResult count;  // truncated Poisson, positive-response rows
  std::vector<std::string> zero_columns;
  std::vector<std::string> count_columns;

  Eigen::MatrixXd zero_X;   // all rows
  Eigen::VectorXd zero_y;   // 1{future > 0}
  Eigen::MatrixXd count_X;  // positive rows only
  Eigen::VectorXd count_y;
};

struct XevalOptions {
  int min_rows = 30;
};

struct XevalExclusion {
  ProjectId project;
  std::string reason;
};

// Fits the reduced models per project; small, degenerate or non-converging
// projects are skipped and reported.
std::vector<ProjectModelPair> fit_project_models(std::span<const FeatureRow> rows,
                                                 const XevalOptions& options = {},
                                                 std::vector<XevalExclusion>* excluded = nullptr);

enum class CrossMetric { mean_mae, mean_auc };

struct CrossMatrix {
  std::vector<std::string> projects;
  Eigen::MatrixXd values;  // NaN marks an absent cell
  CrossMetric metric = CrossMetric::mean_mae;
  std::vector<int> dendrogram_order;
};

// Symmetric pairwise matrices: count cells average the two directed MAEs,
// zero cells the two directed AUCs; diagonals hold in-sample values.
std::pair<CrossMatrix, CrossMatrix> cross_predict(std::span<const ProjectModelPair> pairs);

// Mann-Whitney AUC with average ranks for ties; labels must contain both
// classes. scores and labels are parallel.
double auc_score(std::span<const double> labels, std::span<const double> scores);

// Agglomerative average-linkage leaf order. Distances: the matrix itself for
// MAE, 1 - value for AUC; absent cells impute to the column mean (ordering
// only). Ties break lexicographically by project name.
std::vector<int> cluster_order(const CrossMatrix& matrix);

// Ordered CSV + standalone SVG heatmap with a marginal dendrogram. Absent
// cells serialize as empty fields and render hatched. Byte-deterministic.
void export_heatmap(const CrossMatrix& matrix, std::span<const int> order,
                    const std::filesystem::path& csv_path, const std::filesystem::path& svg_path);

// Per-project coefficient matrices for one hurdle component, clustered with
// the same machinery and written as CSV + SVG.
void export_coefficient_heatmap(std::span<const ProjectModelPair> pairs, bool count_component,
                                const std::filesystem::path& csv_path,
                                const std::filesystem::path& svg_path);

}  // namespace mlab

#endif  // MLAB_XEVAL_HPP
