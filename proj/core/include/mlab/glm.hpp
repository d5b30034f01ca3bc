#ifndef MLAB_GLM_HPP
#define MLAB_GLM_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace mlab {

enum class Family { logistic, poisson, trunc_poisson, negbin };

std::string_view to_string(Family f);

// Observations with named columns; column 0 is always the intercept.
struct DesignMatrix {
  std::vector<std::string> columns;
  Eigen::MatrixXd X;  // n x columns.size()
  Eigen::VectorXd y;  // nonnegative integers

  // Prepends the intercept column to the given covariates.
  static DesignMatrix create(const std::vector<std::string>& covariates,
                             const Eigen::MatrixXd& values, const Eigen::VectorXd& response);

  DesignMatrix select_columns(const std::vector<std::string>& covariates) const;
  std::size_t column_index(std::string_view name) const;

  // Throws on non-finite entries, duplicate names, or n <= #columns.
  void validate() const;
};

struct FitResult {
  Family family = Family::poisson;
  std::vector<std::string> columns;
  Eigen::VectorXd coefficients;  // original covariate scale
  Eigen::VectorXd std_errors;
  Eigen::VectorXd p_values;
  Eigen::VectorXd p_adjusted;
  double log_likelihood = 0.0;
  double aic = 0.0;
  bool converged = false;
  int iterations = 0;
  std::optional<double> theta;  // negbin dispersion
  // Internal standardization applied while fitting, kept for provenance.
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  double coef(std::string_view name) const;
  double stderr_of(std::string_view name) const;
};

// Newton-Raphson on the exact log-likelihood, to gradient norm < 1e-8 or 100
// iterations, with step-halving. Standard errors come from the inverse
// observed information; p-values are two-sided Wald. The negbin dispersion
// is profiled by alternating theta line-searches with beta Newton steps.
FitResult fit_glm(const DesignMatrix& design, Family family);

// Per-row log-likelihood under a fit (used by Vuong comparisons).
Eigen::VectorXd per_observation_ll(const FitResult& fit, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y);

// Likelihood surface probes at an arbitrary coefficient vector, for
// verification against finite differences.
double log_likelihood_at(Family family, const DesignMatrix& design, const Eigen::VectorXd& beta,
                         double theta = 1.0);
Eigen::VectorXd gradient_at(Family family, const DesignMatrix& design,
                            const Eigen::VectorXd& beta, double theta = 1.0);

// Linear predictor -> mean for one family (lambda clamped to [1e-10, 1e10]).
double family_mean(Family family, double eta);

struct HurdleFit {
  FitResult zero;   // logistic on 1{y>0}
  FitResult count;  // truncated count model on rows with y > 0
  std::vector<std::string> zero_columns;
  std::vector<std::string> count_columns;

  double total_log_likelihood() const { return zero.log_likelihood + count.log_likelihood; }
  double aic() const;
};

// Independent zero/count fits on disjoint column subsets of one design.
// Throws "degenerate response" when y is all-zero or all-positive.
HurdleFit fit_hurdle(const DesignMatrix& design, const std::vector<std::string>& zero_columns,
                     const std::vector<std::string>& count_columns);

struct HurdlePrediction {
  double p_positive = 0.0;      // zero model: P(y > 0)
  double expected_positive = 0.0;  // count model: E[y | y > 0], always >= 1
  double expected = 0.0;        // product
};

HurdlePrediction hurdle_predict(const HurdleFit& fit, const std::map<std::string, double>& row);

struct VuongComparison {
  std::string model_a;
  std::string model_b;
  std::optional<double> statistic;  // absent when the per-row LLs coincide
  std::optional<double> p_value;
};

// V = sqrt(n) * mean(ll_a - ll_b) / sd(ll_a - ll_b), two-sided normal p;
// undefined when the per-row log-likelihood difference has zero variance.
VuongComparison vuong_test(const std::string& name_a, const Eigen::VectorXd& ll_a,
                           const std::string& name_b, const Eigen::VectorXd& ll_b);

struct SelectionEntry {
  std::string name;
  double log_likelihood = 0.0;
  double aic = 0.0;
  int parameters = 0;
};

struct SelectionReport {
  std::vector<SelectionEntry> entries;
  std::vector<VuongComparison> vuong;
  std::string preferred;  // lowest AIC
};

SelectionReport model_selection(const DesignMatrix& design,
                                const std::vector<std::string>& hurdle_zero_columns,
                                const std::vector<std::string>& hurdle_count_columns);

struct VifEntry {
  std::string column;
  double vif = 0.0;  // +inf on exact collinearity
};

struct VifResult {
  std::vector<std::string> kept;      // surviving non-intercept columns
  std::vector<VifEntry> final_table;  // VIFs of the kept columns
  std::vector<VifEntry> dropped;      // with the VIF they had when dropped
};

// Iteratively drops the worst non-protected column with VIF > 4. Protected
// (control) columns are never dropped.
VifResult vif_screen(const DesignMatrix& design, const std::set<std::string>& protected_columns);

// Benjamini-Hochberg step-up adjustment, returned in input order.
std::vector<double> bh_adjust(const std::vector<double>& p_values);

}  // namespace mlab

#endif  // MLAB_GLM_HPP
