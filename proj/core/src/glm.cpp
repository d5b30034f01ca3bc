#include "mlab/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mlab/error.hpp"

namespace mlab {

namespace {

constexpr double kGradTol = 1e-8;
constexpr int kMaxNewtonIter = 100;
constexpr double kLambdaMin = 1e-10;
constexpr double kLambdaMax = 1e10;

double clamp_lambda(double v) { return std::clamp(v, kLambdaMin, kLambdaMax); }

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double wald_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Log-likelihood, per-eta score and negative-Hessian weights at eta.
struct FamilyEval {
  double ll = 0.0;
  Eigen::VectorXd score;    // d ll_i / d eta_i
  Eigen::VectorXd weights;  // -d^2 ll_i / d eta_i^2 (observed information)
};

double row_ll(Family family, double eta, double y, double theta) {
  switch (family) {
    case Family::logistic:
      return y * eta - softplus(eta);
    case Family::poisson: {
      const double lambda = clamp_lambda(std::exp(eta));
      return -lambda + y * std::log(lambda) - std::lgamma(y + 1.0);
    }
    case Family::trunc_poisson: {
      const double lambda = clamp_lambda(std::exp(eta));
      const double one_minus_e = -std::expm1(-lambda);  // 1 - e^-lambda
      return -lambda + y * std::log(lambda) - std::lgamma(y + 1.0) - std::log(one_minus_e);
    }
    case Family::negbin: {
      const double mu = clamp_lambda(std::exp(eta));
      return std::lgamma(y + theta) - std::lgamma(theta) - std::lgamma(y + 1.0) +
             theta * std::log(theta) + y * std::log(mu) - (y + theta) * std::log(theta + mu);
    }
  }
  return 0.0;
}

FamilyEval evaluate(Family family, const Eigen::VectorXd& eta, const Eigen::VectorXd& y,
                    double theta) {
  const auto n = eta.size();
  FamilyEval ev;
  ev.score.resize(n);
  ev.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = eta[i];
    const double yi = y[i];
    ev.ll += row_ll(family, e, yi, theta);
    switch (family) {
      case Family::logistic: {
        const double p = sigmoid(e);
        ev.score[i] = yi - p;
        ev.weights[i] = std::max(p * (1.0 - p), 1e-12);
        break;
      }
      case Family::poisson: {
        const double lambda = clamp_lambda(std::exp(e));
        ev.score[i] = yi - lambda;
        ev.weights[i] = lambda;
        break;
      }
      case Family::trunc_poisson: {
        const double lambda = clamp_lambda(std::exp(e));
        const double a = -std::expm1(-lambda);               // 1 - e^-lambda
        const double mu = lambda / a;                        // truncated mean
        const double dmu = (a - lambda * std::exp(-lambda)) / (a * a);
        ev.score[i] = yi - mu;
        ev.weights[i] = std::max(lambda * dmu, 1e-12);
        break;
      }
      case Family::negbin: {
        const double mu = clamp_lambda(std::exp(e));
        ev.score[i] = theta * (yi - mu) / (theta + mu);
        ev.weights[i] = std::max(theta * mu * (theta + yi) / ((theta + mu) * (theta + mu)), 1e-12);
        break;
      }
    }
  }
  return ev;
}

void validate_response(Family family, const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y[i];
    if (!std::isfinite(v) || v < 0.0 || v != std::floor(v))
      throw Error("response must be a nonnegative integer (row " + std::to_string(i) + ")");
    if (family == Family::logistic && v > 1.0)
      throw Error("logistic response must be 0/1 (row " + std::to_string(i) + ")");
    if (family == Family::trunc_poisson && v < 1.0)
      throw Error("truncated Poisson response must be >= 1 (row " + std::to_string(i) + ")");
  }
}

// Single-column quasi-separation check; reports the column by name.
void check_separation(const DesignMatrix& d) {
  bool any0 = false, any1 = false;
  for (Eigen::Index i = 0; i < d.y.size(); ++i) (d.y[i] > 0.5 ? any1 : any0) = true;
  if (!any0 || !any1) return;
  for (std::size_t j = 1; j < d.columns.size(); ++j) {
    double min1 = std::numeric_limits<double>::infinity(), max1 = -min1;
    double min0 = min1, max0 = -min1;
    for (Eigen::Index i = 0; i < d.y.size(); ++i) {
      const double v = d.X(i, static_cast<Eigen::Index>(j));
      if (d.y[i] > 0.5) {
        min1 = std::min(min1, v);
        max1 = std::max(max1, v);
      } else {
        min0 = std::min(min0, v);
        max0 = std::max(max0, v);
      }
    }
    if (min1 > max0 || max1 < min0)
      throw Error("perfect separation on column " + d.columns[j]);
  }
}

struct Standardized {
  Eigen::MatrixXd Z;
  Eigen::VectorXd center;
  Eigen::VectorXd scale;
};

// Center/scale continuous columns for conditioning; the intercept and 0/1
// columns pass through untouched.
Standardized standardize(const Eigen::MatrixXd& X) {
  const auto n = X.rows();
  const auto k = X.cols();
  Standardized s;
  s.Z = X;
  s.center = Eigen::VectorXd::Zero(k);
  s.scale = Eigen::VectorXd::Ones(k);
  for (Eigen::Index j = 1; j < k; ++j) {
    bool binary = true;
    for (Eigen::Index i = 0; i < n && binary; ++i)
      binary = X(i, j) == 0.0 || X(i, j) == 1.0;
    if (binary) continue;
    const double mean = X.col(j).mean();
    const double sd = std::sqrt((X.col(j).array() - mean).square().sum() / std::max<double>(1, n - 1));
    if (sd <= 0.0) continue;  // constant column; surfaces later as rank deficiency
    s.center[j] = mean;
    s.scale[j] = sd;
    s.Z.col(j) = (X.col(j).array() - mean) / sd;
  }
  return s;
}

// Profile likelihood in theta with the beta-dependent mean held fixed. The
// lgamma(y + theta) sum runs over the response histogram rather than rows.
struct ThetaProfile {
  std::vector<std::pair<double, double>> y_hist;  // value, count
  Eigen::VectorXd mu;
  Eigen::VectorXd y;
  double n = 0;

  ThetaProfile(const Eigen::VectorXd& eta, const Eigen::VectorXd& y_in) : y(y_in) {
    mu.resize(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) mu[i] = clamp_lambda(std::exp(eta[i]));
    n = static_cast<double>(y.size());
    std::map<double, double> hist;
    for (Eigen::Index i = 0; i < y.size(); ++i) hist[y[i]] += 1.0;
    y_hist.assign(hist.begin(), hist.end());
  }

  // Drops beta-only terms; only theta-dependent parts matter for the search.
  double operator()(double theta) const {
    double ll = -n * std::lgamma(theta) + n * theta * std::log(theta);
    for (const auto& [value, count] : y_hist) ll += count * std::lgamma(value + theta);
    for (Eigen::Index i = 0; i < y.size(); ++i) ll -= (y[i] + theta) * std::log(theta + mu[i]);
    return ll;
  }
};

// Golden-section maximization of the profile likelihood over log(theta).
double optimize_theta(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  const ThetaProfile profile(eta, y);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(1e-3), hi = std::log(1e5);
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = profile(std::exp(a));
  double fb = profile(std::exp(b));
  for (int it = 0; it < 100; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = profile(std::exp(b));
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = profile(std::exp(a));
    }
    if (hi - lo < 1e-10) break;
  }
  return std::exp((lo + hi) / 2.0);
}

struct NewtonOutcome {
  Eigen::VectorXd beta;
  Eigen::MatrixXd information;  // Z^T W Z at the optimum (standardized space)
  double ll = 0.0;
  bool converged = false;
  int iterations = 0;
};

NewtonOutcome newton_fit(Family family, const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                         double theta, Eigen::VectorXd beta0) {
  NewtonOutcome out;
  Eigen::VectorXd beta = std::move(beta0);
  FamilyEval ev = evaluate(family, Z * beta, y, theta);
  for (int iter = 1; iter <= kMaxNewtonIter; ++iter) {
    out.iterations = iter;
    const Eigen::VectorXd grad = Z.transpose() * ev.score;
    if (grad.norm() < kGradTol) {
      out.converged = true;
      out.iterations = iter - 1;
      break;
    }
    const Eigen::MatrixXd info =
        Z.transpose() * ev.weights.asDiagonal() * Z;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw Error("rank deficient information matrix");
    Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) throw Error("rank deficient information matrix");

    // Once the quadratic-model gain falls under the log-likelihood's
    // floating-point noise floor, a monotonicity check can no longer see
    // progress; take the plain Newton step, which is contractive there.
    const double noise = 1e-12 * (1.0 + std::abs(ev.ll));
    const double predicted_gain = 0.5 * grad.dot(step);
    if (predicted_gain <= noise) {
      beta += step;
      ev = evaluate(family, Z * beta, y, theta);
      continue;
    }

    double t = 1.0;
    FamilyEval next;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      next = evaluate(family, Z * (beta + t * step), y, theta);
      if (std::isfinite(next.ll) && next.ll >= ev.ll - noise) {
        improved = true;
        break;
      }
      t /= 2.0;
    }
    if (!improved) break;  // stalled; converged flag stays as the gradient says
    beta += t * step;
    ev = std::move(next);
  }
  // Final state.
  ev = evaluate(family, Z * beta, y, theta);
  if ((Z.transpose() * ev.score).norm() < kGradTol) out.converged = true;
  out.beta = std::move(beta);
  out.information = Z.transpose() * ev.weights.asDiagonal() * Z;
  out.ll = ev.ll;
  return out;
}

Eigen::VectorXd initial_beta(Family family, const Eigen::VectorXd& y, Eigen::Index k) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  switch (family) {
    case Family::logistic: {
      const double rate = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
      beta[0] = std::log(rate / (1.0 - rate));
      break;
    }
    case Family::poisson:
    case Family::negbin:
    case Family::trunc_poisson:
      beta[0] = std::log(std::max(y.mean(), 1e-3));
      break;
  }
  return beta;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::logistic: return "logistic";
    case Family::poisson: return "poisson";
    case Family::trunc_poisson: return "trunc_poisson";
    case Family::negbin: return "negbin";
  }
  return "?";
}

DesignMatrix DesignMatrix::create(const std::vector<std::string>& covariates,
                                  const Eigen::MatrixXd& values, const Eigen::VectorXd& response) {
  if (values.cols() != static_cast<Eigen::Index>(covariates.size()))
    throw Error("covariate count does not match value columns");
  if (values.rows() != response.size()) throw Error("row count mismatch");
  DesignMatrix d;
  d.columns.reserve(covariates.size() + 1);
  d.columns.emplace_back("intercept");
  d.columns.insert(d.columns.end(), covariates.begin(), covariates.end());
  d.X.resize(values.rows(), values.cols() + 1);
  d.X.col(0).setOnes();
  d.X.rightCols(values.cols()) = values;
  d.y = response;
  d.validate();
  return d;
}

std::size_t DesignMatrix::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return j;
  throw Error("no such design column: " + std::string(name));
}

DesignMatrix DesignMatrix::select_columns(const std::vector<std::string>& covariates) const {
  DesignMatrix d;
  d.columns.emplace_back("intercept");
  d.X.resize(X.rows(), static_cast<Eigen::Index>(covariates.size()) + 1);
  d.X.col(0) = X.col(static_cast<Eigen::Index>(column_index("intercept")));
  for (std::size_t j = 0; j < covariates.size(); ++j) {
    d.columns.push_back(covariates[j]);
    d.X.col(static_cast<Eigen::Index>(j + 1)) =
        X.col(static_cast<Eigen::Index>(column_index(covariates[j])));
  }
  d.y = y;
  d.validate();
  return d;
}

void DesignMatrix::validate() const {
  if (columns.size() != static_cast<std::size_t>(X.cols()))
    throw Error("design: column name/count mismatch");
  if (X.rows() != y.size()) throw Error("design: X/y row mismatch");
  if (X.rows() <= X.cols())
    throw Error("design: need more observations than columns (n=" + std::to_string(X.rows()) +
                ", k=" + std::to_string(X.cols()) + ")");
  if (!X.allFinite() || !y.allFinite()) throw Error("design: non-finite entries");
  std::set<std::string> names(columns.begin(), columns.end());
  if (names.size() != columns.size()) throw Error("design: duplicate column names");
}

double FitResult::coef(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return coefficients[static_cast<Eigen::Index>(j)];
  throw Error("no such coefficient: " + std::string(name));
}

double FitResult::stderr_of(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return std_errors[static_cast<Eigen::Index>(j)];
  throw Error("no such coefficient: " + std::string(name));
}

FitResult fit_glm(const DesignMatrix& design, Family family) {
  design.validate();
  validate_response(family, design.y);
  if (family == Family::logistic) check_separation(design);

  const auto k = design.X.cols();
  const Standardized st = standardize(design.X);

  // Up-front rank check gives a clearer error than a failed solve.
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(st.Z);
  if (qr.rank() < k) throw Error("rank deficient design matrix");

  double theta = 1.0;
  NewtonOutcome outcome;
  int total_iterations = 0;
  if (family != Family::negbin) {
    outcome = newton_fit(family, st.Z, design.y, 0.0, initial_beta(family, design.y, k));
    total_iterations = outcome.iterations;
  } else {
    // Moment start for the dispersion, then alternate profile steps.
    const double mean = design.y.mean();
    const double var = (design.y.array() - mean).square().sum() / std::max<double>(1, design.y.size() - 1);
    theta = var > mean ? std::clamp(mean * mean / (var - mean), 1e-2, 1e4) : 10.0;
    Eigen::VectorXd beta = initial_beta(family, design.y, k);
    bool theta_stable = false;
    for (int round = 0; round < 50; ++round) {
      outcome = newton_fit(family, st.Z, design.y, theta, beta);
      total_iterations += outcome.iterations;
      beta = outcome.beta;
      const double next = optimize_theta(st.Z * beta, design.y);
      const double drift = std::abs(std::log(next) - std::log(theta));
      theta = next;
      // The profile surface is flat at the top relative to fp noise; 1e-6
      // in log-theta is at the resolution limit of the line search.
      if (drift < 1e-6) {
        theta_stable = true;
        break;
      }
    }
    outcome = newton_fit(family, st.Z, design.y, theta, beta);
    outcome.converged = outcome.converged && theta_stable;
  }

  FitResult fit;
  fit.family = family;
  fit.columns = design.columns;
  fit.converged = outcome.converged;
  fit.iterations = family == Family::negbin ? total_iterations : outcome.iterations;
  fit.log_likelihood = outcome.ll;
  if (family == Family::negbin) fit.theta = theta;
  fit.center = st.center;
  fit.scale = st.scale;

  // Covariance in standardized space, mapped back to the original scale:
  // beta_j = beta_std_j / s_j, intercept absorbs the centers.
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(outcome.information);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw Error("rank deficient information matrix");
  const Eigen::MatrixXd cov_std = ldlt.solve(Eigen::MatrixXd::Identity(k, k));

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  T(0, 0) = 1.0;
  for (Eigen::Index j = 1; j < k; ++j) {
    T(j, j) = 1.0 / st.scale[j];
    T(0, j) = -st.center[j] / st.scale[j];
  }
  fit.coefficients = T * outcome.beta;
  const Eigen::MatrixXd cov = T * cov_std * T.transpose();
  fit.std_errors.resize(k);
  fit.p_values.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    fit.std_errors[j] = std::sqrt(std::max(cov(j, j), 0.0));
    fit.p_values[j] =
        fit.std_errors[j] > 0.0 ? wald_p(fit.coefficients[j] / fit.std_errors[j]) : 0.0;
  }
  std::vector<double> praw(fit.p_values.data(), fit.p_values.data() + k);
  const std::vector<double> padj = bh_adjust(praw);
  fit.p_adjusted = Eigen::Map<const Eigen::VectorXd>(padj.data(), k);

  const int n_params = static_cast<int>(k) + (family == Family::negbin ? 1 : 0);
  fit.aic = 2.0 * n_params - 2.0 * fit.log_likelihood;
  return fit;
}

Eigen::VectorXd per_observation_ll(const FitResult& fit, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y) {
  const Eigen::VectorXd eta = X * fit.coefficients;
  Eigen::VectorXd ll(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    ll[i] = row_ll(fit.family, eta[i], y[i], fit.theta.value_or(1.0));
  return ll;
}

double family_mean(Family family, double eta) {
  switch (family) {
    case Family::logistic:
      return sigmoid(eta);
    case Family::poisson:
    case Family::negbin:
      return clamp_lambda(std::exp(eta));
    case Family::trunc_poisson: {
      const double lambda = clamp_lambda(std::exp(eta));
      return lambda / -std::expm1(-lambda);
    }
  }
  return 0.0;
}

double HurdleFit::aic() const {
  const double k = static_cast<double>(zero.columns.size() + count.columns.size());
  return 2.0 * k - 2.0 * total_log_likelihood();
}

HurdleFit fit_hurdle(const DesignMatrix& design, const std::vector<std::string>& zero_columns,
                     const std::vector<std::string>& count_columns) {
  design.validate();
  const auto n = design.y.size();
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (design.y[i] > 0) ++positives;
  if (positives == 0 || positives == n)
    throw Error("degenerate response: hurdle needs both zero and positive outcomes");

  HurdleFit h;
  h.zero_columns = zero_columns;
  h.count_columns = count_columns;

  DesignMatrix zero = design.select_columns(zero_columns);
  for (Eigen::Index i = 0; i < n; ++i) zero.y[i] = design.y[i] > 0 ? 1.0 : 0.0;
  h.zero = fit_glm(zero, Family::logistic);

  DesignMatrix full_count = design.select_columns(count_columns);
  DesignMatrix count;
  count.columns = full_count.columns;
  count.X.resize(positives, full_count.X.cols());
  count.y.resize(positives);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (design.y[i] <= 0) continue;
    count.X.row(r) = full_count.X.row(i);
    count.y[r] = design.y[i];
    ++r;
  }
  count.validate();
  h.count = fit_glm(count, Family::trunc_poisson);

  // Table-wide multiplicity correction across both components.
  std::vector<double> praw;
  for (Eigen::Index j = 0; j < h.zero.p_values.size(); ++j) praw.push_back(h.zero.p_values[j]);
  for (Eigen::Index j = 0; j < h.count.p_values.size(); ++j) praw.push_back(h.count.p_values[j]);
  const std::vector<double> padj = bh_adjust(praw);
  for (Eigen::Index j = 0; j < h.zero.p_adjusted.size(); ++j) h.zero.p_adjusted[j] = padj[j];
  for (Eigen::Index j = 0; j < h.count.p_adjusted.size(); ++j)
    h.count.p_adjusted[j] = padj[h.zero.p_adjusted.size() + j];
  return h;
}

HurdlePrediction hurdle_predict(const HurdleFit& fit, const std::map<std::string, double>& row) {
  const auto eta_of = [&](const FitResult& f) {
    double eta = 0.0;
    for (std::size_t j = 0; j < f.columns.size(); ++j) {
      if (f.columns[j] == "intercept") {
        eta += f.coefficients[static_cast<Eigen::Index>(j)];
        continue;
      }
      const auto it = row.find(f.columns[j]);
      if (it == row.end()) throw Error("prediction row is missing column " + f.columns[j]);
      eta += f.coefficients[static_cast<Eigen::Index>(j)] * it->second;
    }
    return eta;
  };
  HurdlePrediction p;
  p.p_positive = family_mean(Family::logistic, eta_of(fit.zero));
  p.expected_positive = family_mean(Family::trunc_poisson, eta_of(fit.count));
  p.expected = p.p_positive * p.expected_positive;
  return p;
}

VuongComparison vuong_test(const std::string& name_a, const Eigen::VectorXd& ll_a,
                           const std::string& name_b, const Eigen::VectorXd& ll_b) {
  if (ll_a.size() != ll_b.size()) throw Error("vuong_test: per-row LL size mismatch");
  VuongComparison v;
  v.model_a = name_a;
  v.model_b = name_b;
  const Eigen::VectorXd d = ll_a - ll_b;
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() / static_cast<double>(d.size());
  if (var < 1e-24) return v;  // identical per-row fits: undefined
  const double stat = std::sqrt(static_cast<double>(d.size())) * mean / std::sqrt(var);
  v.statistic = stat;
  v.p_value = wald_p(stat);
  return v;
}

double log_likelihood_at(Family family, const DesignMatrix& design, const Eigen::VectorXd& beta,
                         double theta) {
  if (beta.size() != design.X.cols()) throw Error("log_likelihood_at: beta size mismatch");
  const Eigen::VectorXd eta = design.X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += row_ll(family, eta[i], design.y[i], theta);
  return ll;
}

Eigen::VectorXd gradient_at(Family family, const DesignMatrix& design, const Eigen::VectorXd& beta,
                            double theta) {
  if (beta.size() != design.X.cols()) throw Error("gradient_at: beta size mismatch");
  const FamilyEval ev = evaluate(family, design.X * beta, design.y, theta);
  return design.X.transpose() * ev.score;
}

SelectionReport model_selection(const DesignMatrix& design,
                                const std::vector<std::string>& hurdle_zero_columns,
                                const std::vector<std::string>& hurdle_count_columns) {
  SelectionReport report;

  const FitResult poisson = fit_glm(design, Family::poisson);
  const FitResult negbin = fit_glm(design, Family::negbin);
  const HurdleFit hurdle = fit_hurdle(design, hurdle_zero_columns, hurdle_count_columns);

  const auto n = design.y.size();
  const Eigen::VectorXd ll_poisson = per_observation_ll(poisson, design.X, design.y);
  const Eigen::VectorXd ll_negbin = per_observation_ll(negbin, design.X, design.y);

  // Hurdle per-row LL: ln(1-pi) for zeros, ln(pi) + truncated-count LL otherwise.
  const DesignMatrix zero_design = design.select_columns(hurdle.zero_columns);
  const DesignMatrix count_design = design.select_columns(hurdle.count_columns);
  const Eigen::VectorXd eta_zero = zero_design.X * hurdle.zero.coefficients;
  const Eigen::VectorXd eta_count = count_design.X * hurdle.count.coefficients;
  Eigen::VectorXd ll_hurdle(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pi = sigmoid(eta_zero[i]);
    if (design.y[i] <= 0)
      ll_hurdle[i] = std::log(std::max(1.0 - pi, 1e-300));
    else
      ll_hurdle[i] = std::log(std::max(pi, 1e-300)) +
                     row_ll(Family::trunc_poisson, eta_count[i], design.y[i], 0.0);
  }

  report.entries.push_back({"poisson", poisson.log_likelihood, poisson.aic,
                            static_cast<int>(poisson.columns.size())});
  report.entries.push_back({"negbin", negbin.log_likelihood, negbin.aic,
                            static_cast<int>(negbin.columns.size()) + 1});
  report.entries.push_back({"hurdle", hurdle.total_log_likelihood(), hurdle.aic(),
                            static_cast<int>(hurdle.zero.columns.size() + hurdle.count.columns.size())});

  report.vuong.push_back(vuong_test("poisson", ll_poisson, "negbin", ll_negbin));
  report.vuong.push_back(vuong_test("poisson", ll_poisson, "hurdle", ll_hurdle));
  report.vuong.push_back(vuong_test("negbin", ll_negbin, "hurdle", ll_hurdle));

  report.preferred = report.entries.front().name;
  double best = report.entries.front().aic;
  for (const auto& e : report.entries)
    if (e.aic < best) {
      best = e.aic;
      report.preferred = e.name;
    }
  return report;
}

VifResult vif_screen(const DesignMatrix& design, const std::set<std::string>& protected_columns) {
  design.validate();
  std::vector<std::string> active;
  for (const auto& c : design.columns)
    if (c != "intercept") active.push_back(c);
  if (active.size() < 2) throw Error("vif_screen needs at least two non-intercept columns");

  VifResult result;
  const auto vif_of = [&](const std::string& target,
                          const std::vector<std::string>& others) -> double {
    const Eigen::VectorXd xj = design.X.col(static_cast<Eigen::Index>(design.column_index(target)));
    Eigen::MatrixXd R(design.X.rows(), static_cast<Eigen::Index>(others.size()) + 1);
    R.col(0).setOnes();
    for (std::size_t j = 0; j < others.size(); ++j)
      R.col(static_cast<Eigen::Index>(j + 1)) =
          design.X.col(static_cast<Eigen::Index>(design.column_index(others[j])));
    const Eigen::VectorXd beta = R.colPivHouseholderQr().solve(xj);
    const double ssr = (xj - R * beta).squaredNorm();
    const double sst = (xj.array() - xj.mean()).square().sum();
    if (sst <= 0.0) return std::numeric_limits<double>::infinity();
    const double r2 = 1.0 - ssr / sst;
    if (r2 >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
    return 1.0 / (1.0 - r2);
  };

  while (true) {
    std::vector<VifEntry> table;
    for (const auto& c : active) {
      std::vector<std::string> others;
      for (const auto& o : active)
        if (o != c) others.push_back(o);
      table.push_back({c, vif_of(c, others)});
    }
    // Exactly collinear columns (infinite VIF, including constants) cannot
    // be estimated and are dropped first, protected or not. Otherwise the
    // worst non-protected column above the threshold goes; later columns
    // lose ties.
    std::size_t worst = table.size();
    for (std::size_t j = 0; j < table.size(); ++j)
      if (std::isinf(table[j].vif)) worst = j;
    if (worst == table.size()) {
      for (std::size_t j = 0; j < table.size(); ++j) {
        if (protected_columns.count(table[j].column)) continue;
        if (table[j].vif <= 4.0) continue;
        if (worst == table.size() || table[j].vif >= table[worst].vif) worst = j;
      }
    }
    if (worst == table.size()) {
      result.final_table = std::move(table);
      break;
    }
    result.dropped.push_back(table[worst]);
    active.erase(std::find(active.begin(), active.end(), table[worst].column));
    if (active.size() < 2) {
      result.final_table.clear();
      for (const auto& c : active) result.final_table.push_back({c, 1.0});
      break;
    }
  }
  result.kept = active;
  return result;
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
  const std::size_t m = p_values.size();
  for (const double p : p_values)
    if (!(p >= 0.0 && p <= 1.0)) throw Error("p-values must lie in [0,1]");
  if (m == 0) return {};

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    const double scaled =
        p_values[order[i]] * static_cast<double>(m) / static_cast<double>(i + 1);
    running = std::min(running, scaled);
    // max() guards the p_adjusted >= p_values invariant against the double
    // rounding in p*m/j; mathematically the step-up value dominates anyway.
    adjusted[order[i]] = std::min(1.0, std::max(running, p_values[order[i]]));
  }
  return adjusted;
}

}  // namespace mlab
