#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlab/error.hpp"
#include "mlab/glm.hpp"
#include "support/synth.hpp"

using namespace mlab;

namespace {

DesignMatrix design_of(const synth::GlmSample& s, const std::string& prefix = "x") {
  std::vector<std::string> names;
  for (int j = 0; j < s.covariates.cols(); ++j) names.push_back(prefix + std::to_string(j));
  return DesignMatrix::create(names, s.covariates, s.y);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("bh adjustment hand example and edge cases") {
  CHECK(bh_adjust({0.01, 0.02, 0.04}) == std::vector<double>{0.03, 0.03, 0.04});
  CHECK(bh_adjust({0.0, 0.0, 0.0}) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(bh_adjust({0.37}) == std::vector<double>{0.37});
  CHECK(bh_adjust({}).empty());
  CHECK_THROWS_AS(bh_adjust({1.5}), Error);

  // Order independence: adjusting a permuted vector permutes the output.
  const auto fwd = bh_adjust({0.04, 0.01, 0.02});
  CHECK(fwd == std::vector<double>{0.04, 0.03, 0.03});
}

TEST_CASE("bh adjustment dominates the input and stays capped") {
  synth::Rng rng(601);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 25);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(static_cast<std::size_t>(len(rng)));
    for (auto& v : p) v = unif(rng);
    const auto adj = bh_adjust(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(adj[i] >= p[i]);
      CHECK(adj[i] <= 1.0);
    }
    // Deterministic and order-consistent: adjusting twice re-ranks the
    // already-inflated values but never drops below them.
    const auto twice = bh_adjust(adj);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(twice[i] >= adj[i] - 1e-15);
    // The largest adjusted value is a fixed point of re-adjustment.
    const double max_adj = *std::max_element(adj.begin(), adj.end());
    CHECK(*std::max_element(twice.begin(), twice.end()) ==
          doctest::Approx(max_adj).epsilon(1e-12));
  }
}

TEST_CASE("truncated poisson pmf value at lambda = ln 2") {
  // P(Y=1 | Y>0) = (e^-l * l) / (1 - e^-l) = 0.6931 at l = ln 2.
  FitResult fit;
  fit.family = Family::trunc_poisson;
  fit.columns = {"intercept"};
  fit.coefficients = vec({std::log(std::log(2.0))});
  Eigen::MatrixXd X(1, 1);
  X(0, 0) = 1.0;
  const Eigen::VectorXd ll = per_observation_ll(fit, X, vec({1.0}));
  CHECK(std::exp(ll[0]) == doctest::Approx(0.69314718).epsilon(1e-8));
}

TEST_CASE("analytic gradients match central differences") {
  synth::Rng rng(602);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int n = 60, k = 3;
  const double h = 1e-5;

  for (const Family family :
       {Family::logistic, Family::poisson, Family::trunc_poisson, Family::negbin}) {
    for (int point = 0; point < 30; ++point) {
      Eigen::VectorXd beta_true = vec({0.2, 0.4, -0.3, 0.25});
      synth::GlmSample sample;
      switch (family) {
        case Family::logistic: sample = synth::logistic_sample(rng, n, beta_true); break;
        case Family::poisson: sample = synth::poisson_sample(rng, n, beta_true); break;
        case Family::trunc_poisson: sample = synth::ztp_sample(rng, n, beta_true); break;
        case Family::negbin: sample = synth::negbin_sample(rng, n, beta_true, 1.7); break;
      }
      const DesignMatrix d = design_of(sample);
      Eigen::VectorXd beta(k + 1);
      for (int j = 0; j <= k; ++j) beta[j] = coef(rng);

      const Eigen::VectorXd analytic = gradient_at(family, d, beta, 1.7);
      Eigen::VectorXd numeric(k + 1);
      for (int j = 0; j <= k; ++j) {
        Eigen::VectorXd hi = beta, lo = beta;
        hi[j] += h;
        lo[j] -= h;
        numeric[j] =
            (log_likelihood_at(family, d, hi, 1.7) - log_likelihood_at(family, d, lo, 1.7)) /
            (2.0 * h);
      }
      const double scale = std::max(analytic.cwiseAbs().maxCoeff(), 1.0);
      CHECK((analytic - numeric).cwiseAbs().maxCoeff() / scale < 1e-5);
    }
  }
}

TEST_CASE("logistic null slope stays within three standard errors") {
  synth::Rng rng(603);
  const auto sample = synth::logistic_sample(rng, 4000, vec({0.3, 0.0}));
  const FitResult fit = fit_glm(design_of(sample), Family::logistic);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coef("x0")) <= 3.0 * fit.stderr_of("x0"));
}

TEST_CASE("poisson recovery within 0.05") {
  synth::Rng rng(604);
  const Eigen::VectorXd truth = vec({0.5, 1.2});
  const auto sample = synth::poisson_sample(rng, 10000, truth);
  const FitResult fit = fit_glm(design_of(sample), Family::poisson);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coef("intercept") - 0.5) < 0.05);
  CHECK(std::abs(fit.coef("x0") - 1.2) < 0.05);
}

TEST_CASE("truncated poisson recovery within 0.05") {
  synth::Rng rng(605);
  const Eigen::VectorXd truth = vec({0.4, 0.6});
  const auto sample = synth::ztp_sample(rng, 12000, truth);
  const FitResult fit = fit_glm(design_of(sample), Family::trunc_poisson);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coef("intercept") - 0.4) < 0.05);
  CHECK(std::abs(fit.coef("x0") - 0.6) < 0.05);
}

TEST_CASE("negative binomial recovery including dispersion") {
  synth::Rng rng(606);
  const Eigen::VectorXd truth = vec({0.5, 0.8});
  const auto sample = synth::negbin_sample(rng, 15000, truth, 2.0);
  const FitResult fit = fit_glm(design_of(sample), Family::negbin);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coef("intercept") - 0.5) < 0.05);
  CHECK(std::abs(fit.coef("x0") - 0.8) < 0.05);
  REQUIRE(fit.theta.has_value());
  CHECK(*fit.theta > 1.5);
  CHECK(*fit.theta < 2.6);
}

TEST_CASE("logistic fitted probabilities average to the positive rate") {
  synth::Rng rng(607);
  const auto sample = synth::logistic_sample(rng, 3000, vec({-0.4, 0.9, -0.6}));
  const DesignMatrix d = design_of(sample);
  const FitResult fit = fit_glm(d, Family::logistic);
  const Eigen::VectorXd eta = d.X * fit.coefficients;
  double mean_p = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) mean_p += 1.0 / (1.0 + std::exp(-eta[i]));
  mean_p /= static_cast<double>(eta.size());
  CHECK(mean_p == doctest::Approx(d.y.mean()).epsilon(1e-7));
}

TEST_CASE("aic identity") {
  synth::Rng rng(608);
  const auto sample = synth::poisson_sample(rng, 500, vec({0.2, 0.5}));
  const FitResult fit = fit_glm(design_of(sample), Family::poisson);
  CHECK(fit.aic == 2.0 * 2 - 2.0 * fit.log_likelihood);
  const auto nb = fit_glm(design_of(sample), Family::negbin);
  CHECK(nb.aic == 2.0 * 3 - 2.0 * nb.log_likelihood);  // +1 for theta
}

TEST_CASE("hurdle fit recovers both stages and decomposes exactly") {
  synth::Rng rng(609);
  const Eigen::VectorXd beta_zero = vec({0.3, 0.8, -0.5});
  const Eigen::VectorXd beta_count = vec({0.6, 0.5, 0.4});
  const auto sample = synth::hurdle_sample(rng, 20000, beta_zero, beta_count);
  const DesignMatrix d = design_of(sample);
  const HurdleFit h = fit_hurdle(d, {"x0", "x1"}, {"x0", "x1"});

  CHECK(h.zero.converged);
  CHECK(h.count.converged);
  CHECK(std::abs(h.zero.coef("intercept") - 0.3) < 0.05);
  CHECK(std::abs(h.zero.coef("x0") - 0.8) < 0.05);
  CHECK(std::abs(h.zero.coef("x1") + 0.5) < 0.05);
  CHECK(std::abs(h.count.coef("intercept") - 0.6) < 0.05);
  CHECK(std::abs(h.count.coef("x0") - 0.5) < 0.05);
  CHECK(std::abs(h.count.coef("x1") - 0.4) < 0.05);

  CHECK(h.total_log_likelihood() ==
        doctest::Approx(h.zero.log_likelihood + h.count.log_likelihood).epsilon(1e-15));

  // p_adjusted dominates p_values after the joint correction.
  for (Eigen::Index j = 0; j < h.zero.p_values.size(); ++j)
    CHECK(h.zero.p_adjusted[j] >= h.zero.p_values[j]);
  for (Eigen::Index j = 0; j < h.count.p_values.size(); ++j)
    CHECK(h.count.p_adjusted[j] >= h.count.p_values[j]);
}

TEST_CASE("hurdle rejects an all-zero response") {
  Eigen::MatrixXd X(40, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(40);
  synth::Rng rng(610);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 40; ++i) X(i, 0) = normal(rng);
  const DesignMatrix d = DesignMatrix::create({"x0"}, X, y);
  CHECK_THROWS_WITH_AS(fit_hurdle(d, {"x0"}, {"x0"}), doctest::Contains("degenerate response"),
                       Error);
}

TEST_CASE("hurdle prediction composes the two stages") {
  synth::Rng rng(611);
  const auto sample = synth::hurdle_sample(rng, 6000, vec({0.2, 0.7}), vec({0.5, 0.3}));
  const HurdleFit h = fit_hurdle(design_of(sample), {"x0"}, {"x0"});
  const HurdlePrediction p = hurdle_predict(h, {{"x0", 0.4}});
  CHECK(p.p_positive > 0.0);
  CHECK(p.p_positive < 1.0);
  CHECK(p.expected_positive >= 1.0);
  CHECK(p.expected == p.p_positive * p.expected_positive);
  CHECK_THROWS_AS(hurdle_predict(h, {{"wrong", 1.0}}), Error);
}

TEST_CASE("model selection prefers the generating family") {
  synth::Rng rng(612);
  // Strongly zero-inflated hurdle data: the hurdle should win on AIC.
  const auto hs = synth::hurdle_sample(rng, 8000, vec({-1.0, 1.5}), vec({1.2, 0.6}));
  const DesignMatrix hd = design_of(hs);
  const SelectionReport hr = model_selection(hd, {"x0"}, {"x0"});
  CHECK(hr.preferred == "hurdle");
  REQUIRE(hr.entries.size() == 3);
  REQUIRE(hr.vuong.size() == 3);

  // Poisson data: the poisson AIC stays within 2k of the hurdle's.
  const auto ps = synth::poisson_sample(rng, 8000, vec({0.4, 0.7}));
  const DesignMatrix pd = design_of(ps);
  const SelectionReport pr = model_selection(pd, {"x0"}, {"x0"});
  double aic_poisson = 0.0, aic_hurdle = 0.0;
  for (const auto& e : pr.entries) {
    if (e.name == "poisson") aic_poisson = e.aic;
    if (e.name == "hurdle") aic_hurdle = e.aic;
  }
  CHECK(aic_poisson <= aic_hurdle + 2.0 * 4);
}

TEST_CASE("vuong of a model against itself is undefined") {
  Eigen::VectorXd ll(5);
  ll << -1.0, -2.0, -0.5, -3.0, -1.5;
  const VuongComparison v = vuong_test("m", ll, "m", ll);
  CHECK_FALSE(v.statistic.has_value());
  CHECK_FALSE(v.p_value.has_value());

  Eigen::VectorXd other = ll.array() - 0.3;  // constant shift: zero variance too
  CHECK_FALSE(vuong_test("a", ll, "b", other).statistic.has_value());

  Eigen::VectorXd different = ll;
  different[0] = -4.0;
  CHECK(vuong_test("a", ll, "b", different).statistic.has_value());
}

TEST_CASE("perfect separation is reported with the column name") {
  Eigen::MatrixXd X(30, 1);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) {
    X(i, 0) = i < 15 ? -1.0 - i * 0.01 : 1.0 + i * 0.01;
    y[i] = i < 15 ? 0.0 : 1.0;
  }
  const DesignMatrix d = DesignMatrix::create({"splitter"}, X, y);
  CHECK_THROWS_WITH_AS(fit_glm(d, Family::logistic), doctest::Contains("splitter"), Error);
}

TEST_CASE("rank deficiency is reported") {
  synth::Rng rng(613);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(60, 2);
  for (int i = 0; i < 60; ++i) {
    X(i, 0) = normal(rng);
    X(i, 1) = 2.0 * X(i, 0);  // exact linear dependence
  }
  Eigen::VectorXd y(60);
  for (int i = 0; i < 60; ++i) y[i] = static_cast<double>(i % 3);
  const DesignMatrix d = DesignMatrix::create({"a", "b"}, X, y);
  CHECK_THROWS_WITH_AS(fit_glm(d, Family::poisson), doctest::Contains("rank deficient"), Error);
}

TEST_CASE("design matrix validation") {
  Eigen::MatrixXd X(3, 2);
  X.setZero();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(DesignMatrix::create({"a", "b"}, X, y), Error);  // n <= k

  Eigen::MatrixXd X2(10, 1);
  X2.setOnes();
  X2(3, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DesignMatrix::create({"a"}, X2, Eigen::VectorXd::Zero(10)), Error);

  Eigen::MatrixXd X3(10, 2);
  X3.setRandom();
  CHECK_THROWS_AS(DesignMatrix::create({"a", "a"}, X3, Eigen::VectorXd::Zero(10)), Error);
}

TEST_CASE("vif screening") {
  synth::Rng rng(614);
  std::normal_distribution<double> normal;

  // Orthogonal-by-construction columns have VIF near 1.
  const int n = 400;
  Eigen::MatrixXd X(n, 2);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = normal(rng);
    X(i, 1) = normal(rng);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) y[i] = static_cast<double>(i % 2);
  const VifResult r1 = vif_screen(DesignMatrix::create({"a", "b"}, X, y), {});
  REQUIRE(r1.kept.size() == 2);
  for (const auto& e : r1.final_table) CHECK(e.vif == doctest::Approx(1.0).epsilon(0.05));

  // A duplicated column is exactly collinear; one copy is dropped.
  Eigen::MatrixXd X2(n, 2);
  for (int i = 0; i < n; ++i) {
    X2(i, 0) = normal(rng);
    X2(i, 1) = X2(i, 0);
  }
  const VifResult r2 = vif_screen(DesignMatrix::create({"a", "b"}, X2, y), {});
  CHECK(r2.kept == std::vector<std::string>{"a"});
  REQUIRE(r2.dropped.size() == 1);
  CHECK(r2.dropped[0].column == "b");

  // Near-duplicate: correlation ~0.999 -> VIF far above 4, dropped.
  Eigen::MatrixXd X3(n, 3);
  for (int i = 0; i < n; ++i) {
    X3(i, 0) = normal(rng);
    X3(i, 1) = X3(i, 0) + 0.04 * normal(rng);
    X3(i, 2) = normal(rng);
  }
  const VifResult r3 = vif_screen(DesignMatrix::create({"a", "b", "c"}, X3, y), {});
  CHECK(r3.kept.size() == 2);
  REQUIRE(r3.dropped.size() == 1);
  CHECK(r3.dropped[0].vif > 4.0);

  // Protected columns survive even with high VIF.
  const VifResult r4 =
      vif_screen(DesignMatrix::create({"a", "b", "c"}, X3, y), {"a", "b"});
  CHECK(r4.kept.size() == 3);
}
