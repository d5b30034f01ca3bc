#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "mlab/focus_metrics.hpp"
#include "mlab/glm.hpp"
#include "mlab/mention_graph.hpp"

namespace {

using namespace mlab;

std::string synthetic_body(std::mt19937_64& rng, int words) {
  static const char* kWords[] = {"the", "crash", "happens", "when", "loading", "a",
                                 "config", "with", "nested", "tables", "see", "trace"};
  std::ostringstream s;
  for (int i = 0; i < words; ++i) {
    if (i % 9 == 8)
      s << "@user" << rng() % 40 << ' ';
    else
      s << kWords[rng() % 12] << ' ';
  }
  return s.str();
}

void BM_ExtractMentions(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::string body = synthetic_body(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto mentions = extract_mentions(body);
    benchmark::DoNotOptimize(mentions);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(body.size()));
}
BENCHMARK(BM_ExtractMentions)->Range(64, 4096);

InteractionMatrix random_matrix(std::mt19937_64& rng, int dim) {
  InteractionMatrix m;
  for (int i = 0; i < dim; ++i) {
    m.rows.push_back("r" + std::to_string(i));
    m.cols.push_back("c" + std::to_string(i));
  }
  m.cells.resize(static_cast<std::size_t>(dim) * dim);
  for (auto& v : m.cells) v = static_cast<std::int64_t>(rng() % 7);
  m.cells[0] += 1;
  return m;
}

void BM_Specialization(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const InteractionMatrix m = random_matrix(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      if (m.row_total(r) == 0) continue;
      auto s = specialization(m, Axis::outward_row, r);
      benchmark::DoNotOptimize(s);
    }
  }
}
BENCHMARK(BM_Specialization)->Arg(8)->Arg(32)->Arg(128);

void BM_PoissonFit(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = normal(rng);
    X(i, 1) = normal(rng);
    std::poisson_distribution<long> pois(std::exp(0.4 + 0.6 * X(i, 0) - 0.3 * X(i, 1)));
    y[i] = static_cast<double>(pois(rng));
  }
  const DesignMatrix d = DesignMatrix::create({"x0", "x1"}, X, y);
  for (auto _ : state) {
    auto fit = fit_glm(d, Family::poisson);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(BM_PoissonFit)->Arg(1000)->Arg(10000);

void BM_HurdleFit(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = normal(rng);
    X(i, 1) = normal(rng);
    const double p = 1.0 / (1.0 + std::exp(-(0.2 + 0.8 * X(i, 0))));
    if (unif(rng) < p) {
      std::poisson_distribution<long> pois(std::exp(0.5 + 0.4 * X(i, 1)));
      long v = 0;
      while ((v = pois(rng)) < 1) {
      }
      y[i] = static_cast<double>(v);
    } else {
      y[i] = 0.0;
    }
  }
  const DesignMatrix d = DesignMatrix::create({"x0", "x1"}, X, y);
  for (auto _ : state) {
    auto fit = fit_hurdle(d, {"x0", "x1"}, {"x0", "x1"});
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(BM_HurdleFit)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
