#include <doctest.h>

#include <cmath>
#include <set>

#include "mlab/error.hpp"
#include "mlab/focus_metrics.hpp"
#include "support/synth.hpp"

using namespace mlab;

namespace {

InteractionMatrix make_matrix(const std::vector<std::vector<std::int64_t>>& cells) {
  InteractionMatrix m;
  for (std::size_t i = 0; i < cells.size(); ++i) m.rows.push_back("r" + std::to_string(i));
  for (std::size_t j = 0; j < cells[0].size(); ++j) m.cols.push_back("c" + std::to_string(j));
  for (const auto& row : cells)
    for (const auto v : row) m.cells.push_back(v);
  return m;
}

ThreadRecord thread_of(std::int64_t number, const std::string& author,
                       const std::vector<std::tuple<std::string, int, std::string>>& events) {
  ThreadRecord t;
  t.project = ProjectId{"octo", "focus"};
  t.number = number;
  t.created_at = parse_iso8601_or_throw("2017-01-01T00:00:00Z");
  t.author = author;
  for (const auto& [who, minute, body] : events)
    t.events.push_back({who, UtcTime{t.created_at.secs + minute * 60}, body});
  return t;
}

constexpr TimeWindow kAll{{0}, {4102444800}};  // through 2100

}  // namespace

TEST_CASE("kl divergence hand values") {
  const double even[] = {0.5, 0.5};
  CHECK(kl_divergence(even, even) == doctest::Approx(0.0).epsilon(1e-12));

  const double q1[] = {0.25, 0.75};
  CHECK(kl_divergence(even, q1) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0))
                                       .epsilon(1e-9));
  CHECK(kl_divergence(even, q1) == doctest::Approx(0.14384).epsilon(1e-4));

  const double point[] = {1.0, 0.0};
  CHECK(kl_divergence(point, even) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("kl divergence rejects bad input") {
  const double p[] = {0.7, 0.3};
  const double q[] = {1.0, 0.0};
  CHECK_THROWS_WITH_AS(kl_divergence(p, q), doctest::Contains("undefined divergence"), Error);
  const double not_normalized[] = {0.7, 0.7};
  CHECK_THROWS_AS(kl_divergence(not_normalized, p), Error);
  const double shorter[] = {1.0};
  CHECK_THROWS_AS(kl_divergence(shorter, p), Error);
}

TEST_CASE("specialization hand cases") {
  // Row profile equal to the marginals: raw 0, normalized 0.
  const auto uniform = specialization(make_matrix({{5, 5}, {5, 5}}), Axis::outward_row, 0);
  CHECK(uniform.raw_delta == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(uniform.normalized == doctest::Approx(0.0).epsilon(1e-12));

  // Fully concentrated diagonal: attains the analytic max ln(m/A).
  const auto diag = specialization(make_matrix({{10, 0}, {0, 10}}), Axis::outward_row, 0);
  CHECK(diag.raw_delta == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(diag.delta_max == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(diag.normalized == doctest::Approx(1.0).epsilon(1e-12));

  // Single-entry matrix is degenerate: delta_max == delta_min == 0.
  const auto single = specialization(make_matrix({{7}}), Axis::outward_row, 0);
  CHECK(single.normalized == 0.0);

  CHECK_THROWS_WITH_AS(specialization(make_matrix({{0, 0}, {3, 4}}), Axis::outward_row, 0),
                       doctest::Contains("inactive"), Error);
}

TEST_CASE("specialization properties on random matrices") {
  synth::Rng rng(501);
  for (int trial = 0; trial < 120; ++trial) {
    const InteractionMatrix m = synth::random_matrix(rng, 12);
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      if (m.row_total(r) == 0) continue;
      const auto s = specialization(m, Axis::outward_row, r);
      CHECK(s.raw_delta >= -1e-12);
      CHECK(s.normalized >= 0.0);
      CHECK(s.normalized <= 1.0);
      CHECK(s.delta_min <= s.raw_delta + 1e-9);
    }
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      if (m.col_total(c) == 0) continue;
      const auto s = specialization(m, Axis::inward_column, c);
      CHECK(s.normalized >= 0.0);
      CHECK(s.normalized <= 1.0);
    }
  }
}

TEST_CASE("scaling all cells leaves raw delta unchanged") {
  synth::Rng rng(502);
  for (int trial = 0; trial < 40; ++trial) {
    InteractionMatrix m = synth::random_matrix(rng, 8);
    InteractionMatrix scaled = m;
    for (auto& v : scaled.cells) v *= 3;
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      if (m.row_total(r) == 0) continue;
      const auto a = specialization(m, Axis::outward_row, r);
      const auto b = specialization(scaled, Axis::outward_row, r);
      CHECK(a.raw_delta == doctest::Approx(b.raw_delta).epsilon(1e-9));
    }
  }
}

TEST_CASE("permutation invariance of specialization scores") {
  synth::Rng rng(503);
  const InteractionMatrix m = synth::random_matrix(rng, 6);
  // Reverse both row and column order.
  InteractionMatrix p;
  p.rows.assign(m.rows.rbegin(), m.rows.rend());
  p.cols.assign(m.cols.rbegin(), m.cols.rend());
  p.cells.assign(m.cells.size(), 0);
  for (std::size_t r = 0; r < m.rows.size(); ++r)
    for (std::size_t c = 0; c < m.cols.size(); ++c)
      p.cells[(m.rows.size() - 1 - r) * p.cols.size() + (m.cols.size() - 1 - c)] = m.at(r, c);

  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    if (m.row_total(r) == 0) continue;
    const auto a = specialization(m, Axis::outward_row, r);
    const auto b = specialization(p, Axis::outward_row, m.rows.size() - 1 - r);
    CHECK(a.raw_delta == doctest::Approx(b.raw_delta).epsilon(1e-12));
    CHECK(a.normalized == doctest::Approx(b.normalized).epsilon(1e-12));
  }
}

TEST_CASE("oss/iss absence and extremes") {
  // "solo" replies once to "vip", who receives no other replies, while
  // u1..u4 reply uniformly among themselves. solo's single reply then sits
  // on the rarest column, attaining the analytic maximum ln(m/A).
  std::vector<ThreadRecord> threads;
  int number = 1;
  threads.push_back(thread_of(number++, "solo", {{"solo", 0, "opening"},
                                                 {"vip", 1, "hello"},
                                                 {"solo", 2, "@vip thanks"}}));
  // u1..u4 reply to each other uniformly.
  const std::vector<std::string> others{"u1", "u2", "u3", "u4"};
  for (const auto& from : others)
    for (const auto& to : others) {
      if (from == to) continue;
      threads.push_back(thread_of(number++, to,
                                  {{to, 0, "opening"}, {from, 1, "@" + to + " reply"}}));
    }
  const ProjectStore store =
      ProjectStore::from_records(ProjectId{"octo", "focus"}, threads, {}, {});
  const MentionGraph g = build_graph(store, kAll);

  const auto solo = oss_iss(g, "solo");
  REQUIRE(solo.oss_rho.has_value());
  CHECK(*solo.oss_rho == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(solo.oss_kappa.has_value());  // no call out-edges
  CHECK_FALSE(solo.iss_kappa.has_value());  // never called

  // A developer with zero reply out-edges has no OSS_rho.
  const auto lurker = oss_iss(g, "u9");
  CHECK_FALSE(lurker.oss_rho.has_value());
}

TEST_CASE("uniformly called developer has ISS_kappa near zero") {
  // Everyone calls everyone once: each column profile equals the marginals.
  std::vector<ThreadRecord> threads;
  int number = 1;
  const std::vector<std::string> users{"a", "b", "c", "d", "e"};
  for (const auto& from : users)
    for (const auto& to : users) {
      if (from == to) continue;
      threads.push_back(thread_of(number++, from, {{from, 0, "ping @" + to}}));
    }
  const ProjectStore store =
      ProjectStore::from_records(ProjectId{"octo", "focus"}, threads, {}, {});
  const auto scores = oss_iss(build_graph(store, kAll), "c");
  REQUIRE(scores.iss_kappa.has_value());
  CHECK(*scores.iss_kappa == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("daf extremes") {
  const auto commit = [](const std::string& sha_seed, const std::string& dev, int day,
                         const std::vector<std::string>& paths) {
    CommitRecord c;
    c.sha = std::string(40 - sha_seed.size(), '0') + sha_seed;
    c.author_login = dev;
    c.author_date = UtcTime{parse_iso8601_or_throw("2017-01-01T00:00:00Z").secs + day * 86400};
    c.message = "work";
    for (const auto& p : paths) c.file_changes.push_back({p, std::nullopt, {}});
    return c;
  };

  std::vector<CommitRecord> commits;
  int seq = 1;
  // "focused" touches only module "niche", which nobody else touches.
  for (int i = 0; i < 4; ++i)
    commits.push_back(commit(std::to_string(seq++), "focused", i, {"niche/f.c"}));
  // Others spread uniformly over four modules.
  const std::vector<std::string> mods{"a", "b", "c", "d"};
  for (const auto& dev : {"u1", "u2", "u3"})
    for (const auto& mod : mods)
      commits.push_back(commit(std::to_string(seq++), dev, 5, {mod + "/x.c"}));

  const auto matrix = commit_module_matrix(commits, kAll, ModuleGranularity::top_dir);
  const auto focused = daf(matrix, "focused");
  REQUIRE(focused.has_value());
  CHECK(*focused > 0.9);

  // u1's touches mirror the project-wide module marginals almost exactly.
  const auto uniform = daf(matrix, "u1");
  REQUIRE(uniform.has_value());
  CHECK(*uniform < 0.2);

  CHECK_FALSE(daf(matrix, "stranger").has_value());
  const InteractionMatrix empty;
  CHECK_FALSE(daf(empty, "anyone").has_value());
}

TEST_CASE("responsiveness counts distinct answered threads") {
  std::vector<ThreadRecord> threads;
  // dev is called in 10 issues and answers in 8 of them.
  for (int i = 1; i <= 10; ++i) {
    std::vector<std::tuple<std::string, int, std::string>> events{
        {"caller", 0, "please @dev look"}};
    if (i <= 8) events.push_back({"dev", 30, "on it"});
    threads.push_back(thread_of(i, "caller", events));
  }
  const ProjectStore store =
      ProjectStore::from_records(ProjectId{"octo", "focus"}, threads, {}, {});
  const MentionGraph g = build_graph(store, kAll);
  CHECK(degree_and_responsiveness(g, store.threads(), "dev", kAll).responsiveness == 8);
  CHECK(degree_and_responsiveness(g, store.threads(), "caller", kAll).responsiveness == 0);
  CHECK(degree_and_responsiveness(g, store.threads(), "dev", kAll).observed_call_indegree == 10);
  CHECK(degree_and_responsiveness(g, store.threads(), "caller", kAll).social_outdegree == 10);
}

TEST_CASE("responsiveness is thread-level even for repeated calls") {
  const ThreadRecord t = thread_of(1, "caller", {{"caller", 0, "@dev first"},
                                                 {"other", 5, "@dev second"},
                                                 {"dev", 10, "answered"}});
  const ProjectStore store = ProjectStore::from_records(ProjectId{"octo", "focus"}, {t}, {}, {});
  const MentionGraph g = build_graph(store, kAll);
  const auto d = degree_and_responsiveness(g, store.threads(), "dev", kAll);
  CHECK(d.observed_call_indegree == 2);
  CHECK(d.responsiveness == 1);
}

TEST_CASE("responsiveness upper bound property") {
  synth::Rng rng(504);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<ThreadRecord> threads;
    for (int n = 1; n <= 6; ++n) threads.push_back(synth::random_thread(rng, n));
    const ProjectStore store =
        ProjectStore::from_records(ProjectId{"synth", "proj"}, threads, {}, {});
    const MentionGraph g = build_graph(store, kAll);
    for (int u = 0; u < 6; ++u) {
      const std::string dev = "user" + std::to_string(u);
      std::set<std::int64_t> called_threads;
      for (const auto& e : g.edges)
        if (e.kind == MentionKind::call && e.mentionee == dev) called_threads.insert(e.thread);
      const auto d = degree_and_responsiveness(g, store.threads(), dev, kAll);
      CHECK(d.responsiveness <= static_cast<std::int64_t>(called_threads.size()));
    }
  }
}
