#include "mlab/focus_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "mlab/error.hpp"

namespace mlab {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kDegenerate = 1e-12;

// One allocation term of delta: (x/A) * ln(x / (A*q)), zero at x = 0.
double alloc_term(std::int64_t x, double total, double q) {
  if (x == 0) return 0.0;
  const double p = static_cast<double>(x) / total;
  return p * std::log(p / q);
}

// Minimum achievable delta when `total` integer units are spread over cells
// with marginal weights q: greedy proportional fill capped at ceil(total*q),
// then single-unit exchanges until no move improves. The objective is
// separable and convex, so exchange-local optimality is global.
double delta_min_integer(std::int64_t total, const std::vector<double>& q) {
  const std::size_t k = q.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (q[a] != q[b]) return q[a] > q[b];
    return a < b;
  });

  std::vector<std::int64_t> alloc(k, 0);
  std::int64_t remaining = total;
  for (const std::size_t j : order) {
    if (remaining == 0) break;
    if (q[j] <= 0.0) continue;
    const auto cap = static_cast<std::int64_t>(std::ceil(static_cast<double>(total) * q[j]));
    const std::int64_t take = std::min(remaining, cap);
    alloc[j] = take;
    remaining -= take;
  }
  // ceil-capping guarantees sum(cap) >= total across the positive-q cells.

  // Single-unit exchanges until no move lowers delta. The objective is
  // separable, so the best source and destination are independent argmins
  // (second-best destination covers the source == destination collision).
  const double dt = static_cast<double>(total);
  const auto removal_gain = [&](std::size_t j) {
    return alloc_term(alloc[j] - 1, dt, q[j]) - alloc_term(alloc[j], dt, q[j]);
  };
  const auto addition_cost = [&](std::size_t j) {
    return alloc_term(alloc[j] + 1, dt, q[j]) - alloc_term(alloc[j], dt, q[j]);
  };
  while (true) {
    std::size_t from1 = k, from2 = k, to1 = k, to2 = k;
    double rem1 = 0.0, rem2 = 0.0, add1 = 0.0, add2 = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (alloc[j] > 0) {
        const double r = removal_gain(j);
        if (from1 == k || r < rem1) {
          from2 = from1;
          rem2 = rem1;
          from1 = j;
          rem1 = r;
        } else if (from2 == k || r < rem2) {
          from2 = j;
          rem2 = r;
        }
      }
      if (q[j] > 0.0) {
        const double a = addition_cost(j);
        if (to1 == k || a < add1) {
          to2 = to1;
          add2 = add1;
          to1 = j;
          add1 = a;
        } else if (to2 == k || a < add2) {
          to2 = j;
          add2 = a;
        }
      }
    }
    if (from1 == k || to1 == k) break;
    std::size_t from = from1, to = to1;
    double gain = rem1 + add1;
    if (from1 == to1) {
      // Self-pairs never improve (convexity); take the better cross pair.
      gain = std::numeric_limits<double>::infinity();
      if (to2 != k && rem1 + add2 < gain) {
        gain = rem1 + add2;
        from = from1;
        to = to2;
      }
      if (from2 != k && rem2 + add1 < gain) {
        gain = rem2 + add1;
        from = from2;
        to = to1;
      }
    }
    if (gain >= -kDegenerate * 1e-3) break;
    --alloc[from];
    ++alloc[to];
  }

  double delta = 0.0;
  for (std::size_t j = 0; j < k; ++j)
    if (alloc[j] > 0) delta += alloc_term(alloc[j], dt, q[j]);
  return std::max(0.0, delta);
}

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("kl_divergence: length mismatch");
  double sp = 0.0, sq = 0.0;
  for (const double v : p) sp += v;
  for (const double v : q) sq += v;
  if (std::abs(sp - 1.0) > kSumTolerance || std::abs(sq - 1.0) > kSumTolerance)
    throw Error("kl_divergence: inputs must sum to 1");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw Error("kl_divergence: negative probability");
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw Error("undefined divergence: P has mass where Q is zero");
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, d);
}

SpecializationScore specialization(const InteractionMatrix& m, Axis axis, std::size_t index) {
  const std::int64_t grand = m.grand_total();
  if (grand <= 0) throw Error("specialization: empty matrix");

  const bool row_axis = axis == Axis::outward_row;
  const std::size_t k = row_axis ? m.cols.size() : m.rows.size();
  std::vector<std::int64_t> profile(k, 0);
  std::vector<double> q(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    profile[j] = row_axis ? m.at(index, j) : m.at(j, index);
    const std::int64_t marginal = row_axis ? m.col_total(j) : m.row_total(j);
    q[j] = static_cast<double>(marginal) / static_cast<double>(grand);
  }
  std::int64_t subject_total = 0;
  for (const auto v : profile) subject_total += v;
  if (subject_total == 0) throw Error("undefined for inactive subject");

  SpecializationScore s;
  s.subject = row_axis ? m.rows[index] : m.cols[index];
  s.axis = axis;

  std::vector<double> p(k, 0.0);
  for (std::size_t j = 0; j < k; ++j)
    p[j] = static_cast<double>(profile[j]) / static_cast<double>(subject_total);
  s.raw_delta = kl_divergence(p, q);
  s.delta_max = std::log(static_cast<double>(grand) / static_cast<double>(subject_total));
  s.delta_min = delta_min_integer(subject_total, q);

  if (s.delta_max - s.delta_min < kDegenerate) {
    s.normalized = 0.0;
  } else {
    s.normalized = (s.raw_delta - s.delta_min) / (s.delta_max - s.delta_min);
    s.normalized = std::clamp(s.normalized, 0.0, 1.0);
  }
  return s;
}

SocialSpecialization social_specialization(const InteractionMatrix& reply,
                                           const InteractionMatrix& call,
                                           const std::string& developer) {
  const std::string dev = lower_login(developer);
  SocialSpecialization out;

  const auto row_score = [&](const InteractionMatrix& m) -> std::optional<double> {
    const auto idx = m.row_index(dev);
    if (!idx || m.row_total(*idx) == 0) return std::nullopt;
    return specialization(m, Axis::outward_row, *idx).normalized;
  };
  const auto col_score = [&](const InteractionMatrix& m) -> std::optional<double> {
    const auto idx = m.col_index(dev);
    if (!idx || m.col_total(*idx) == 0) return std::nullopt;
    return specialization(m, Axis::inward_column, *idx).normalized;
  };

  out.oss_rho = row_score(reply);
  out.oss_kappa = row_score(call);
  out.iss_kappa = col_score(call);
  out.iss_rho = col_score(reply);
  return out;
}

SocialSpecialization oss_iss(const MentionGraph& graph, const std::string& developer) {
  return social_specialization(interaction_matrix(graph, MentionKind::reply),
                               interaction_matrix(graph, MentionKind::call), developer);
}

InteractionMatrix commit_module_matrix(std::span<const CommitRecord> commits,
                                       const TimeWindow& window, ModuleGranularity granularity) {
  const auto module_of = [&](const std::string& path) -> std::string {
    if (granularity == ModuleGranularity::file) return path;
    const auto slash = path.find('/');
    return slash == std::string::npos ? std::string("(root)") : path.substr(0, slash);
  };

  std::map<std::string, std::map<std::string, std::int64_t>> touches;
  std::set<std::string> modules;
  for (const auto& c : commits) {
    if (!c.author_login || !window.contains(c.author_date)) continue;
    const std::string dev = lower_login(*c.author_login);
    std::set<std::string> touched;
    for (const auto& fc : c.file_changes) touched.insert(module_of(fc.path));
    for (const auto& mod : touched) {
      ++touches[dev][mod];
      modules.insert(mod);
    }
  }

  InteractionMatrix m;
  for (const auto& [dev, _] : touches) m.rows.push_back(dev);
  m.cols.assign(modules.begin(), modules.end());
  m.cells.assign(m.rows.size() * m.cols.size(), 0);
  for (std::size_t r = 0; r < m.rows.size(); ++r)
    for (const auto& [mod, n] : touches[m.rows[r]]) m.at(r, *m.col_index(mod)) = n;
  return m;
}

std::optional<double> daf(const InteractionMatrix& commit_module, const std::string& developer) {
  const auto idx = commit_module.row_index(lower_login(developer));
  if (!idx || commit_module.row_total(*idx) == 0) return std::nullopt;
  return specialization(commit_module, Axis::outward_row, *idx).normalized;
}

ActivityDegrees degree_and_responsiveness(const MentionGraph& graph,
                                          std::span<const ThreadRecord> threads,
                                          const std::string& developer, const TimeWindow& window) {
  const std::string dev = lower_login(developer);
  ActivityDegrees d;

  // Earliest in-window call per thread that targets the developer.
  std::map<std::int64_t, UtcTime> earliest_call;
  for (const auto& e : graph.edges) {
    if (!window.contains(e.timestamp)) continue;
    if (e.mentioner == dev) ++d.social_outdegree;
    if (e.kind == MentionKind::call && e.mentionee == dev) {
      ++d.observed_call_indegree;
      const auto it = earliest_call.find(e.thread);
      if (it == earliest_call.end() || e.timestamp < it->second)
        earliest_call[e.thread] = e.timestamp;
    }
  }

  for (const auto& t : threads) {
    const auto it = earliest_call.find(t.number);
    if (it == earliest_call.end()) continue;
    const UtcTime called_at = it->second;
    for (const auto& e : t.events) {
      if (lower_login(e.author) == dev && called_at < e.timestamp && window.contains(e.timestamp)) {
        ++d.responsiveness;
        break;
      }
    }
  }
  return d;
}

}  // namespace mlab
