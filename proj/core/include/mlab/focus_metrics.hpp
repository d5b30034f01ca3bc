#ifndef MLAB_FOCUS_METRICS_HPP
#define MLAB_FOCUS_METRICS_HPP

#include <optional>
#include <span>
#include <string>

#include "mlab/mention_graph.hpp"

namespace mlab {

// Sum_i p_i * ln(p_i / q_i) in nats, with 0*ln(0/q) == 0. Both vectors must
// sum to 1 within 1e-9 and q must dominate p's support.
double kl_divergence(std::span<const double> p, std::span<const double> q);

enum class Axis { outward_row, inward_column };

struct SpecializationScore {
  std::string subject;
  Axis axis = Axis::outward_row;
  double raw_delta = 0.0;   // nats
  double normalized = 0.0;  // in [0,1]
  double delta_min = 0.0;
  double delta_max = 0.0;
};

// Blüthgen-style specialization of one row (or column, on the transpose)
// against the opposite marginals, normalized to [0,1] by the analytic
// maximum ln(m/A) and a greedy integer-allocation minimum. Throws when the
// subject's total is zero ("undefined for inactive subject").
SpecializationScore specialization(const InteractionMatrix& m, Axis axis, std::size_t index);

struct SocialSpecialization {
  std::optional<double> oss_rho;    // row focus in the reply matrix
  std::optional<double> oss_kappa;  // row focus in the call matrix
  std::optional<double> iss_kappa;  // column focus in the call matrix
  std::optional<double> iss_rho;    // column focus in the reply matrix
};

SocialSpecialization oss_iss(const MentionGraph& graph, const std::string& developer);

// Batch form over pre-built matrices; avoids rebuilding them per developer.
SocialSpecialization social_specialization(const InteractionMatrix& reply,
                                           const InteractionMatrix& call,
                                           const std::string& developer);

enum class ModuleGranularity { top_dir, file };

// Rows: developers with commits in the window. Cols: touched modules.
// A commit touching a module through any number of files counts once.
InteractionMatrix commit_module_matrix(std::span<const CommitRecord> commits,
                                       const TimeWindow& window, ModuleGranularity granularity);

std::optional<double> daf(const InteractionMatrix& commit_module, const std::string& developer);

struct ActivityDegrees {
  std::int64_t social_outdegree = 0;        // reply + call out-edges
  std::int64_t observed_call_indegree = 0;  // call in-edges
  std::int64_t responsiveness = 0;          // distinct threads answered after a call
};

ActivityDegrees degree_and_responsiveness(const MentionGraph& graph,
                                          std::span<const ThreadRecord> threads,
                                          const std::string& developer, const TimeWindow& window);

}  // namespace mlab

#endif  // MLAB_FOCUS_METRICS_HPP
