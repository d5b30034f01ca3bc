#include "mlab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mlab/error.hpp"
#include "mlab/mention_graph.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(std::string("stage ") + name + ": " + e.what());
  }
}

std::string significance_marker(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.1) return "\xe2\x80\xa0";  // dagger
  return "";
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

json fit_to_json(const FitResult& f) {
  json coefficients = json::object(), std_errors = json::object(), p_values = json::object(),
       p_adjusted = json::object(), scaling = json::object();
  for (std::size_t j = 0; j < f.columns.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    coefficients[f.columns[j]] = f.coefficients[idx];
    std_errors[f.columns[j]] = f.std_errors[idx];
    p_values[f.columns[j]] = f.p_values[idx];
    p_adjusted[f.columns[j]] = f.p_adjusted[idx];
    scaling[f.columns[j]] = {{"center", f.center[idx]}, {"scale", f.scale[idx]}};
  }
  json out{{"family", std::string(to_string(f.family))},
           {"optimizer",
            {{"method", "newton_raphson_step_halving"},
             {"gradient_tolerance", 1e-8},
             {"max_iterations", 100},
             {"lambda_clamp", {1e-10, 1e10}}}},
           {"columns", f.columns},
           {"coefficients", std::move(coefficients)},
           {"std_errors", std::move(std_errors)},
           {"p_values", std::move(p_values)},
           {"p_adjusted", std::move(p_adjusted)},
           {"log_likelihood", f.log_likelihood},
           {"aic", f.aic},
           {"converged", f.converged},
           {"iterations", f.iterations},
           {"scaling", std::move(scaling)}};
  if (f.theta) out["theta"] = *f.theta;
  return out;
}

DesignMatrix design_from_rows(std::span<const FeatureRow> rows,
                              const std::vector<std::string>& covariates) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(covariates.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = static_cast<double>(rows[i].future_mentions);
    for (std::size_t j = 0; j < covariates.size(); ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          feature_value(rows[i], covariates[j]);
  }
  return DesignMatrix::create(covariates, X, y);
}

std::vector<std::string> union_columns(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  for (const auto& c : b)
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  return out;
}

std::vector<std::string> intersect_keep(const std::vector<std::string>& cols,
                                        const std::vector<std::string>& kept) {
  std::vector<std::string> out;
  for (const auto& c : cols)
    if (std::find(kept.begin(), kept.end(), c) != kept.end()) out.push_back(c);
  return out;
}

void render_component_table(std::ostringstream& md, const FitResult& fit, const char* caption) {
  md << "**" << caption << "**\n\n";
  md << "| covariate | coefficient | std. error | p (BH-adjusted) | |\n";
  md << "|---|---|---|---|---|\n";
  for (std::size_t j = 0; j < fit.columns.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    md << "| " << fit.columns[j] << " | " << fmt3(fit.coefficients[idx]) << " | ("
       << fmt3(fit.std_errors[idx]) << ") | " << fmt3(fit.p_adjusted[idx]) << " | "
       << significance_marker(fit.p_adjusted[idx]) << " |\n";
  }
  md << "\n";
}

}  // namespace

FitArtifact fit_feature_table(std::span<const FeatureRow> rows, const PipelineConfig& config) {
  if (rows.size() < 25)
    throw Error("too few feature rows to fit (" + std::to_string(rows.size()) + ")");
  const std::vector<std::string> all_cols =
      union_columns(config.effective_zero_columns(), config.effective_count_columns());
  const DesignMatrix design = design_from_rows(rows, all_cols);

  FitArtifact artifact;
  artifact.vif = vif_screen(design, config.effective_protected_columns());
  const std::vector<std::string> zero_cols =
      intersect_keep(config.effective_zero_columns(), artifact.vif.kept);
  std::vector<std::string> count_cols =
      intersect_keep(config.effective_count_columns(), artifact.vif.kept);

  // A count-model column constant across the positive-response rows cannot
  // be estimated by the truncated stage; exclude it and record the fact.
  {
    std::vector<std::string> usable;
    for (const auto& c : count_cols) {
      double first = 0.0;
      bool seen = false, varies = false;
      for (const auto& r : rows) {
        if (r.future_mentions <= 0) continue;
        const double v = feature_value(r, c);
        if (!seen) {
          first = v;
          seen = true;
        } else if (v != first) {
          varies = true;
          break;
        }
      }
      if (varies)
        usable.push_back(c);
      else
        artifact.degenerate_count_columns.push_back(c);
    }
    count_cols = std::move(usable);
  }

  artifact.hurdle = fit_hurdle(design, zero_cols, count_cols);
  artifact.selection = model_selection(design, zero_cols, count_cols);
  artifact.n_rows = static_cast<std::int64_t>(rows.size());

  double abs_sum = 0.0, sq_sum = 0.0;
  for (const auto& r : rows) {
    std::map<std::string, double> values;
    for (const auto& c : all_cols) values[c] = feature_value(r, c);
    const HurdlePrediction p = hurdle_predict(artifact.hurdle, values);
    const double err = static_cast<double>(r.future_mentions) - p.expected;
    abs_sum += std::abs(err);
    sq_sum += err * err;
  }
  artifact.in_sample_mae = abs_sum / static_cast<double>(rows.size());
  artifact.in_sample_mse = sq_sum / static_cast<double>(rows.size());
  return artifact;
}

void write_fit_json(const fs::path& path, const FitArtifact& artifact) {
  json selection{{"preferred", artifact.selection.preferred}};
  selection["entries"] = json::array();
  for (const auto& e : artifact.selection.entries)
    selection["entries"].push_back({{"name", e.name},
                                    {"log_likelihood", e.log_likelihood},
                                    {"aic", e.aic},
                                    {"parameters", e.parameters}});
  selection["vuong"] = json::array();
  for (const auto& v : artifact.selection.vuong) {
    json vj{{"model_a", v.model_a}, {"model_b", v.model_b}};
    if (v.statistic) {
      vj["statistic"] = *v.statistic;
      vj["p_value"] = *v.p_value;
    } else {
      vj["statistic"] = nullptr;
      vj["p_value"] = nullptr;
    }
    selection["vuong"].push_back(std::move(vj));
  }

  json vif{{"kept", artifact.vif.kept}};
  json table = json::object(), dropped = json::object();
  for (const auto& e : artifact.vif.final_table)
    table[e.column] = std::isfinite(e.vif) ? json(e.vif) : json("inf");
  for (const auto& e : artifact.vif.dropped)
    dropped[e.column] = std::isfinite(e.vif) ? json(e.vif) : json("inf");
  vif["table"] = std::move(table);
  vif["dropped"] = std::move(dropped);
  vif["degenerate_count_columns"] = artifact.degenerate_count_columns;

  const json out{{"model", "hurdle"},
                 {"n_rows", artifact.n_rows},
                 {"zero", fit_to_json(artifact.hurdle.zero)},
                 {"count", fit_to_json(artifact.hurdle.count)},
                 {"total_log_likelihood", artifact.hurdle.total_log_likelihood()},
                 {"aic", artifact.hurdle.aic()},
                 {"in_sample", {{"mae", artifact.in_sample_mae}, {"mse", artifact.in_sample_mse}}},
                 {"selection", std::move(selection)},
                 {"vif", std::move(vif)}};
  write_file(path, out.dump(2) + "\n");
}

Prediction predict_developer(const fs::path& fit_json, const std::map<std::string, double>& row) {
  const json j = json::parse(read_file(fit_json));
  if (j.value("model", "") != "hurdle") throw Error("fit file is not a hurdle fit: " + fit_json.string());

  const auto component_eta = [&](const json& comp) {
    std::vector<std::string> missing;
    double eta = 0.0;
    for (const auto& col : comp["columns"]) {
      const std::string name = col.get<std::string>();
      const double beta = comp["coefficients"][name].get<double>();
      if (name == "intercept") {
        eta += beta;
        continue;
      }
      const auto it = row.find(name);
      if (it == row.end()) {
        missing.push_back(name);
        continue;
      }
      eta += beta * it->second;
    }
    if (!missing.empty()) {
      std::string msg = "prediction row is missing columns:";
      for (const auto& m : missing) msg += " " + m;
      throw Error(msg);
    }
    return eta;
  };

  Prediction p;
  p.p_first_mention = family_mean(Family::logistic, component_eta(j["zero"]));
  p.expected_count = family_mean(Family::trunc_poisson, component_eta(j["count"]));
  p.expected_mentions = p.p_first_mention * p.expected_count;
  return p;
}

void write_metrics_csv(const fs::path& path, const ProjectStore& store, const TimeWindow& window,
                       const AssembleOptions& options) {
  MentionGraph graph = build_graph(store, window);
  const InteractionMatrix reply_m = interaction_matrix(graph, MentionKind::reply);
  const InteractionMatrix call_m = interaction_matrix(graph, MentionKind::call);
  const InteractionMatrix modules =
      commit_module_matrix(store.commits(), window, options.daf_granularity);
  const auto buggy = buggy_commit_counts(store, window, options.szz);
  const auto fixing = fixing_commit_counts(store, window);

  // Everyone visible in the window: mention participants or committers.
  std::set<std::string> devs;
  for (const auto& e : graph.edges) {
    devs.insert(e.mentioner);
    devs.insert(e.mentionee);
  }
  for (const auto& c : store.commits())
    if (c.author_login && window.contains(c.author_date)) devs.insert(lower_login(*c.author_login));

  std::string csv =
      "developer,oss_rho,oss_kappa,iss_rho,iss_kappa,daf,social_outdegree,"
      "observed_call_indegree,responsiveness,fixing_commits,buggy_commits\n";
  for (const auto& dev : devs) {
    const SocialSpecialization social = social_specialization(reply_m, call_m, dev);
    const auto d = daf(modules, dev);
    const ActivityDegrees degrees = degree_and_responsiveness(graph, store.threads(), dev, window);
    const auto count_of = [&](const std::map<std::string, std::int64_t>& m) -> std::int64_t {
      const auto it = m.find(dev);
      return it == m.end() ? 0 : it->second;
    };
    csv += dev + ',' + opt_cell(social.oss_rho) + ',' + opt_cell(social.oss_kappa) + ',' +
           opt_cell(social.iss_rho) + ',' + opt_cell(social.iss_kappa) + ',' + opt_cell(d) + ',' +
           std::to_string(degrees.social_outdegree) + ',' +
           std::to_string(degrees.observed_call_indegree) + ',' +
           std::to_string(degrees.responsiveness) + ',' + std::to_string(count_of(fixing)) + ',' +
           std::to_string(count_of(buggy)) + '\n';
  }
  write_file(path, csv);
}

ReportBundle run_pipeline(const PipelineConfig& config) {
  const fs::path out = config.out_dir;
  fs::create_directories(out);

  std::vector<ProjectId> projects = config.projects;
  if (projects.empty()) projects = ProjectStore::list_projects(config.store_dir);
  if (projects.empty()) throw Error("stage ingest: no projects in store " + config.store_dir.string());

  const AssembleOptions assemble_opts = config.assemble_options();

  // Load and validate stores; incomplete projects are excluded up front.
  std::vector<ProjectStore> stores;
  std::vector<std::string> excluded_projects;
  stage("validate", [&] {
    for (const auto& p : projects) {
      ProjectStore store = ProjectStore::open(config.store_dir, p);
      const ValidationReport v = validate_store(store);
      if (!v.complete) {
        std::string why = p.slug() + " (";
        for (std::size_t i = 0; i < v.reasons.size(); ++i)
          why += (i ? "; " : "") + v.reasons[i];
        excluded_projects.push_back(why + ")");
        continue;
      }
      stores.push_back(std::move(store));
    }
    if (stores.empty()) throw Error("every project failed validation");
    return 0;
  });

  std::vector<fs::path> artifacts;
  const auto artifact = [&](const fs::path& rel) {
    artifacts.push_back(rel);
    return out / rel;
  };

  // Per-project splits, graphs, metrics, szz output, features.
  std::vector<TimeSplit> splits;
  std::vector<const ProjectStore*> included;
  std::vector<std::string> split_excluded;
  stage("features", [&] {
    for (const auto& store : stores) {
      try {
        splits.push_back(make_split(store, config.response_months));
        included.push_back(&store);
      } catch (const Error& e) {
        split_excluded.push_back(e.what());
      }
    }
    if (included.empty()) throw Error("no project has enough history");
    return 0;
  });

  stage("graph", [&] {
    fs::create_directories(out / "graph");
    for (std::size_t i = 0; i < included.size(); ++i) {
      const MentionGraph g = build_graph(*included[i], splits[i].observation());
      write_edges_jsonl(artifact(fs::path("graph") / (included[i]->project().dir_name() + ".edges.jsonl")), g);
    }
    return 0;
  });

  stage("metrics", [&] {
    fs::create_directories(out / "metrics");
    for (std::size_t i = 0; i < included.size(); ++i)
      write_metrics_csv(
          artifact(fs::path("metrics") / (included[i]->project().dir_name() + ".csv")),
          *included[i], splits[i].observation(), assemble_opts);
    return 0;
  });

  stage("szz", [&] {
    fs::create_directories(out / "szz");
    for (std::size_t i = 0; i < included.size(); ++i) {
      const AttributionResult r = attribute_all(*included[i], assemble_opts.szz);
      write_attributions_jsonl(
          artifact(fs::path("szz") / (included[i]->project().dir_name() + ".attributions.jsonl")),
          r);
    }
    return 0;
  });

  std::vector<FeatureRow> rows;
  stage("features", [&] {
    for (std::size_t i = 0; i < included.size(); ++i) {
      auto project_rows = assemble(*included[i], splits[i], assemble_opts);
      std::move(project_rows.begin(), project_rows.end(), std::back_inserter(rows));
    }
    write_features_csv(artifact("features.csv"), rows);
    return 0;
  });

  // Fit: VIF screen over the union of both column sets, then the hurdle.
  FitArtifact fit_artifact;
  stage("fit", [&] {
    fit_artifact = fit_feature_table(rows, config);
    write_fit_json(artifact("fit.json"), fit_artifact);
    return 0;
  });

  // Cross-project evaluation (needs at least two modeled projects).
  std::vector<XevalExclusion> xeval_excluded;
  std::vector<ProjectModelPair> pairs;
  std::optional<CrossMatrix> mae_matrix, auc_matrix;
  stage("xeval", [&] {
    XevalOptions opts;
    opts.min_rows = config.min_rows_per_project;
    pairs = fit_project_models(rows, opts, &xeval_excluded);
    if (pairs.size() >= 2) {
      auto [mae, auc] = cross_predict(pairs);
      export_heatmap(mae, mae.dendrogram_order, artifact("count_mae.csv"),
                     artifact("count_mae.svg"));
      export_heatmap(auc, auc.dendrogram_order, artifact("zero_auc.csv"),
                     artifact("zero_auc.svg"));
      export_coefficient_heatmap(pairs, true, artifact("coefficients_count.csv"),
                                 artifact("coefficients_count.svg"));
      export_coefficient_heatmap(pairs, false, artifact("coefficients_zero.csv"),
                                 artifact("coefficients_zero.svg"));
      mae_matrix = std::move(mae);
      auc_matrix = std::move(auc);
    }
    return 0;
  });

  // Human-readable report.
  ReportBundle bundle;
  stage("report", [&] {
    std::ostringstream md;
    md << "# mention-lab analysis report\n\n";

    md << "## Resolved configuration\n\n```\n" << config.serialize() << "```\n\n";

    md << "## Stores\n\n| project | threads | commits | developers | complete |\n|---|---|---|---|---|\n";
    for (const auto* store : included) {
      const auto& m = store->manifest();
      md << "| " << m.project.slug() << " | " << m.counts.at("threads") << " | "
         << m.counts.at("commits") << " | " << m.counts.at("developers") << " | yes |\n";
    }
    md << "\n";
    if (!excluded_projects.empty() || !split_excluded.empty()) {
      md << "Excluded projects:\n\n";
      for (const auto& e : excluded_projects) md << "- " << e << "\n";
      for (const auto& e : split_excluded) md << "- " << e << "\n";
      md << "\n";
    }

    const SummaryReport stats = population_stats(included);
    md << "## Population statistics\n\n";
    md << "- issues: " << stats.issues << " (" << stats.issues_with_mention
       << " with at least one mention";
    if (const auto f = stats.frac_issues_with_mention()) md << ", fraction " << fmt3(*f);
    md << ")\n";
    md << "- pull requests: " << stats.prs << " (" << stats.prs_with_mention
       << " with at least one mention";
    if (const auto f = stats.frac_prs_with_mention()) md << ", fraction " << fmt3(*f);
    md << ")\n";
    if (const auto m = stats.mean_mentions_per_issue())
      md << "- mean mentions per issue: " << fmt3(*m) << "\n";
    if (const auto m = stats.mean_mentions_per_pr())
      md << "- mean mentions per pull request: " << fmt3(*m) << "\n";
    md << "- call instances (thread, callee): " << stats.call_instances << ", answered "
       << stats.responded_instances;
    if (const auto r = stats.response_rate()) md << " (rate " << fmt3(*r) << ")";
    md << "\n";
    if (const auto r = stats.response_rate_excluding_never())
      md << "- response rate excluding never-responders: " << fmt3(*r) << "\n";
    else
      md << "- response rate excluding never-responders: undefined\n";
    md << "- feature rows: " << rows.size() << "\n\n";

    md << "## Collinearity screen\n\n";
    md << "VIF threshold 4; control columns are never dropped.\n\n";
    md << "| column | VIF |\n|---|---|\n";
    for (const auto& e : fit_artifact.vif.final_table)
      md << "| " << e.column << " | " << (std::isfinite(e.vif) ? fmt3(e.vif) : "inf") << " |\n";
    if (!fit_artifact.vif.dropped.empty()) {
      md << "\nDropped:\n\n";
      for (const auto& e : fit_artifact.vif.dropped)
        md << "- " << e.column << " (VIF " << (std::isfinite(e.vif) ? fmt3(e.vif) : "inf")
           << ")\n";
    }
    if (!fit_artifact.degenerate_count_columns.empty()) {
      md << "\nExcluded from the count model (no variation among positive rows):\n\n";
      for (const auto& c : fit_artifact.degenerate_count_columns) md << "- " << c << "\n";
    }
    md << "\n";

    md << "## Future-mention hurdle model\n\n";
    render_component_table(md, fit_artifact.hurdle.count, "Count component (truncated Poisson)");
    render_component_table(md, fit_artifact.hurdle.zero, "Zero component (logistic)");
    md << "Significance: \xe2\x80\xa0 p<0.1, * p<0.05, ** p<0.01, *** p<0.001 (BH-adjusted)\n\n";
    md << "- total log-likelihood: " << fmt3(fit_artifact.hurdle.total_log_likelihood()) << "\n";
    md << "- AIC: " << fmt3(fit_artifact.hurdle.aic()) << "\n";
    md << "- in-sample MAE: " << fmt3(fit_artifact.in_sample_mae) << "\n";
    md << "- in-sample MSE: " << fmt3(fit_artifact.in_sample_mse) << "\n\n";

    md << "## Model selection\n\n| model | logLik | AIC | parameters |\n|---|---|---|---|\n";
    for (const auto& e : fit_artifact.selection.entries)
      md << "| " << e.name << " | " << fmt3(e.log_likelihood) << " | " << fmt3(e.aic) << " | "
         << e.parameters << " |\n";
    md << "\nPreferred by AIC: **" << fit_artifact.selection.preferred << "**\n\n";
    md << "| Vuong comparison | statistic | p |\n|---|---|---|\n";
    for (const auto& v : fit_artifact.selection.vuong) {
      md << "| " << v.model_a << " vs " << v.model_b << " | ";
      if (v.statistic)
        md << fmt3(*v.statistic) << " | " << fmt3(*v.p_value) << " |\n";
      else
        md << "undefined | undefined |\n";
    }
    md << "\n";

    md << "## Cross-project evaluation\n\n";
    if (mae_matrix) {
      md << "- projects modeled: " << pairs.size() << "\n";
      const auto offdiag_mean = [](const CrossMatrix& m) -> std::optional<double> {
        double sum = 0.0;
        int cnt = 0;
        for (Eigen::Index i = 0; i < m.values.rows(); ++i)
          for (Eigen::Index j = 0; j < m.values.cols(); ++j)
            if (i != j && std::isfinite(m.values(i, j))) {
              sum += m.values(i, j);
              ++cnt;
            }
        if (cnt == 0) return std::nullopt;
        return sum / cnt;
      };
      if (const auto v = offdiag_mean(*mae_matrix))
        md << "- mean off-diagonal count MAE: " << fmt3(*v) << "\n";
      if (const auto v = offdiag_mean(*auc_matrix))
        md << "- mean off-diagonal zero AUC: " << fmt3(*v) << "\n";
      md << "- heatmaps: count_mae.csv/.svg, zero_auc.csv/.svg, coefficients_count.csv/.svg, "
            "coefficients_zero.csv/.svg\n";
    } else {
      md << "Skipped: fewer than two projects produced usable per-project models.\n";
    }
    if (!xeval_excluded.empty()) {
      md << "\nExcluded from per-project modeling:\n\n";
      for (const auto& e : xeval_excluded)
        md << "- " << e.project.slug() << ": " << e.reason << "\n";
    }
    md << "\n";

    write_file(artifact("report.md"), md.str());
    return 0;
  });

  std::sort(artifacts.begin(), artifacts.end());
  Fnv1a64 digest;
  for (const auto& rel : artifacts) {
    digest.update(rel.string());
    digest.update("\x1f");
    digest.update(read_file(out / rel));
    digest.update("\n");
  }
  bundle.report_path = out / "report.md";
  bundle.artifacts = artifacts;
  bundle.digest = digest.hex();
  return bundle;
}

}  // namespace mlab
