// mention-lab: mine @-mention call networks from GitHub discussion data and
// model each developer's future mentions.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlab/error.hpp"
#include "mlab/ingest.hpp"
#include "mlab/mention_graph.hpp"
#include "mlab/pipeline.hpp"

namespace {

using namespace mlab;

TimeWindow window_or_throw(const std::string& spec) {
  const auto w = parse_window(spec);
  if (!w) throw Error("bad --window (expected START..END ISO-8601): " + spec);
  return *w;
}

int run(int argc, char** argv) {
  CLI::App app{"@-mention network mining and future-mention modeling"};
  app.require_subcommand(1);

  std::string config_path;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "acquire one project into the canonical store");
  std::string ingest_slug, ingest_fixtures, ingest_store = "store";
  bool ingest_from_api = false;
  ingest->add_option("--project", ingest_slug, "owner/name")->required();
  ingest->add_option("--fixtures", ingest_fixtures, "fixture directory with jsonl files");
  ingest->add_flag("--from-api", ingest_from_api, "crawl the live GitHub API");
  ingest->add_option("--store", ingest_store, "store directory");
  ingest->add_option("--config", config_path, "config file");

  // graph
  auto* graph = app.add_subcommand("graph", "export the mention multigraph for a window");
  std::string graph_project, graph_window, graph_out = "edges.jsonl", graph_store = "store";
  graph->add_option("--store", graph_store);
  graph->add_option("--project", graph_project)->required();
  graph->add_option("--window", graph_window, "START..END")->required();
  graph->add_option("--out", graph_out);
  graph->add_option("--config", config_path, "config file");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "per-developer focus and degree metrics");
  std::string metrics_project, metrics_window, metrics_out = "metrics.csv",
              metrics_store = "store";
  metrics->add_option("--store", metrics_store);
  metrics->add_option("--project", metrics_project)->required();
  metrics->add_option("--window", metrics_window, "START..END")->required();
  metrics->add_option("--out", metrics_out);
  metrics->add_option("--config", config_path, "config file");

  // szz
  auto* szz = app.add_subcommand("szz", "fix links and buggy-commit attributions");
  std::string szz_project, szz_out = "attributions.jsonl", szz_store = "store";
  szz->add_option("--store", szz_store);
  szz->add_option("--project", szz_project)->required();
  szz->add_option("--out", szz_out);
  szz->add_option("--config", config_path, "config file");

  // features
  auto* features = app.add_subcommand("features", "assemble the person-project feature table");
  std::string features_store = "store", features_out = "features.csv";
  int features_response_months = 6;
  std::vector<std::string> features_projects;
  features->add_option("--store", features_store);
  features->add_option("--response-months", features_response_months)
      ->check(CLI::IsMember({3, 6, 12}));
  features->add_option("--projects", features_projects, "owner/name (repeatable; default: all)");
  features->add_option("--out", features_out);
  features->add_option("--config", config_path, "config file");

  // fit
  auto* fit = app.add_subcommand("fit", "fit the future-mention model");
  std::string fit_features_path = "features.csv", fit_out = "fit.json", fit_model = "hurdle";
  fit->add_option("--features", fit_features_path);
  fit->add_option("--model", fit_model)->check(CLI::IsMember({"hurdle"}));
  fit->add_option("--out", fit_out);
  fit->add_option("--config", config_path, "config file");

  // xeval
  auto* xeval = app.add_subcommand("xeval", "cross-project prediction matrices and heatmaps");
  std::string xeval_features = "features.csv", xeval_out_dir = "xeval";
  int xeval_min_rows = 30;
  xeval->add_option("--features", xeval_features);
  xeval->add_option("--out-dir", xeval_out_dir);
  xeval->add_option("--min-rows", xeval_min_rows);
  xeval->add_option("--config", config_path, "config file");

  // report
  auto* report = app.add_subcommand("report", "run the full pipeline and write report.md");
  std::string report_store, report_out_dir;
  std::vector<std::string> report_projects;
  report->add_option("--config", config_path, "config file");
  report->add_option("--store", report_store, "override store directory");
  report->add_option("--out-dir", report_out_dir, "override output directory");
  report->add_option("--projects", report_projects, "owner/name (repeatable)");

  // predict
  auto* predict = app.add_subcommand("predict", "apply a stored fit to one covariate row");
  std::string predict_fit = "fit.json", predict_row_json, predict_features_path, predict_dev,
      predict_project;
  predict->add_option("--fit", predict_fit);
  predict->add_option("--row-json", predict_row_json, "JSON object {column: value}");
  predict->add_option("--features", predict_features_path, "features.csv to pull the row from");
  predict->add_option("--developer", predict_dev);
  predict->add_option("--project", predict_project);
  predict->add_option("--config", config_path, "config file");

  CLI11_PARSE(app, argc, argv);

  PipelineConfig config;
  if (!config_path.empty()) config = PipelineConfig::load(config_path);

  if (ingest->parsed()) {
    if (ingest_from_api && !ingest_fixtures.empty())
      throw Error("--from-api and --fixtures are mutually exclusive");
    if (!ingest_from_api && ingest_fixtures.empty())
      throw Error("one of --from-api or --fixtures is required");
    IngestOptions opts;
    opts.source = ingest_from_api ? IngestSource::api : IngestSource::fixtures;
    opts.fixtures_dir = ingest_fixtures;
    const StoreManifest m = ingest_project(opts, ProjectId::parse(ingest_slug), ingest_store);
    std::cout << "ingested " << m.project.slug() << ": threads=" << m.counts.at("threads")
              << " commits=" << m.counts.at("commits")
              << " developers=" << m.counts.at("developers") << " digest=" << m.digest
              << (m.complete ? "" : " (INCOMPLETE)") << "\n";
    return m.complete ? 0 : 1;
  }

  if (graph->parsed()) {
    const ProjectStore store = ProjectStore::open(graph_store, ProjectId::parse(graph_project));
    const MentionGraph g = build_graph(store, window_or_throw(graph_window));
    write_edges_jsonl(graph_out, g);
    std::cout << "wrote " << g.edges.size() << " edges to " << graph_out << "\n";
    return 0;
  }

  if (metrics->parsed()) {
    const ProjectStore store =
        ProjectStore::open(metrics_store, ProjectId::parse(metrics_project));
    write_metrics_csv(metrics_out, store, window_or_throw(metrics_window),
                      config.assemble_options());
    std::cout << "wrote " << metrics_out << "\n";
    return 0;
  }

  if (szz->parsed()) {
    const ProjectStore store = ProjectStore::open(szz_store, ProjectId::parse(szz_project));
    const AttributionResult r = attribute_all(store, config.assemble_options().szz);
    write_attributions_jsonl(szz_out, r);
    std::cout << "wrote " << r.attributions.size() << " attributions to " << szz_out;
    if (r.unresolved_lines > 0) std::cout << " (" << r.unresolved_lines << " unresolved lines)";
    std::cout << "\n";
    return 0;
  }

  if (features->parsed()) {
    std::vector<ProjectId> projects;
    for (const auto& slug : features_projects) projects.push_back(ProjectId::parse(slug));
    if (projects.empty()) projects = ProjectStore::list_projects(features_store);
    std::vector<FeatureRow> rows;
    for (const auto& p : projects) {
      const ProjectStore store = ProjectStore::open(features_store, p);
      const ValidationReport v = validate_store(store);
      if (!v.complete) {
        std::cerr << "skipping incomplete project " << p.slug() << "\n";
        continue;
      }
      try {
        const TimeSplit split = make_split(store, features_response_months);
        auto project_rows = assemble(store, split, config.assemble_options());
        std::move(project_rows.begin(), project_rows.end(), std::back_inserter(rows));
      } catch (const Error& e) {
        std::cerr << "skipping " << p.slug() << ": " << e.what() << "\n";
      }
    }
    write_features_csv(features_out, rows);
    std::cout << "wrote " << rows.size() << " rows to " << features_out << "\n";
    return 0;
  }

  if (fit->parsed()) {
    const std::vector<FeatureRow> rows = read_features_csv(fit_features_path);
    const FitArtifact artifact = fit_feature_table(rows, config);
    write_fit_json(fit_out, artifact);
    std::cout << "wrote " << fit_out << " (AIC " << artifact.hurdle.aic() << ", in-sample MAE "
              << artifact.in_sample_mae << ")\n";
    return 0;
  }

  if (xeval->parsed()) {
    const std::vector<FeatureRow> rows = read_features_csv(xeval_features);
    XevalOptions opts;
    opts.min_rows = xeval_min_rows;
    std::vector<XevalExclusion> excluded;
    const std::vector<ProjectModelPair> pairs = fit_project_models(rows, opts, &excluded);
    for (const auto& e : excluded)
      std::cerr << "excluded " << e.project.slug() << ": " << e.reason << "\n";
    if (pairs.size() < 2) throw Error("xeval needs at least two modeled projects");
    const std::filesystem::path dir = xeval_out_dir;
    std::filesystem::create_directories(dir);
    auto [mae, auc] = cross_predict(pairs);
    export_heatmap(mae, mae.dendrogram_order, dir / "count_mae.csv", dir / "count_mae.svg");
    export_heatmap(auc, auc.dendrogram_order, dir / "zero_auc.csv", dir / "zero_auc.svg");
    export_coefficient_heatmap(pairs, true, dir / "coefficients_count.csv",
                               dir / "coefficients_count.svg");
    export_coefficient_heatmap(pairs, false, dir / "coefficients_zero.csv",
                               dir / "coefficients_zero.svg");
    std::cout << "wrote cross-project matrices for " << pairs.size() << " projects to "
              << dir.string() << "\n";
    return 0;
  }

  if (report->parsed()) {
    if (!report_store.empty()) config.store_dir = report_store;
    if (!report_out_dir.empty()) config.out_dir = report_out_dir;
    for (const auto& slug : report_projects) config.projects.push_back(ProjectId::parse(slug));
    const ReportBundle bundle = run_pipeline(config);
    std::cout << "report: " << bundle.report_path.string()
              << "\nartifacts: " << bundle.artifacts.size()
              << "\nbundle digest: " << bundle.digest << "\n";
    return 0;
  }

  if (predict->parsed()) {
    std::map<std::string, double> row;
    if (!predict_row_json.empty()) {
      const auto j = nlohmann::json::parse(predict_row_json);
      for (const auto& [k, v] : j.items()) row[k] = v.get<double>();
    } else if (!predict_features_path.empty()) {
      if (predict_dev.empty() || predict_project.empty())
        throw Error("--features needs --developer and --project to select the row");
      const auto rows = read_features_csv(predict_features_path);
      const ProjectId project = ProjectId::parse(predict_project);
      const std::string dev = lower_login(predict_dev);
      bool found = false;
      for (const auto& r : rows)
        if (r.project == project && r.developer == dev) {
          for (const auto& c : default_zero_columns()) row[c] = feature_value(r, c);
          for (const auto& c : default_count_columns()) row[c] = feature_value(r, c);
          found = true;
          break;
        }
      if (!found) throw Error("no feature row for " + dev + " in " + project.slug());
    } else {
      throw Error("predict needs --row-json or --features with --developer/--project");
    }
    const Prediction p = predict_developer(predict_fit, row);
    nlohmann::json out{{"p_first_mention", p.p_first_mention},
                       {"expected_count", p.expected_count},
                       {"expected_mentions", p.expected_mentions}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const RetriableError& e) {
    std::cerr << "error (retriable): " << e.what();
    if (e.retry_after_secs) std::cerr << " [retry after " << *e.retry_after_secs << "s]";
    std::cerr << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
