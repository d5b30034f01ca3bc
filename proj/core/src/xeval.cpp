#include "mlab/xeval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd covariate_block(std::span<const FeatureRow* const> rows,
                                const std::vector<std::string>& cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          feature_value(*rows[i], cols[j]);
  return m;
}

double mean_absolute_error(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  return (y - yhat).cwiseAbs().mean();
}

Eigen::VectorXd count_predictions(const ProjectModelPair& model, const Eigen::MatrixXd& X) {
  const Eigen::VectorXd eta = X * model.count.coefficients;
  Eigen::VectorXd out(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    out[i] = family_mean(Family::trunc_poisson, eta[i]);
  return out;
}

bool has_both_classes(const Eigen::VectorXd& labels) {
  bool any0 = false, any1 = false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) (labels[i] > 0.5 ? any1 : any0) = true;
  return any0 && any1;
}

double directed_auc(const ProjectModelPair& model, const ProjectModelPair& data) {
  const Eigen::VectorXd eta = data.zero_X * model.zero.coefficients;
  std::vector<double> scores(eta.data(), eta.data() + eta.size());
  std::vector<double> labels(data.zero_y.data(), data.zero_y.data() + data.zero_y.size());
  return auc_score(labels, scores);
}

// ---- average-linkage agglomeration ----

struct ClusterNode {
  int left = -1;
  int right = -1;
  double height = 0.0;
  std::vector<int> leaves;  // ordered
  std::string min_name;
  int size = 0;
};

struct Linkage {
  std::vector<ClusterNode> nodes;  // first n entries are leaves
  int root = -1;
  std::vector<int> order;  // leaf permutation
};

Linkage average_linkage(const Eigen::MatrixXd& dist, const std::vector<std::string>& names) {
  const int n = static_cast<int>(names.size());
  Linkage lk;
  for (int i = 0; i < n; ++i) {
    ClusterNode leaf;
    leaf.leaves = {i};
    leaf.min_name = names[static_cast<std::size_t>(i)];
    leaf.size = 1;
    lk.nodes.push_back(std::move(leaf));
  }
  if (n == 0) return lk;
  if (n == 1) {
    lk.root = 0;
    lk.order = {0};
    return lk;
  }

  std::vector<int> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);
  std::map<std::pair<int, int>, double> d;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d[{i, j}] = dist(i, j);
  const auto dget = [&](int a, int b) { return d.at({std::min(a, b), std::max(a, b)}); };

  while (active.size() > 1) {
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::string, std::string> best_names;
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const int a = active[i], b = active[j];
        const double v = dget(a, b);
        const std::string& na = lk.nodes[static_cast<std::size_t>(a)].min_name;
        const std::string& nb = lk.nodes[static_cast<std::size_t>(b)].min_name;
        std::pair<std::string, std::string> name_pair =
            na <= nb ? std::make_pair(na, nb) : std::make_pair(nb, na);
        if (v < best || (v == best && name_pair < best_names)) {
          best = v;
          best_a = a;
          best_b = b;
          best_names = name_pair;
        }
      }

    const int size_a = lk.nodes[static_cast<std::size_t>(best_a)].size;
    const int size_b = lk.nodes[static_cast<std::size_t>(best_b)].size;
    const std::string name_a = lk.nodes[static_cast<std::size_t>(best_a)].min_name;
    const std::string name_b = lk.nodes[static_cast<std::size_t>(best_b)].min_name;

    ClusterNode merged;
    // The child whose smallest member name sorts first goes on the left.
    const bool a_first = name_a <= name_b;
    merged.left = a_first ? best_a : best_b;
    merged.right = a_first ? best_b : best_a;
    merged.height = best;
    const ClusterNode& l = lk.nodes[static_cast<std::size_t>(merged.left)];
    const ClusterNode& r = lk.nodes[static_cast<std::size_t>(merged.right)];
    merged.leaves = l.leaves;
    merged.leaves.insert(merged.leaves.end(), r.leaves.begin(), r.leaves.end());
    merged.min_name = std::min(name_a, name_b);
    merged.size = size_a + size_b;
    const int merged_id = static_cast<int>(lk.nodes.size());

    for (const int x : active) {
      if (x == best_a || x == best_b) continue;
      const double dv = (size_a * dget(best_a, x) + size_b * dget(best_b, x)) /
                        static_cast<double>(size_a + size_b);
      d[{std::min(x, merged_id), std::max(x, merged_id)}] = dv;
    }
    lk.nodes.push_back(std::move(merged));
    active.erase(std::remove(active.begin(), active.end(), best_a), active.end());
    active.erase(std::remove(active.begin(), active.end(), best_b), active.end());
    active.push_back(merged_id);
  }
  lk.root = active.front();
  lk.order = lk.nodes[static_cast<std::size_t>(lk.root)].leaves;
  return lk;
}

Eigen::MatrixXd distance_for_clustering(const CrossMatrix& m) {
  const auto n = m.values.rows();
  Eigen::MatrixXd d = m.values;
  if (m.metric == CrossMetric::mean_auc) d = (1.0 - d.array()).matrix();
  // Column-mean imputation of absent cells (ordering only).
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    int cnt = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j && std::isfinite(d(i, j))) {
        sum += d(i, j);
        ++cnt;
      }
    const double fill = cnt > 0 ? sum / cnt : 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!std::isfinite(d(i, j))) d(i, j) = fill;
  }
  d = ((d + d.transpose()) / 2.0).eval();
  d.diagonal().setZero();
  return d;
}

// ---- SVG rendering ----

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string viridis(double t) {
  static constexpr double stops[5][3] = {{0.267, 0.005, 0.329},
                                         {0.229, 0.322, 0.545},
                                         {0.128, 0.567, 0.551},
                                         {0.369, 0.789, 0.383},
                                         {0.993, 0.906, 0.144}};
  t = std::clamp(t, 0.0, 1.0);
  const double x = t * 4.0;
  const int lo = std::min(3, static_cast<int>(x));
  const double f = x - lo;
  char buf[8];
  std::snprintf(
      buf, sizeof buf, "#%02x%02x%02x",
      static_cast<int>(std::lround(255 * (stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0])))),
      static_cast<int>(std::lround(255 * (stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1])))),
      static_cast<int>(std::lround(255 * (stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2])))));
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct HeatmapSpec {
  std::string title;
  std::vector<std::string> row_labels;  // ordered
  std::vector<std::string> col_labels;  // ordered
  Eigen::MatrixXd values;               // ordered; NaN = absent
  const Linkage* linkage = nullptr;     // row dendrogram (leaf ids = original rows)
};

std::string render_svg(const HeatmapSpec& spec) {
  const int n_rows = static_cast<int>(spec.row_labels.size());
  const int n_cols = static_cast<int>(spec.col_labels.size());
  const int cell = 22;
  const int dendro_w = spec.linkage != nullptr && n_rows > 1 ? 110 : 10;
  std::size_t max_row_label = 4, max_col_label = 4;
  for (const auto& s : spec.row_labels) max_row_label = std::max(max_row_label, s.size());
  for (const auto& s : spec.col_labels) max_col_label = std::max(max_col_label, s.size());
  const int label_w = static_cast<int>(max_row_label) * 8 + 12;
  const int top = 48;
  const int bottom = static_cast<int>(max_col_label) * 7 + 16;
  const int width = dendro_w + n_cols * cell + label_w + 20;
  const int height = top + n_rows * cell + bottom;

  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (Eigen::Index i = 0; i < spec.values.rows(); ++i)
    for (Eigen::Index j = 0; j < spec.values.cols(); ++j)
      if (std::isfinite(spec.values(i, j))) {
        vmin = std::min(vmin, spec.values(i, j));
        vmax = std::max(vmax, spec.values(i, j));
      }
  const bool have_range = std::isfinite(vmin) && vmax > vmin;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"monospace\">\n";
  s << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternTransform=\"rotate(45)\" "
       "patternUnits=\"userSpaceOnUse\"><rect width=\"6\" height=\"6\" fill=\"#eeeeee\"/>"
       "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#999999\" stroke-width=\"2\"/>"
       "</pattern></defs>\n";
  s << "<text x=\"" << dendro_w << "\" y=\"16\" font-size=\"13\">" << xml_escape(spec.title)
    << "</text>\n";

  if (have_range) {
    const int lx = dendro_w, ly = 24, lw = 160, lh = 10, steps = 32;
    for (int i = 0; i < steps; ++i) {
      s << "<rect x=\"" << lx + i * lw / steps << "\" y=\"" << ly << "\" width=\""
        << (lw + steps - 1) / steps << "\" height=\"" << lh << "\" fill=\""
        << viridis(static_cast<double>(i) / (steps - 1)) << "\"/>\n";
    }
    s << "<text x=\"" << lx + lw + 6 << "\" y=\"" << ly + 9 << "\" font-size=\"10\">" << fmt2(vmin)
      << " .. " << fmt2(vmax) << "</text>\n";
  }

  for (int i = 0; i < n_rows; ++i)
    for (int j = 0; j < n_cols; ++j) {
      const double v = spec.values(i, j);
      const int x = dendro_w + j * cell;
      const int y = top + i * cell;
      if (!std::isfinite(v)) {
        s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"url(#hatch)\" stroke=\"#ffffff\"/>\n";
        continue;
      }
      const double t = have_range ? (v - vmin) / (vmax - vmin) : 0.5;
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
        << "\" fill=\"" << viridis(t) << "\" stroke=\"#ffffff\"><title>" << fmt2(v)
        << "</title></rect>\n";
    }

  for (int i = 0; i < n_rows; ++i)
    s << "<text x=\"" << dendro_w + n_cols * cell + 6 << "\" y=\"" << top + i * cell + cell / 2 + 4
      << "\" font-size=\"11\">" << xml_escape(spec.row_labels[static_cast<std::size_t>(i)])
      << "</text>\n";
  for (int j = 0; j < n_cols; ++j) {
    const int x = dendro_w + j * cell + cell / 2 + 3;
    const int y = top + n_rows * cell + 8;
    s << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"11\" transform=\"rotate(60 " << x
      << " " << y << ")\">" << xml_escape(spec.col_labels[static_cast<std::size_t>(j)])
      << "</text>\n";
  }

  if (spec.linkage != nullptr && n_rows > 1) {
    const Linkage& lk = *spec.linkage;
    std::vector<int> position(static_cast<std::size_t>(n_rows));
    for (int pos = 0; pos < n_rows; ++pos)
      position[static_cast<std::size_t>(lk.order[static_cast<std::size_t>(pos)])] = pos;
    double hmax = 0.0;
    for (const auto& node : lk.nodes) hmax = std::max(hmax, node.height);
    const auto x_of = [&](double h) {
      return hmax > 0 ? 6.0 + (dendro_w - 12.0) * (1.0 - h / hmax) : dendro_w - 6.0;
    };
    std::vector<double> center(lk.nodes.size(), 0.0);
    for (std::size_t id = 0; id < lk.nodes.size(); ++id) {
      const ClusterNode& node = lk.nodes[id];
      if (node.left < 0) {
        center[id] = top + position[static_cast<std::size_t>(node.leaves[0])] * cell + cell / 2.0;
      } else {
        center[id] = (center[static_cast<std::size_t>(node.left)] +
                      center[static_cast<std::size_t>(node.right)]) /
                     2.0;
      }
    }
    for (std::size_t id = 0; id < lk.nodes.size(); ++id) {
      const ClusterNode& node = lk.nodes[id];
      if (node.left < 0) continue;
      const double xl = x_of(lk.nodes[static_cast<std::size_t>(node.left)].height);
      const double xr = x_of(lk.nodes[static_cast<std::size_t>(node.right)].height);
      const double xn = x_of(node.height);
      const double yl = center[static_cast<std::size_t>(node.left)];
      const double yr = center[static_cast<std::size_t>(node.right)];
      s << "<polyline points=\"" << fmt2(xl) << "," << fmt2(yl) << " " << fmt2(xn) << ","
        << fmt2(yl) << " " << fmt2(xn) << "," << fmt2(yr) << " " << fmt2(xr) << "," << fmt2(yr)
        << "\" fill=\"none\" stroke=\"#444444\"/>\n";
    }
  }

  s << "</svg>\n";
  return s.str();
}

Linkage linkage_for(const CrossMatrix& matrix) {
  return average_linkage(distance_for_clustering(matrix), matrix.projects);
}

}  // namespace

std::vector<ProjectModelPair> fit_project_models(std::span<const FeatureRow> rows,
                                                 const XevalOptions& options,
                                                 std::vector<XevalExclusion>* excluded) {
  std::map<ProjectId, std::vector<const FeatureRow*>> grouped;
  for (const auto& r : rows) grouped[r.project].push_back(&r);

  const std::vector<std::string> zero_cols = simplified_zero_columns();
  const std::vector<std::string> count_cols = simplified_count_columns();

  const auto exclude = [&](const ProjectId& p, const std::string& reason) {
    if (excluded != nullptr) excluded->push_back({p, reason});
  };

  std::vector<ProjectModelPair> out;
  for (const auto& [project, prows] : grouped) {
    if (static_cast<int>(prows.size()) < options.min_rows) {
      exclude(project, "fewer than " + std::to_string(options.min_rows) + " rows");
      continue;
    }
    Eigen::VectorXd y(static_cast<Eigen::Index>(prows.size()));
    for (std::size_t i = 0; i < prows.size(); ++i)
      y[static_cast<Eigen::Index>(i)] = static_cast<double>(prows[i]->future_mentions);
    const Eigen::Index positives = (y.array() > 0.0).count();
    if (positives == 0 || positives == y.size()) {
      exclude(project, "degenerate response");
      continue;
    }
    if (positives <= static_cast<Eigen::Index>(count_cols.size()) + 1) {
      exclude(project, "too few positive responses for the count model");
      continue;
    }

    ProjectModelPair pair;
    pair.project = project;
    pair.zero_columns = zero_cols;
    pair.count_columns = count_cols;
    try {
      DesignMatrix zero = DesignMatrix::create(zero_cols, covariate_block(prows, zero_cols),
                                               (y.array() > 0.0).cast<double>());
      pair.zero = fit_glm(zero, Family::logistic);
      pair.zero_X = zero.X;
      pair.zero_y = zero.y;

      std::vector<const FeatureRow*> positive_rows;
      for (const auto* r : prows)
        if (r->future_mentions > 0) positive_rows.push_back(r);
      Eigen::VectorXd yc(static_cast<Eigen::Index>(positive_rows.size()));
      for (std::size_t i = 0; i < positive_rows.size(); ++i)
        yc[static_cast<Eigen::Index>(i)] = static_cast<double>(positive_rows[i]->future_mentions);
      DesignMatrix count =
          DesignMatrix::create(count_cols, covariate_block(positive_rows, count_cols), yc);
      pair.count = fit_glm(count, Family::trunc_poisson);
      pair.count_X = count.X;
      pair.count_y = count.y;
    } catch (const Error& e) {
      exclude(project, e.what());
      continue;
    }
    if (!pair.zero.converged || !pair.count.converged) {
      exclude(project, "fit did not converge");
      continue;
    }
    out.push_back(std::move(pair));
  }
  return out;
}

double auc_score(std::span<const double> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw Error("auc_score: size mismatch");
  const std::size_t n = labels.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
    i = j + 1;
  }

  double sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (labels[k] > 0.5) {
      sum_pos += rank[k];
      ++n_pos;
    }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("auc_score needs both classes");
  return (sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::pair<CrossMatrix, CrossMatrix> cross_predict(std::span<const ProjectModelPair> pairs) {
  if (pairs.size() < 2) throw Error("cross_predict needs at least two project models");
  const int n = static_cast<int>(pairs.size());

  CrossMatrix mae;
  mae.metric = CrossMetric::mean_mae;
  CrossMatrix auc;
  auc.metric = CrossMetric::mean_auc;
  for (const auto& p : pairs) {
    mae.projects.push_back(p.project.slug());
    auc.projects.push_back(p.project.slug());
  }
  mae.values = Eigen::MatrixXd::Constant(n, n, kNaN);
  auc.values = Eigen::MatrixXd::Constant(n, n, kNaN);

  std::vector<bool> evaluable(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) evaluable[i] = has_both_classes(pairs[i].zero_y);

  const auto directed_mae = [&](const ProjectModelPair& model, const ProjectModelPair& data) {
    return mean_absolute_error(data.count_y, count_predictions(model, data.count_X));
  };

  for (int i = 0; i < n; ++i) {
    const auto& pi = pairs[static_cast<std::size_t>(i)];
    mae.values(i, i) = directed_mae(pi, pi);
    if (evaluable[static_cast<std::size_t>(i)]) auc.values(i, i) = directed_auc(pi, pi);
    for (int j = i + 1; j < n; ++j) {
      const auto& pj = pairs[static_cast<std::size_t>(j)];
      const double m = (directed_mae(pi, pj) + directed_mae(pj, pi)) / 2.0;
      mae.values(i, j) = m;
      mae.values(j, i) = m;
      if (evaluable[static_cast<std::size_t>(i)] && evaluable[static_cast<std::size_t>(j)]) {
        const double a = (directed_auc(pi, pj) + directed_auc(pj, pi)) / 2.0;
        auc.values(i, j) = a;
        auc.values(j, i) = a;
      }
    }
  }
  mae.dendrogram_order = cluster_order(mae);
  auc.dendrogram_order = cluster_order(auc);
  return {std::move(mae), std::move(auc)};
}

std::vector<int> cluster_order(const CrossMatrix& matrix) {
  const int n = static_cast<int>(matrix.projects.size());
  if (n < 2) {
    std::vector<int> identity(static_cast<std::size_t>(n));
    std::iota(identity.begin(), identity.end(), 0);
    return identity;
  }
  return linkage_for(matrix).order;
}

void export_heatmap(const CrossMatrix& matrix, std::span<const int> order,
                    const std::filesystem::path& csv_path, const std::filesystem::path& svg_path) {
  const int n = static_cast<int>(matrix.projects.size());
  if (static_cast<int>(order.size()) != n) throw Error("export_heatmap: bad order length");

  std::string csv = "project";
  for (const int j : order) csv += "," + matrix.projects[static_cast<std::size_t>(j)];
  csv += "\n";
  for (const int i : order) {
    csv += matrix.projects[static_cast<std::size_t>(i)];
    for (const int j : order) {
      const double v = matrix.values(i, j);
      csv += ",";
      if (std::isfinite(v)) csv += fmt_double(v);
    }
    csv += "\n";
  }
  write_file(csv_path, csv);

  HeatmapSpec spec;
  spec.title = matrix.metric == CrossMetric::mean_mae
                   ? "cross-project count MAE (lower is better)"
                   : "cross-project zero AUC (higher is better)";
  Eigen::MatrixXd ordered(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ordered(i, j) =
          matrix.values(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  spec.values = ordered;
  for (const int i : order) {
    spec.row_labels.push_back(matrix.projects[static_cast<std::size_t>(i)]);
    spec.col_labels.push_back(matrix.projects[static_cast<std::size_t>(i)]);
  }
  const Linkage lk = linkage_for(matrix);
  spec.linkage = &lk;
  write_file(svg_path, render_svg(spec));
}

void export_coefficient_heatmap(std::span<const ProjectModelPair> pairs, bool count_component,
                                const std::filesystem::path& csv_path,
                                const std::filesystem::path& svg_path) {
  if (pairs.empty()) throw Error("export_coefficient_heatmap: no project models");
  const FitResult& first = count_component ? pairs.front().count : pairs.front().zero;
  const std::vector<std::string> cols = first.columns;
  const int n = static_cast<int>(pairs.size());
  const int k = static_cast<int>(cols.size());

  Eigen::MatrixXd values(n, k);
  std::vector<std::string> projects;
  for (int i = 0; i < n; ++i) {
    const auto& fit = count_component ? pairs[static_cast<std::size_t>(i)].count
                                      : pairs[static_cast<std::size_t>(i)].zero;
    projects.push_back(pairs[static_cast<std::size_t>(i)].project.slug());
    for (int j = 0; j < k; ++j) values(i, j) = fit.coefficients[j];
  }

  // Cluster projects by Euclidean distance between coefficient vectors.
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dist(i, j) = (values.row(i) - values.row(j)).norm();
  const Linkage lk = average_linkage(dist, projects);
  const std::vector<int>& order = lk.order;

  std::string csv = "project";
  for (const auto& c : cols) csv += "," + c;
  csv += "\n";
  for (const int i : order) {
    csv += projects[static_cast<std::size_t>(i)];
    for (int j = 0; j < k; ++j) csv += "," + fmt_double(values(i, j));
    csv += "\n";
  }
  write_file(csv_path, csv);

  HeatmapSpec spec;
  spec.title = std::string("per-project coefficients, ") +
               (count_component ? "count component" : "zero component");
  spec.col_labels = cols;
  Eigen::MatrixXd ordered(n, k);
  for (int i = 0; i < n; ++i) {
    ordered.row(i) = values.row(order[static_cast<std::size_t>(i)]);
    spec.row_labels.push_back(
        projects[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
  }
  spec.values = ordered;
  spec.linkage = &lk;
  write_file(svg_path, render_svg(spec));
}

}  // namespace mlab
