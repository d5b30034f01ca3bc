#include <sstream>

#include "mlab/error.hpp"
#include "mlab/pipeline.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  for (auto& item : split(value, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error("config: '" + key + "' must be a boolean, got '" + value + "'");
}

}  // namespace

std::string PipelineConfig::serialize() const {
  std::ostringstream s;
  s << "[store]\n";
  s << "dir = " << store_dir.string() << "\n";
  std::vector<std::string> slugs;
  for (const auto& p : projects) slugs.push_back(p.slug());
  s << "projects = " << join(slugs, ", ") << "\n";
  s << "\n[features]\n";
  s << "response_months = " << response_months << "\n";
  s << "min_participation_months = " << min_participation_months << "\n";
  s << "participation = " << participation << "\n";
  s << "\n[metrics]\n";
  s << "daf_granularity = " << daf_granularity << "\n";
  s << "\n[szz]\n";
  s << "whitespace_filter = " << (szz_whitespace_filter ? "true" : "false") << "\n";
  s << "track_renames = " << (szz_track_renames ? "true" : "false") << "\n";
  s << "\n[model]\n";
  s << "zero_columns = " << join(zero_columns, ", ") << "\n";
  s << "count_columns = " << join(count_columns, ", ") << "\n";
  s << "protected_columns = "
    << join(std::vector<std::string>(protected_columns.begin(), protected_columns.end()), ", ")
    << "\n";
  s << "min_rows_per_project = " << min_rows_per_project << "\n";
  s << "\n[output]\n";
  s << "dir = " << out_dir.string() << "\n";
  return s.str();
}

void PipelineConfig::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  PipelineConfig cfg;
  std::istringstream in(read_file(path));
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const std::string qualified = section + "." + key;

    if (qualified == "store.dir") {
      cfg.store_dir = value;
    } else if (qualified == "store.projects") {
      cfg.projects.clear();
      for (const auto& slug : parse_list(value)) cfg.projects.push_back(ProjectId::parse(slug));
    } else if (qualified == "features.response_months") {
      cfg.response_months = std::stoi(value);
    } else if (qualified == "features.min_participation_months") {
      cfg.min_participation_months = std::stoi(value);
    } else if (qualified == "features.participation") {
      if (value != "any" && value != "commits")
        throw Error("config: participation must be 'any' or 'commits'");
      cfg.participation = value;
    } else if (qualified == "metrics.daf_granularity") {
      if (value != "top_dir" && value != "file")
        throw Error("config: daf_granularity must be 'top_dir' or 'file'");
      cfg.daf_granularity = value;
    } else if (qualified == "szz.whitespace_filter") {
      cfg.szz_whitespace_filter = parse_bool(value, qualified);
    } else if (qualified == "szz.track_renames") {
      cfg.szz_track_renames = parse_bool(value, qualified);
    } else if (qualified == "model.zero_columns") {
      cfg.zero_columns = parse_list(value);
    } else if (qualified == "model.count_columns") {
      cfg.count_columns = parse_list(value);
    } else if (qualified == "model.protected_columns") {
      const auto items = parse_list(value);
      cfg.protected_columns = std::set<std::string>(items.begin(), items.end());
    } else if (qualified == "model.min_rows_per_project") {
      cfg.min_rows_per_project = std::stoi(value);
    } else if (qualified == "output.dir") {
      cfg.out_dir = value;
    } else {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + qualified +
                  "'");
    }
  }
  return cfg;
}

AssembleOptions PipelineConfig::assemble_options() const {
  AssembleOptions opts;
  opts.min_participation_months = min_participation_months;
  opts.participation = participation == "commits"
                           ? AssembleOptions::Participation::commits_only
                           : AssembleOptions::Participation::any_activity;
  opts.daf_granularity =
      daf_granularity == "file" ? ModuleGranularity::file : ModuleGranularity::top_dir;
  opts.szz.skip_whitespace_only = szz_whitespace_filter;
  opts.szz.track_renames = szz_track_renames;
  return opts;
}

std::vector<std::string> PipelineConfig::effective_zero_columns() const {
  return zero_columns.empty() ? default_zero_columns() : zero_columns;
}

std::vector<std::string> PipelineConfig::effective_count_columns() const {
  return count_columns.empty() ? default_count_columns() : count_columns;
}

std::set<std::string> PipelineConfig::effective_protected_columns() const {
  if (!protected_columns.empty()) return protected_columns;
  namespace col = columns;
  return {col::committer_only, col::log_total_posts, col::log_observed_mentions,
          col::github_age_days, col::github_age_days_sq};
}

}  // namespace mlab
