#include "gpmfs/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "gpmfs/errors.hpp"

namespace gpmfs {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

nlohmann::ordered_json metrics_json(const MetricsReport& m) {
  nlohmann::ordered_json j;
  j["hamming_loss"] = m.hamming_loss;
  j["micro_f1"] = m.micro_f1;
  j["macro_f1"] = m.macro_f1;
  j["one_error"] = m.one_error;
  j["average_precision"] = m.average_precision;
  j["skipped_instances"] = m.skipped_instances;
  return j;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed while reading '" + path + "'");
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

nlohmann::ordered_json hyperparams_to_json(const HyperParams& params) {
  nlohmann::ordered_json j;
  j["alpha"] = params.alpha;
  j["beta"] = params.beta;
  j["gamma"] = params.gamma;
  j["lambda"] = params.lambda;
  j["p"] = params.p;
  j["q"] = params.q;
  j["global_fraction"] = params.global_fraction;
  j["graph_k"] = params.graph_k;
  if (params.sigma > 0.0) {
    j["sigma"] = params.sigma;
  } else {
    j["sigma"] = "auto";
  }
  j["max_iter"] = params.max_iter;
  j["rel_tol"] = params.rel_tol;
  j["epsilon_norm"] = params.epsilon_norm;
  j["ridge_jitter"] = params.ridge_jitter;
  return j;
}

nlohmann::ordered_json selection_report_json(const Dataset& dataset,
                                             const PipelineResult& pipeline,
                                             const nlohmann::ordered_json& config) {
  nlohmann::ordered_json j;
  j["schema"] = kSelectionSchema;
  j["generated_at"] = iso_timestamp();
  j["config"] = config;
  j["dataset"] = {{"source", dataset.source},
                  {"instances", dataset.instance_count()},
                  {"features", dataset.feature_count()},
                  {"labels", dataset.label_count()},
                  {"label_names", dataset.label_names}};
  j["sigma_used"] = pipeline.graph.sigma;

  const FeatureSelection& sel = pipeline.selection;
  nlohmann::ordered_json global = nlohmann::ordered_json::array();
  for (int g : sel.global) {
    global.push_back({{"index", g},
                      {"name", dataset.feature_names[static_cast<std::size_t>(g)]},
                      {"norm", sel.row_norms(g)}});
  }
  j["global"] = global;

  nlohmann::ordered_json per_label = nlohmann::ordered_json::array();
  for (std::size_t label = 0; label < sel.personalized.size(); ++label) {
    nlohmann::ordered_json personalized = nlohmann::ordered_json::array();
    for (int idx : sel.personalized[label]) {
      personalized.push_back(
          {{"index", idx},
           {"name", dataset.feature_names[static_cast<std::size_t>(idx)]}});
    }
    per_label.push_back({{"label", dataset.label_names[label]},
                         {"personalized", personalized},
                         {"complete", sel.complete[label]}});
  }
  j["per_label"] = per_label;

  SelectionStats stats = selection_stats(sel, dataset.feature_count());
  j["stats"] = {{"global_size", stats.global_size},
                {"mean_personalized", stats.mean_personalized},
                {"personalized_proportion", stats.personalized_proportion}};

  std::vector<double> norms(sel.row_norms.data(),
                            sel.row_norms.data() + sel.row_norms.size());
  j["row_norms"] = norms;
  j["objective_trace"] = pipeline.state.trace;
  return j;
}

nlohmann::ordered_json cv_report_json(const CvReport& report,
                                      const nlohmann::ordered_json& config) {
  nlohmann::ordered_json j;
  j["schema"] = kCvSchema;
  j["generated_at"] = iso_timestamp();
  j["config"] = config;
  j["folds"] = report.folds;
  j["seed"] = report.seed;
  nlohmann::ordered_json per_fold = nlohmann::ordered_json::array();
  for (const FoldResult& fr : report.per_fold) {
    nlohmann::ordered_json f = metrics_json(fr.metrics);
    f["fold"] = fr.fold;
    f["global_size"] = fr.selection.global_size;
    f["mean_personalized"] = fr.selection.mean_personalized;
    f["personalized_proportion"] = fr.selection.personalized_proportion;
    per_fold.push_back(f);
  }
  j["per_fold"] = per_fold;
  nlohmann::ordered_json mean = metrics_json(report.mean);
  mean["global_size"] = report.mean_global_size;
  mean["mean_personalized"] = report.mean_personalized;
  mean["personalized_proportion"] = report.mean_personalized_proportion;
  j["mean"] = mean;
  return j;
}

std::string cv_report_csv(const CvReport& report) {
  std::ostringstream out;
  out << "fold,hamming_loss,micro_f1,macro_f1,one_error,average_precision,"
         "skipped_instances,global_size,mean_personalized,personalized_proportion\n";
  auto row = [&](const std::string& name, const MetricsReport& m, double gsize,
                 double mpers, double pprop) {
    out << name << ',' << format_number(m.hamming_loss) << ','
        << format_number(m.micro_f1) << ',' << format_number(m.macro_f1) << ','
        << format_number(m.one_error) << ',' << format_number(m.average_precision)
        << ',' << m.skipped_instances << ',' << format_number(gsize) << ','
        << format_number(mpers) << ',' << format_number(pprop) << '\n';
  };
  for (const FoldResult& fr : report.per_fold) {
    row(std::to_string(fr.fold), fr.metrics,
        static_cast<double>(fr.selection.global_size), fr.selection.mean_personalized,
        fr.selection.personalized_proportion);
  }
  row("mean", report.mean, report.mean_global_size, report.mean_personalized,
      report.mean_personalized_proportion);
  return out.str();
}

std::string trace_csv(const std::vector<double>& trace) {
  std::ostringstream out;
  out << "iteration,objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << (i + 1) << ',' << format_number(trace[i]) << '\n';
  }
  return out.str();
}

StatsInput parse_scores_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream cells_in(t);
    std::string cell;
    while (std::getline(cells_in, cell, ',')) cells.push_back(trim(cell));
    if (!t.empty() && t.back() == ',') cells.push_back("");
    rows.push_back(cells);
    line_numbers.push_back(line_no);
  }
  if (rows.size() < 2)
    throw ValidationError("scores table needs a header and at least one dataset row");
  const std::vector<std::string>& header = rows[0];
  if (header.size() < 3)
    throw ValidationError("scores table needs at least two method columns");

  StatsInput input;
  input.methods.assign(header.begin() + 1, header.end());
  const std::size_t ncols = header.size();
  input.scores.resize(static_cast<Eigen::Index>(rows.size() - 1),
                      static_cast<Eigen::Index>(ncols - 1));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != ncols) {
      throw ParseError("ragged row: expected " + std::to_string(ncols) + " cells, got " +
                           std::to_string(rows[r].size()),
                       line_numbers[r]);
    }
    input.datasets.push_back(rows[r][0]);
    for (std::size_t c = 1; c < ncols; ++c) {
      const std::string& tok = rows[r][c];
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || end != tok.c_str() + tok.size())
        throw ParseError("invalid numeric value '" + tok + "'", line_numbers[r]);
      input.scores(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) = v;
    }
  }
  return input;
}

nlohmann::ordered_json stats_report_json(const StatsInput& input,
                                         const StatsConfig& config) {
  RankTable table = make_rank_table(input.scores, config.higher_is_better);
  Eigen::VectorXd ranks = average_ranks(table);
  FriedmanResult friedman = friedman_statistic(table);
  double cd = bonferroni_dunn_cd(config.q_alpha, static_cast<int>(input.methods.size()),
                                 static_cast<int>(input.datasets.size()));

  int control = 0;
  if (!config.control.empty()) {
    auto it = std::find(input.methods.begin(), input.methods.end(), config.control);
    if (it == input.methods.end())
      throw ArgumentError("control method '" + config.control + "' not in the table");
    control = static_cast<int>(it - input.methods.begin());
  } else {
    for (Eigen::Index j = 1; j < ranks.size(); ++j) {
      if (ranks(j) < ranks(control)) control = static_cast<int>(j);
    }
  }

  nlohmann::ordered_json j;
  j["schema"] = kStatsSchema;
  j["generated_at"] = iso_timestamp();
  j["methods"] = input.methods;
  j["datasets"] = input.datasets;
  j["direction"] = config.higher_is_better ? "higher" : "lower";
  nlohmann::ordered_json rank_rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < table.ranks.rows(); ++r) {
    std::vector<double> row(table.ranks.cols());
    for (Eigen::Index c = 0; c < table.ranks.cols(); ++c) row[static_cast<std::size_t>(c)] = table.ranks(r, c);
    rank_rows.push_back(row);
  }
  j["ranks"] = rank_rows;
  std::vector<double> avg(ranks.data(), ranks.data() + ranks.size());
  j["average_ranks"] = avg;
  j["chi_squared"] = friedman.chi_squared;
  if (friedman.degenerate) {
    j["f_statistic"] = nullptr;  // +infinity has no JSON representation
  } else {
    j["f_statistic"] = friedman.f_statistic;
  }
  j["degenerate"] = friedman.degenerate;
  j["f_critical"] = config.f_critical;
  j["friedman_significant"] =
      friedman.degenerate || friedman.f_statistic > config.f_critical;
  j["q_alpha"] = config.q_alpha;
  j["critical_difference"] = cd;
  j["control"] = input.methods[static_cast<std::size_t>(control)];
  j["control_index"] = control;
  nlohmann::ordered_json comparisons = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < input.methods.size(); ++m) {
    if (static_cast<int>(m) == control) continue;
    double diff = ranks(static_cast<Eigen::Index>(m)) - ranks(control);
    comparisons.push_back({{"method", input.methods[m]},
                           {"rank_difference", diff},
                           {"significant", std::abs(diff) > cd}});
  }
  j["comparisons"] = comparisons;
  return j;
}

}  // namespace gpmfs
