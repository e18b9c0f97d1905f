#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "gpmfs/concurrency.hpp"
#include "gpmfs/dataset.hpp"
#include "gpmfs/errors.hpp"
#include "gpmfs/evaluation.hpp"
#include "gpmfs/reports.hpp"
#include "gpmfs/selection.hpp"
#include "gpmfs/solver.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
  std::string dataset;
  std::string format;  // arff-xml | arff-trailing | csv (inferred when empty)
  std::string xml;
  int label_count = 0;  // 0 = not given
  std::string sigma_text = "auto";
  std::string out;
  int workers = 1;
  gpmfs::HyperParams params;

  std::string resolved_format;
};

struct EvalOpts {
  int folds = 5;
  std::uint64_t seed = 1;
  int candidate_k = 20;
  int final_k = 10;
  std::string predictor = "two-stage";
};

void add_dataset_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--dataset", o.dataset, "Input dataset file")->required();
  cmd->add_option("--format", o.format,
                  "Input format (inferred from --xml/extension when omitted)")
      ->check(CLI::IsMember({"arff-xml", "arff-trailing", "csv"}));
  cmd->add_option("--xml", o.xml, "Labels XML file naming the label attributes");
  cmd->add_option("--label-count", o.label_count,
                  "Number of trailing label columns/attributes")
      ->check(CLI::PositiveNumber);
}

void add_solver_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--alpha", o.params.alpha, "Label-relaxation fit weight");
  cmd->add_option("--beta", o.params.beta, "Manifold-regularization weight");
  cmd->add_option("--gamma", o.params.gamma, "Feature-redundancy penalty weight");
  cmd->add_option("--lambda", o.params.lambda, "Row-sparsity weight");
  cmd->add_option("--p", o.params.p, "Row-sparsity exponent in (0, 2]");
  cmd->add_option("--graph-k", o.params.graph_k, "Affinity-graph neighbor count");
  cmd->add_option("--sigma", o.sigma_text, "Graph width (positive number or 'auto')");
  cmd->add_option("--max-iter", o.params.max_iter, "Maximum solver iterations");
  cmd->add_option("--tol", o.params.rel_tol,
                  "Relative objective-change stop threshold (0 disables)");
}

void add_selection_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--q", o.params.q, "Personalization strictness in [0, 1]");
  cmd->add_option("--global-fraction", o.params.global_fraction,
                  "Share of features in the global set, in (0, 1]");
}

void add_eval_flags(CLI::App* cmd, EvalOpts& e) {
  cmd->add_option("--folds", e.folds, "Cross-validation fold count");
  cmd->add_option("--seed", e.seed, "Fold-assignment seed");
  cmd->add_option("--candidate-k", e.candidate_k, "Stage-1 neighbor pool size");
  cmd->add_option("--final-k", e.final_k, "Stage-2 neighbors kept per label");
  cmd->add_option("--predictor", e.predictor, "Prediction backend")
      ->check(CLI::IsMember({"two-stage", "mlknn"}));
}

double parse_sigma(const std::string& text) {
  if (text == "auto") return 0.0;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !(v > 0.0))
    throw gpmfs::ArgumentError("sigma must be a positive number or 'auto'");
  return v;
}

std::string resolve_format(const CommonOpts& o) {
  if (!o.format.empty()) return o.format;
  if (!o.xml.empty()) return "arff-xml";
  auto ends_with = [&](const char* suffix) {
    std::string s = o.dataset;
    std::string suf = suffix;
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with(".csv")) return "csv";
  return "arff-trailing";
}

gpmfs::Dataset load_dataset(CommonOpts& o) {
  o.params.sigma = parse_sigma(o.sigma_text);
  o.resolved_format = resolve_format(o);

  gpmfs::Dataset ds;
  if (o.resolved_format == "arff-xml") {
    if (o.xml.empty())
      throw gpmfs::ArgumentError("format arff-xml requires --xml");
    if (o.label_count != 0)
      throw gpmfs::ArgumentError("provide either --xml or --label-count, not both");
    std::vector<std::string> labels =
        gpmfs::parse_label_xml(gpmfs::read_file(o.xml));
    ds = gpmfs::parse_arff(gpmfs::read_file(o.dataset), labels);
  } else {
    if (!o.xml.empty())
      throw gpmfs::ArgumentError("provide either --xml or --label-count, not both");
    if (o.label_count < 1)
      throw gpmfs::ArgumentError("format " + o.resolved_format +
                                 " requires --label-count");
    if (o.resolved_format == "csv") {
      ds = gpmfs::parse_csv(gpmfs::read_file(o.dataset), o.label_count);
    } else {
      ds = gpmfs::parse_arff(gpmfs::read_file(o.dataset), o.label_count);
    }
  }
  ds.source = o.dataset;
  return ds;
}

std::string resolve_out(const std::string& flag, const char* default_name) {
  if (!flag.empty()) return flag;
  const char* dir = std::getenv("GPMFS_OUT_DIR");
  std::string base = (dir != nullptr && dir[0] != '\0') ? dir : ".";
  return base + "/" + default_name;
}

// evaluate writes a JSON report plus a CSV sibling.
std::string csv_sibling(const std::string& json_path) {
  const std::string suffix = ".json";
  if (json_path.size() > suffix.size() &&
      json_path.compare(json_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return json_path.substr(0, json_path.size() - suffix.size()) + ".csv";
  }
  return json_path + ".csv";
}

nlohmann::ordered_json config_json(const CommonOpts& o) {
  nlohmann::ordered_json j;
  j["dataset"] = o.dataset;
  j["format"] = o.resolved_format;
  if (!o.xml.empty()) j["xml"] = o.xml;
  if (o.label_count > 0) j["label_count"] = o.label_count;
  j["params"] = gpmfs::hyperparams_to_json(o.params);
  j["workers"] = o.workers;
  return j;
}

void cmd_select(CommonOpts& o) {
  gpmfs::Dataset ds = load_dataset(o);
  gpmfs::PipelineResult pipeline = gpmfs::run_pipeline(ds, o.params);
  nlohmann::ordered_json report =
      gpmfs::selection_report_json(ds, pipeline, config_json(o));
  std::string path = resolve_out(o.out, "selection.json");
  gpmfs::write_file(path, report.dump(2) + "\n");
  gpmfs::SelectionStats stats =
      gpmfs::selection_stats(pipeline.selection, ds.feature_count());
  std::cout << "selected " << stats.global_size << " global features, mean "
            << stats.mean_personalized << " personalized per label\n";
  std::cout << "wrote " << path << "\n";
}

gpmfs::EvalOptions eval_options(const EvalOpts& e, int workers) {
  gpmfs::EvalOptions options;
  options.candidate_k = e.candidate_k;
  options.final_k = e.final_k;
  options.predictor = e.predictor == "mlknn" ? gpmfs::PredictorKind::kMlKnn
                                             : gpmfs::PredictorKind::kTwoStageKnn;
  options.workers = workers;
  return options;
}

void cmd_evaluate(CommonOpts& o, EvalOpts& e) {
  gpmfs::Dataset ds = load_dataset(o);
  gpmfs::CvReport report = gpmfs::cross_validate(ds, o.params, e.folds, e.seed,
                                                 eval_options(e, o.workers));
  nlohmann::ordered_json config = config_json(o);
  config["folds"] = e.folds;
  config["seed"] = e.seed;
  config["candidate_k"] = e.candidate_k;
  config["final_k"] = e.final_k;
  config["predictor"] = e.predictor;
  std::string path = resolve_out(o.out, "evaluation.json");
  gpmfs::write_file(path, gpmfs::cv_report_json(report, config).dump(2) + "\n");
  std::string csv_path = csv_sibling(path);
  gpmfs::write_file(csv_path, gpmfs::cv_report_csv(report));
  std::cout << "mean hamming_loss " << gpmfs::format_number(report.mean.hamming_loss)
            << ", mean average_precision "
            << gpmfs::format_number(report.mean.average_precision) << "\n";
  std::cout << "wrote " << path << " and " << csv_path << "\n";
}

void cmd_sweep_q(CommonOpts& o, EvalOpts& e, std::vector<double>& q_values) {
  if (q_values.empty()) q_values = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (double q : q_values) {
    if (!(q >= 0.0 && q <= 1.0))
      throw gpmfs::ValidationError("q values must lie in [0, 1]");
  }
  gpmfs::Dataset ds = load_dataset(o);
  std::vector<gpmfs::CvReport> reports(q_values.size());
  gpmfs::parallel_for_indexed(
      static_cast<int>(q_values.size()), o.workers, [&](int i) {
        gpmfs::HyperParams params = o.params;
        params.q = q_values[static_cast<std::size_t>(i)];
        reports[static_cast<std::size_t>(i)] =
            gpmfs::cross_validate(ds, params, e.folds, e.seed, eval_options(e, 1));
      });
  std::ostringstream csv;
  csv << "q,mean_personalized,hamming_loss,micro_f1,macro_f1,one_error,"
         "average_precision\n";
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    const gpmfs::CvReport& r = reports[i];
    csv << gpmfs::format_number(q_values[i]) << ','
        << gpmfs::format_number(r.mean_personalized) << ','
        << gpmfs::format_number(r.mean.hamming_loss) << ','
        << gpmfs::format_number(r.mean.micro_f1) << ','
        << gpmfs::format_number(r.mean.macro_f1) << ','
        << gpmfs::format_number(r.mean.one_error) << ','
        << gpmfs::format_number(r.mean.average_precision) << '\n';
  }
  std::string path = resolve_out(o.out, "sweep_q.csv");
  gpmfs::write_file(path, csv.str());
  std::cout << "swept " << q_values.size() << " q values\n";
  std::cout << "wrote " << path << "\n";
}

void cmd_sensitivity(CommonOpts& o, EvalOpts& e, std::string& param,
                     std::vector<double>& values, std::vector<double>& fractions) {
  if (values.empty()) values = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
  if (fractions.empty())
    fractions = {0.02, 0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.18, 0.20};
  for (double v : values) {
    if (v < 0.0)
      throw gpmfs::ValidationError("parameter values must be nonnegative");
  }
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0))
      throw gpmfs::ValidationError("fractions must lie in (0, 1]");
  }
  gpmfs::Dataset ds = load_dataset(o);

  // Grid runs vary one parameter with the other three pinned at 1.
  gpmfs::HyperParams base = o.params;
  base.alpha = base.beta = base.gamma = base.lambda = 1.0;

  const int grid = static_cast<int>(values.size() * fractions.size());
  std::vector<double> ap(static_cast<std::size_t>(grid));
  gpmfs::parallel_for_indexed(grid, o.workers, [&](int idx) {
    std::size_t vi = static_cast<std::size_t>(idx) / fractions.size();
    std::size_t fi = static_cast<std::size_t>(idx) % fractions.size();
    gpmfs::HyperParams params = base;
    if (param == "alpha") params.alpha = values[vi];
    if (param == "beta") params.beta = values[vi];
    if (param == "gamma") params.gamma = values[vi];
    if (param == "lambda") params.lambda = values[vi];
    params.global_fraction = fractions[fi];
    gpmfs::CvReport report =
        gpmfs::cross_validate(ds, params, e.folds, e.seed, eval_options(e, 1));
    ap[static_cast<std::size_t>(idx)] = report.mean.average_precision;
  });

  std::ostringstream csv;
  csv << "param,value,fraction,average_precision\n";
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      csv << param << ',' << gpmfs::format_number(values[vi]) << ','
          << gpmfs::format_number(fractions[fi]) << ','
          << gpmfs::format_number(ap[vi * fractions.size() + fi]) << '\n';
    }
  }
  std::string path = resolve_out(o.out, "sensitivity.csv");
  gpmfs::write_file(path, csv.str());
  std::cout << "ran " << grid << " grid points for " << param << "\n";
  std::cout << "wrote " << path << "\n";
}

void cmd_trace(CommonOpts& o) {
  gpmfs::Dataset ds = load_dataset(o);
  gpmfs::PipelineResult pipeline = gpmfs::run_pipeline(ds, o.params);
  std::string path = resolve_out(o.out, "trace.csv");
  gpmfs::write_file(path, gpmfs::trace_csv(pipeline.state.trace));
  std::cout << "objective after " << pipeline.state.trace.size() << " iterations: "
            << gpmfs::format_number(pipeline.state.trace.back()) << "\n";
  std::cout << "wrote " << path << "\n";
}

void cmd_stats(std::string& scores_path, std::string& direction, double q_alpha,
               double f_critical, std::string& control, std::string& out) {
  gpmfs::StatsInput input = gpmfs::parse_scores_csv(gpmfs::read_file(scores_path));
  gpmfs::StatsConfig config;
  config.higher_is_better = direction != "lower";
  config.q_alpha = q_alpha;
  config.f_critical = f_critical;
  config.control = control;
  nlohmann::ordered_json report = gpmfs::stats_report_json(input, config);
  std::string path = resolve_out(out, "stats.json");
  gpmfs::write_file(path, report.dump(2) + "\n");
  std::cout << "critical difference "
            << gpmfs::format_number(report["critical_difference"].get<double>())
            << " (control " << report["control"].get<std::string>() << ")\n";
  std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global + personalized multi-label feature selection"};
  app.set_version_flag("--version", std::string("gpmfs ") + kVersion);
  app.set_config("--config", "", "Read options from a config file");
  app.require_subcommand(1);

  CommonOpts opts;
  EvalOpts eval;
  std::vector<double> q_values;
  std::string sens_param = "alpha";
  std::vector<double> sens_values;
  std::vector<double> sens_fractions;
  std::string scores_path;
  std::string direction = "higher";
  double q_alpha = 2.394;
  double f_critical = 2.2720;
  std::string control;

  CLI::App* select = app.add_subcommand(
      "select", "Solve on the full dataset and report the feature sets");
  add_dataset_flags(select, opts);
  add_solver_flags(select, opts);
  add_selection_flags(select, opts);
  select->add_option("--out", opts.out, "Output JSON path");
  select->add_option("--workers", opts.workers, "Worker threads");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Cross-validated evaluation of the selected features");
  add_dataset_flags(evaluate, opts);
  add_solver_flags(evaluate, opts);
  add_selection_flags(evaluate, opts);
  add_eval_flags(evaluate, eval);
  evaluate->add_option("--out", opts.out, "Output JSON path (CSV written alongside)");
  evaluate->add_option("--workers", opts.workers, "Worker threads across folds");

  CLI::App* sweep = app.add_subcommand(
      "sweep-q", "Cross-validate a list of personalization strictness values");
  add_dataset_flags(sweep, opts);
  add_solver_flags(sweep, opts);
  add_selection_flags(sweep, opts);
  add_eval_flags(sweep, eval);
  sweep->add_option("--q-values", q_values, "q values to sweep")->delimiter(',');
  sweep->add_option("--out", opts.out, "Output CSV path");
  sweep->add_option("--workers", opts.workers, "Worker threads across grid points");

  CLI::App* sensitivity = app.add_subcommand(
      "sensitivity", "Average precision over a parameter x fraction grid");
  add_dataset_flags(sensitivity, opts);
  add_solver_flags(sensitivity, opts);
  add_selection_flags(sensitivity, opts);
  add_eval_flags(sensitivity, eval);
  sensitivity->add_option("--param", sens_param, "Parameter to vary")
      ->check(CLI::IsMember({"alpha", "beta", "gamma", "lambda"}));
  sensitivity->add_option("--values", sens_values, "Values for the varied parameter")
      ->delimiter(',');
  sensitivity->add_option("--fractions", sens_fractions, "Global fractions to pair with")
      ->delimiter(',');
  sensitivity->add_option("--out", opts.out, "Output CSV path");
  sensitivity->add_option("--workers", opts.workers, "Worker threads across grid points");

  CLI::App* trace = app.add_subcommand(
      "trace", "Write the per-iteration objective values for one solve");
  add_dataset_flags(trace, opts);
  add_solver_flags(trace, opts);
  add_selection_flags(trace, opts);
  trace->add_option("--out", opts.out, "Output CSV path");

  CLI::App* stats = app.add_subcommand(
      "stats", "Friedman ranks and Bonferroni-Dunn critical difference");
  stats->add_option("--scores", scores_path, "Method-comparison CSV (datasets x methods)")
      ->required();
  stats->add_option("--direction", direction, "Whether higher scores are better")
      ->check(CLI::IsMember({"higher", "lower"}));
  stats->add_option("--q-alpha", q_alpha, "Critical value for the rank comparison");
  stats->add_option("--f-critical", f_critical, "Critical value for the F statistic");
  stats->add_option("--control", control, "Control method (default: best average rank)");
  stats->add_option("--out", opts.out, "Output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (select->parsed()) {
      cmd_select(opts);
    } else if (evaluate->parsed()) {
      cmd_evaluate(opts, eval);
    } else if (sweep->parsed()) {
      cmd_sweep_q(opts, eval, q_values);
    } else if (sensitivity->parsed()) {
      cmd_sensitivity(opts, eval, sens_param, sens_values, sens_fractions);
    } else if (trace->parsed()) {
      cmd_trace(opts);
    } else if (stats->parsed()) {
      cmd_stats(scores_path, direction, q_alpha, f_critical, control, opts.out);
    }
  } catch (const gpmfs::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const gpmfs::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const gpmfs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
