#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpmfs/dataset.hpp"
#include "gpmfs/errors.hpp"
#include "gpmfs/evaluation.hpp"
#include "gpmfs/selection.hpp"
#include "gpmfs/solver.hpp"
#include "gpmfs/stats.hpp"
#include "gpmfs/structures.hpp"

namespace py = pybind11;
using namespace gpmfs;

namespace {

std::vector<std::string> default_names(const char* prefix, Eigen::Index count) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    names.push_back(std::string(prefix) + "_" + std::to_string(i + 1));
  }
  return names;
}

py::dict metrics_to_dict(const MetricsReport& m) {
  py::dict d;
  d["hamming_loss"] = m.hamming_loss;
  d["micro_f1"] = m.micro_f1;
  d["macro_f1"] = m.macro_f1;
  d["one_error"] = m.one_error;
  d["average_precision"] = m.average_precision;
  d["skipped_instances"] = m.skipped_instances;
  return d;
}

PredictorKind predictor_from_string(const std::string& name) {
  if (name == "two-stage") return PredictorKind::kTwoStageKnn;
  if (name == "mlknn") return PredictorKind::kMlKnn;
  throw ArgumentError("predictor must be 'two-stage' or 'mlknn'");
}

}  // namespace

PYBIND11_MODULE(_gpmfs, m) {
  m.doc() = "Global + personalized multi-label feature selection";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](Eigen::MatrixXd features, Eigen::MatrixXd labels,
                       std::vector<std::string> feature_names,
                       std::vector<std::string> label_names, std::string source) {
             Dataset ds;
             ds.features = std::move(features);
             ds.labels = std::move(labels);
             ds.feature_names = feature_names.empty()
                                    ? default_names("feature", ds.features.cols())
                                    : std::move(feature_names);
             ds.label_names = label_names.empty()
                                  ? default_names("label", ds.labels.cols())
                                  : std::move(label_names);
             ds.source = std::move(source);
             validate(ds);
             return ds;
           }),
           py::arg("features"), py::arg("labels"),
           py::arg("feature_names") = std::vector<std::string>{},
           py::arg("label_names") = std::vector<std::string>{},
           py::arg("source") = std::string{})
      .def_readonly("features", &Dataset::features)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("feature_names", &Dataset::feature_names)
      .def_readonly("label_names", &Dataset::label_names)
      .def_readonly("source", &Dataset::source)
      .def("__repr__", [](const Dataset& ds) {
        return "<Dataset " + std::to_string(ds.instance_count()) + "x" +
               std::to_string(ds.feature_count()) + " features, " +
               std::to_string(ds.label_count()) + " labels>";
      });

  m.def(
      "parse_arff",
      [](const std::string& text, const std::vector<std::string>& label_names) {
        return parse_arff(text, label_names);
      },
      py::arg("text"), py::arg("label_names"));
  m.def(
      "parse_arff",
      [](const std::string& text, int label_count) {
        return parse_arff(text, label_count);
      },
      py::arg("text"), py::arg("label_count"));
  m.def("parse_csv", &parse_csv, py::arg("text"), py::arg("label_count"));
  m.def("parse_label_xml", &parse_label_xml, py::arg("text"));
  m.def("to_arff", &to_arff, py::arg("dataset"));
  m.def("to_csv", &to_csv, py::arg("dataset"));

  py::class_<StandardizationParams>(m, "StandardizationParams")
      .def_readonly("means", &StandardizationParams::means)
      .def_readonly("stddevs", &StandardizationParams::stddevs);
  m.def(
      "fit_standardizer",
      [](const Dataset& ds, std::vector<int> rows) {
        if (rows.empty()) {
          rows.resize(static_cast<std::size_t>(ds.instance_count()));
          for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
        }
        return fit_standardizer(ds, rows);
      },
      py::arg("dataset"), py::arg("rows") = std::vector<int>{});
  m.def("apply_standardizer", &apply_standardizer, py::arg("dataset"), py::arg("params"));
  m.def("select_rows", &select_rows, py::arg("dataset"), py::arg("rows"));

  py::class_<FoldAssignment>(m, "FoldAssignment")
      .def_readonly("fold_count", &FoldAssignment::fold_count)
      .def_readonly("seed", &FoldAssignment::seed)
      .def_readonly("assignment", &FoldAssignment::assignment)
      .def("test_rows", &FoldAssignment::test_rows, py::arg("fold"))
      .def("train_rows", &FoldAssignment::train_rows, py::arg("fold"));
  m.def("kfold_split", &kfold_split, py::arg("instance_count"), py::arg("fold_count"),
        py::arg("seed"));

  m.def(
      "pearson_matrix",
      [](const Eigen::MatrixXd& features) { return pearson_matrix(features).values; },
      py::arg("features"));
  m.def(
      "knn_affinity",
      [](const Eigen::MatrixXd& features, int k, double sigma) {
        AffinityGraph g = knn_affinity(features, k, sigma);
        return py::make_tuple(g.weights, g.sigma);
      },
      py::arg("features"), py::arg("k"), py::arg("sigma") = 0.0,
      "Returns (weights, sigma_used); sigma <= 0 selects the width automatically");
  m.def(
      "laplacian",
      [](const Eigen::MatrixXd& weights) {
        AffinityGraph g;
        g.weights = weights;
        return laplacian(g).values;
      },
      py::arg("weights"));

  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<>())
      .def_readwrite("alpha", &HyperParams::alpha)
      .def_readwrite("beta", &HyperParams::beta)
      .def_readwrite("gamma", &HyperParams::gamma)
      .def_readwrite("lambda_", &HyperParams::lambda)
      .def_readwrite("p", &HyperParams::p)
      .def_readwrite("q", &HyperParams::q)
      .def_readwrite("global_fraction", &HyperParams::global_fraction)
      .def_readwrite("graph_k", &HyperParams::graph_k)
      .def_readwrite("sigma", &HyperParams::sigma)
      .def_readwrite("max_iter", &HyperParams::max_iter)
      .def_readwrite("rel_tol", &HyperParams::rel_tol)
      .def_readwrite("epsilon_norm", &HyperParams::epsilon_norm)
      .def_readwrite("ridge_jitter", &HyperParams::ridge_jitter)
      .def("validate", &HyperParams::validate);

  py::class_<SolverState>(m, "SolverState")
      .def_readonly("W", &SolverState::W)
      .def_readonly("V", &SolverState::V)
      .def_readonly("U", &SolverState::U)
      .def_readonly("B", &SolverState::B)
      .def_readonly("trace", &SolverState::trace);
  m.def(
      "solve",
      [](const Dataset& ds, const Eigen::MatrixXd& correlation,
         const Eigen::MatrixXd& lap, const HyperParams& params) {
        PearsonMatrix p;
        p.values = correlation;
        LaplacianMatrix l;
        l.values = lap;
        return solve(ds, p, l, params);
      },
      py::arg("dataset"), py::arg("correlation"), py::arg("laplacian"),
      py::arg("params"));

  py::class_<FeatureSelection>(m, "FeatureSelection")
      .def_readonly("global_", &FeatureSelection::global)
      .def_readonly("personalized", &FeatureSelection::personalized)
      .def_readonly("complete", &FeatureSelection::complete)
      .def_readonly("row_norms", &FeatureSelection::row_norms)
      .def_readonly("q", &FeatureSelection::q)
      .def_readonly("global_fraction", &FeatureSelection::global_fraction);
  m.def("select_features", &select_features, py::arg("W"), py::arg("params"));
  m.def("rank_global", &rank_global, py::arg("W"), py::arg("fraction"));
  m.def("personalized_features", &personalized_features, py::arg("W"),
        py::arg("global_"), py::arg("q"));

  m.def(
      "two_stage_knn_predict",
      [](const Dataset& train, const Dataset& test, const FeatureSelection& sel,
         int candidate_k, int final_k) {
        PredictionResult r = two_stage_knn_predict(train, test, sel, candidate_k, final_k);
        return py::make_tuple(r.scores, r.decisions);
      },
      py::arg("train"), py::arg("test"), py::arg("selection"),
      py::arg("candidate_k") = 20, py::arg("final_k") = 10);
  m.def(
      "mlknn_predict",
      [](const Dataset& train, const Dataset& test, const std::vector<int>& features,
         int k, double smoothing) {
        PredictionResult r = mlknn_predict(train, test, features, k, smoothing);
        return py::make_tuple(r.scores, r.decisions);
      },
      py::arg("train"), py::arg("test"), py::arg("features"), py::arg("k") = 10,
      py::arg("smoothing") = 1.0);

  m.def("hamming_loss", &hamming_loss, py::arg("truth"), py::arg("decisions"));
  m.def("micro_f1", &micro_f1, py::arg("truth"), py::arg("decisions"));
  m.def("macro_f1", &macro_f1, py::arg("truth"), py::arg("decisions"));
  m.def(
      "one_error",
      [](const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores) {
        return one_error(truth, scores);
      },
      py::arg("truth"), py::arg("scores"));
  m.def(
      "average_precision",
      [](const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores) {
        return average_precision(truth, scores);
      },
      py::arg("truth"), py::arg("scores"));
  m.def(
      "compute_metrics",
      [](const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores,
         const Eigen::MatrixXd& decisions) {
        return metrics_to_dict(compute_metrics(truth, scores, decisions));
      },
      py::arg("truth"), py::arg("scores"), py::arg("decisions"));

  m.def(
      "cross_validate",
      [](const Dataset& ds, const HyperParams& params, int folds, std::uint64_t seed,
         int candidate_k, int final_k, const std::string& predictor, int workers) {
        EvalOptions options;
        options.candidate_k = candidate_k;
        options.final_k = final_k;
        options.predictor = predictor_from_string(predictor);
        options.workers = workers;
        CvReport report = cross_validate(ds, params, folds, seed, options);
        py::dict d;
        d["folds"] = report.folds;
        d["seed"] = report.seed;
        py::list per_fold;
        for (const FoldResult& fr : report.per_fold) {
          py::dict f = metrics_to_dict(fr.metrics);
          f["fold"] = fr.fold;
          f["global_size"] = fr.selection.global_size;
          f["mean_personalized"] = fr.selection.mean_personalized;
          f["personalized_proportion"] = fr.selection.personalized_proportion;
          per_fold.append(f);
        }
        d["per_fold"] = per_fold;
        py::dict mean = metrics_to_dict(report.mean);
        mean["global_size"] = report.mean_global_size;
        mean["mean_personalized"] = report.mean_personalized;
        mean["personalized_proportion"] = report.mean_personalized_proportion;
        d["mean"] = mean;
        return d;
      },
      py::arg("dataset"), py::arg("params"), py::arg("folds") = 5, py::arg("seed") = 1,
      py::arg("candidate_k") = 20, py::arg("final_k") = 10,
      py::arg("predictor") = "two-stage", py::arg("workers") = 1);

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("standardized", &PipelineResult::standardized)
      .def_readonly("selection", &PipelineResult::selection)
      .def_property_readonly("W",
                             [](const PipelineResult& r) { return r.state.W; })
      .def_property_readonly("trace",
                             [](const PipelineResult& r) { return r.state.trace; })
      .def_property_readonly("sigma_used",
                             [](const PipelineResult& r) { return r.graph.sigma; })
      .def_property_readonly(
          "correlation", [](const PipelineResult& r) { return r.correlation.values; });
  m.def("run_pipeline", &run_pipeline, py::arg("dataset"), py::arg("params"));

  m.def(
      "rank_table",
      [](const Eigen::MatrixXd& scores, bool higher_is_better) {
        return make_rank_table(scores, higher_is_better).ranks;
      },
      py::arg("scores"), py::arg("higher_is_better") = true);
  m.def(
      "average_ranks",
      [](const Eigen::MatrixXd& scores, bool higher_is_better) {
        return average_ranks(make_rank_table(scores, higher_is_better));
      },
      py::arg("scores"), py::arg("higher_is_better") = true);
  m.def(
      "friedman_statistic",
      [](const Eigen::MatrixXd& scores, bool higher_is_better) {
        FriedmanResult r = friedman_statistic(make_rank_table(scores, higher_is_better));
        py::dict d;
        d["chi_squared"] = r.chi_squared;
        d["f_statistic"] = r.f_statistic;
        d["degenerate"] = r.degenerate;
        return d;
      },
      py::arg("scores"), py::arg("higher_is_better") = true);
  m.def("bonferroni_dunn_cd", &bonferroni_dunn_cd, py::arg("q_alpha"),
        py::arg("methods"), py::arg("datasets"));
}
