#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "gpmfs/evaluation.hpp"
#include "gpmfs/solver.hpp"
#include "gpmfs/stats.hpp"

namespace gpmfs {

inline constexpr const char* kSelectionSchema = "gpmfs.selection/1";
inline constexpr const char* kCvSchema = "gpmfs.cv/1";
inline constexpr const char* kStatsSchema = "gpmfs.stats/1";

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Current UTC time as ISO-8601; reports carry it in a generated_at field
/// that byte-level determinism checks are expected to strip.
std::string iso_timestamp();

nlohmann::ordered_json hyperparams_to_json(const HyperParams& params);

nlohmann::ordered_json selection_report_json(const Dataset& dataset,
                                             const PipelineResult& pipeline,
                                             const nlohmann::ordered_json& config);

nlohmann::ordered_json cv_report_json(const CvReport& report,
                                      const nlohmann::ordered_json& config);
std::string cv_report_csv(const CvReport& report);

std::string trace_csv(const std::vector<double>& trace);

struct StatsInput {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  Eigen::MatrixXd scores;  // datasets x methods
};

/// Parses a method-comparison table: header "dataset,<method>,...", one row
/// per dataset.
StatsInput parse_scores_csv(const std::string& text);

struct StatsConfig {
  bool higher_is_better = true;
  double q_alpha = 2.394;
  double f_critical = 2.2720;
  std::string control;  // empty = best average rank
};

nlohmann::ordered_json stats_report_json(const StatsInput& input,
                                         const StatsConfig& config);

}  // namespace gpmfs
