#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace gpmfs {

/// In-memory multi-label dataset: real-valued features plus binary labels.
struct Dataset {
  Eigen::MatrixXd features;  // n x F
  Eigen::MatrixXd labels;    // n x L, entries exactly 0.0 or 1.0
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;
  std::string source;

  Eigen::Index instance_count() const { return features.rows(); }
  Eigen::Index feature_count() const { return features.cols(); }
  Eigen::Index label_count() const { return labels.cols(); }
};

/// Labels are identified either by name (ARFF + XML workflows) or as the
/// trailing N columns/attributes.
using LabelSpec = std::variant<std::vector<std::string>, int>;

/// Throws ValidationError if shapes or label values are out of domain.
void validate(const Dataset& dataset);

/// Parses ARFF text. Numeric attributes (and nominal attributes whose
/// categories are all numeric tokens) become features; label attributes must
/// be nominal with categories drawn from {0,1}.
Dataset parse_arff(const std::string& text, const LabelSpec& label_spec);

/// Parses rectangular CSV whose last label_count columns are labels. A single
/// header row is auto-detected (first row with any non-numeric cell).
Dataset parse_csv(const std::string& text, int label_count);

/// Extracts the label names from a Mulan-style labels XML document, in file
/// order.
std::vector<std::string> parse_label_xml(const std::string& text);

/// Serializers; both round-trip through their parser to an identical Dataset.
std::string to_arff(const Dataset& dataset);
std::string to_csv(const Dataset& dataset);

struct StandardizationParams {
  Eigen::VectorXd means;
  Eigen::VectorXd stddevs;  // population standard deviations
};

/// Column means/stddevs computed over the given rows only.
StandardizationParams fit_standardizer(const Dataset& dataset,
                                       const std::vector<int>& rows);

/// Returns a copy with z-scored features. Zero-variance columns become
/// exactly 0.
Dataset apply_standardizer(const Dataset& dataset,
                           const StandardizationParams& params);

/// Row subset in the given order; names and source are preserved.
Dataset select_rows(const Dataset& dataset, const std::vector<int>& rows);

struct FoldAssignment {
  int fold_count = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignment;  // assignment[i] = fold of instance i

  std::vector<int> test_rows(int fold) const;
  std::vector<int> train_rows(int fold) const;
};

/// Seeded k-fold split; fold sizes differ by at most one.
FoldAssignment kfold_split(int instance_count, int fold_count,
                           std::uint64_t seed);

}  // namespace gpmfs
