#include "gpmfs/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "gpmfs/errors.hpp"
#include "gpmfs/rng.hpp"

namespace gpmfs {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool istarts_with(const std::string& s, const std::string& prefix) {
  if (s.size() < prefix.size()) return false;
  return lower(s.substr(0, prefix.size())) == lower(prefix);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') ||
                        (s.front() == '"' && s.back() == '"'))) {
    const char q = s.front();
    std::string inner = s.substr(1, s.size() - 2);
    // Collapse doubled quote characters.
    std::string out;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      out.push_back(inner[i]);
      if (inner[i] == q && i + 1 < inner.size() && inner[i + 1] == q) ++i;
    }
    return out;
  }
  return s;
}

// Comma split honoring single/double quotes; tokens come back trimmed and
// unquoted.
std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> tokens;
  std::string current;
  char quote = '\0';
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote != '\0') {
      current.push_back(c);
      if (c == quote) {
        if (i + 1 < line.size() && line[i + 1] == quote) {
          current.push_back(line[++i]);
        } else {
          quote = '\0';
        }
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      current.push_back(c);
    } else if (c == ',') {
      tokens.push_back(strip_quotes(trim(current)));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  tokens.push_back(strip_quotes(trim(current)));
  return tokens;
}

bool parse_number(const std::string& token, double* out) {
  if (token.empty()) return false;
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + token.size()) return false;
  *out = v;
  return true;
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
  char buf[40];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string quote_if_needed(const std::string& name, char quote) {
  bool needs = name.empty();
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '%' ||
        c == quote || c == '{' || c == '}') {
      needs = true;
      break;
    }
  }
  if (!needs) return name;
  std::string out(1, quote);
  for (char c : name) {
    out.push_back(c);
    if (c == quote) out.push_back(c);  // doubled-quote escape
  }
  out.push_back(quote);
  return out;
}

struct ArffAttribute {
  std::string name;
  bool nominal = false;
  std::vector<std::string> categories;
};

ArffAttribute parse_attribute_line(const std::string& line, int line_no) {
  // line starts with "@attribute" (case-insensitive)
  std::string rest = trim(line.substr(std::string("@attribute").size()));
  if (rest.empty()) throw ParseError("attribute declaration without a name", line_no);
  ArffAttribute attr;
  std::size_t pos = 0;
  if (rest[0] == '\'' || rest[0] == '"') {
    const char q = rest[0];
    std::size_t end = 1;
    while (end < rest.size()) {
      if (rest[end] == q) {
        if (end + 1 < rest.size() && rest[end + 1] == q) {
          end += 2;
          continue;
        }
        break;
      }
      ++end;
    }
    if (end >= rest.size()) throw ParseError("unterminated quoted attribute name", line_no);
    attr.name = strip_quotes(rest.substr(0, end + 1));
    pos = end + 1;
  } else {
    pos = rest.find_first_of(" \t");
    if (pos == std::string::npos)
      throw ParseError("attribute declaration without a type", line_no);
    attr.name = rest.substr(0, pos);
  }
  std::string type = trim(rest.substr(pos));
  if (type.empty()) throw ParseError("attribute declaration without a type", line_no);
  if (type.front() == '{') {
    if (type.back() != '}')
      throw ParseError("unterminated nominal category list", line_no);
    attr.nominal = true;
    for (const std::string& cat : split_row(type.substr(1, type.size() - 2))) {
      attr.categories.push_back(cat);
    }
    if (attr.categories.empty() || (attr.categories.size() == 1 && attr.categories[0].empty()))
      throw ParseError("empty nominal category list", line_no);
  } else {
    std::string kind = lower(type);
    if (kind != "numeric" && kind != "real" && kind != "integer") {
      throw ValidationError("unsupported attribute type '" + type +
                            "' for attribute '" + attr.name + "'");
    }
  }
  return attr;
}

bool is_binary_nominal(const ArffAttribute& attr) {
  if (!attr.nominal) return false;
  for (const std::string& cat : attr.categories) {
    if (cat != "0" && cat != "1") return false;
  }
  return true;
}

}  // namespace

void validate(const Dataset& dataset) {
  const Eigen::Index n = dataset.features.rows();
  if (n < 1) throw ValidationError("dataset has no instances");
  if (dataset.features.cols() < 1) throw ValidationError("dataset has no features");
  if (dataset.labels.cols() < 1) throw ValidationError("dataset has no labels");
  if (dataset.labels.rows() != n)
    throw ValidationError("feature and label row counts disagree");
  if (static_cast<Eigen::Index>(dataset.feature_names.size()) != dataset.features.cols())
    throw ValidationError("feature name count disagrees with feature columns");
  if (static_cast<Eigen::Index>(dataset.label_names.size()) != dataset.labels.cols())
    throw ValidationError("label name count disagrees with label columns");
  if (!dataset.features.allFinite())
    throw ValidationError("features contain non-finite values");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dataset.labels.cols(); ++j) {
      double v = dataset.labels(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("label '" + dataset.label_names[static_cast<std::size_t>(j)] +
                              "' has non-binary value at instance " + std::to_string(i));
      }
    }
  }
}

Dataset parse_arff(const std::string& text, const LabelSpec& label_spec) {
  std::vector<ArffAttribute> attrs;
  std::string relation;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;
  bool in_data = false;

  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const int line_no = static_cast<int>(idx) + 1;
    std::string line = trim(lines[idx]);
    if (line.empty() || line[0] == '%') continue;
    if (!in_data) {
      if (istarts_with(line, "@relation")) {
        relation = strip_quotes(trim(line.substr(std::string("@relation").size())));
      } else if (istarts_with(line, "@attribute")) {
        attrs.push_back(parse_attribute_line(line, line_no));
      } else if (istarts_with(line, "@data")) {
        in_data = true;
      } else {
        throw ParseError("unexpected line in ARFF header", line_no);
      }
    } else {
      if (line[0] == '{')
        throw ParseError("sparse ARFF rows are not supported", line_no);
      std::vector<std::string> tokens = split_row(line);
      if (tokens.size() != attrs.size()) {
        throw ParseError("expected " + std::to_string(attrs.size()) + " values, got " +
                             std::to_string(tokens.size()),
                         line_no);
      }
      rows.push_back(std::move(tokens));
      row_lines.push_back(line_no);
    }
  }
  if (!in_data)
    throw ParseError("missing @data section", static_cast<int>(lines.size()));
  if (attrs.empty())
    throw ParseError("no attribute declarations", static_cast<int>(lines.size()));
  if (rows.empty()) throw ValidationError("dataset has no instances");

  // Resolve which attributes are labels.
  std::vector<int> label_attr;  // label column -> attribute index
  if (const auto* names = std::get_if<std::vector<std::string>>(&label_spec)) {
    if (names->empty()) throw ArgumentError("label name list is empty");
    for (const std::string& name : *names) {
      auto it = std::find_if(attrs.begin(), attrs.end(),
                             [&](const ArffAttribute& a) { return a.name == name; });
      if (it == attrs.end())
        throw ValidationError("label attribute '" + name + "' not found in ARFF header");
      label_attr.push_back(static_cast<int>(it - attrs.begin()));
    }
  } else {
    const int count = std::get<int>(label_spec);
    if (count < 1) throw ArgumentError("label count must be positive");
    if (count >= static_cast<int>(attrs.size()))
      throw ArgumentError("label count leaves no feature attributes");
    for (int i = static_cast<int>(attrs.size()) - count;
         i < static_cast<int>(attrs.size()); ++i) {
      label_attr.push_back(i);
    }
  }
  std::vector<char> is_label(attrs.size(), 0);
  for (int a : label_attr) {
    if (is_label[static_cast<std::size_t>(a)])
      throw ArgumentError("label attribute '" + attrs[static_cast<std::size_t>(a)].name +
                          "' listed twice");
    is_label[static_cast<std::size_t>(a)] = 1;
  }
  for (int a : label_attr) {
    const ArffAttribute& attr = attrs[static_cast<std::size_t>(a)];
    if (!is_binary_nominal(attr)) {
      throw ValidationError("label attribute '" + attr.name +
                            "' must be nominal with categories {0,1}");
    }
  }

  Dataset ds;
  ds.source = relation;
  std::vector<int> feature_attr;
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    if (is_label[a]) continue;
    const ArffAttribute& attr = attrs[a];
    if (attr.nominal) {
      // Nominal feature attributes are accepted when every category is a
      // number (integer-coded categorical features); anything else is out of
      // scope for a real-valued feature matrix.
      for (const std::string& cat : attr.categories) {
        double unused;
        if (!parse_number(cat, &unused)) {
          throw ValidationError("nominal feature attribute '" + attr.name +
                                "' has non-numeric category '" + cat + "'");
        }
      }
    }
    feature_attr.push_back(static_cast<int>(a));
    ds.feature_names.push_back(attr.name);
  }
  for (int a : label_attr) ds.label_names.push_back(attrs[static_cast<std::size_t>(a)].name);
  if (feature_attr.empty()) throw ValidationError("dataset has no features");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  ds.features.resize(n, static_cast<Eigen::Index>(feature_attr.size()));
  ds.labels.resize(n, static_cast<Eigen::Index>(label_attr.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::vector<std::string>& tokens = rows[static_cast<std::size_t>(r)];
    const int line_no = row_lines[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < feature_attr.size(); ++c) {
      const std::string& tok = tokens[static_cast<std::size_t>(feature_attr[c])];
      const std::string& name = attrs[static_cast<std::size_t>(feature_attr[c])].name;
      if (tok == "?")
        throw ValidationError("missing value for attribute '" + name + "' on line " +
                              std::to_string(line_no));
      double v;
      if (!parse_number(tok, &v))
        throw ParseError("invalid numeric value '" + tok + "' for attribute '" + name + "'",
                         line_no);
      ds.features(r, static_cast<Eigen::Index>(c)) = v;
    }
    for (std::size_t c = 0; c < label_attr.size(); ++c) {
      const std::string& tok = tokens[static_cast<std::size_t>(label_attr[c])];
      const std::string& name = attrs[static_cast<std::size_t>(label_attr[c])].name;
      if (tok == "?")
        throw ValidationError("missing value for attribute '" + name + "' on line " +
                              std::to_string(line_no));
      if (tok == "0") {
        ds.labels(r, static_cast<Eigen::Index>(c)) = 0.0;
      } else if (tok == "1") {
        ds.labels(r, static_cast<Eigen::Index>(c)) = 1.0;
      } else {
        throw ValidationError("label attribute '" + name + "' has non-binary value '" + tok +
                              "' on line " + std::to_string(line_no));
      }
    }
  }
  validate(ds);
  return ds;
}

Dataset parse_csv(const std::string& text, int label_count) {
  if (label_count < 1) throw ArgumentError("label count must be positive");
  std::vector<std::string> lines = split_lines(text);

  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    std::string line = trim(lines[idx]);
    if (line.empty()) continue;
    rows.push_back(split_row(line));
    row_lines.push_back(static_cast<int>(idx) + 1);
  }
  if (rows.empty()) throw ValidationError("dataset has no instances");

  // Header auto-detection: a first row with any non-numeric cell is a header.
  bool has_header = false;
  for (const std::string& tok : rows[0]) {
    double unused;
    if (!parse_number(tok, &unused)) {
      has_header = true;
      break;
    }
  }
  std::vector<std::string> header;
  if (has_header) {
    header = rows[0];
    rows.erase(rows.begin());
    row_lines.erase(row_lines.begin());
    if (rows.empty()) throw ValidationError("dataset has no instances");
  }

  const std::size_t ncols = has_header ? header.size() : rows[0].size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != ncols) {
      throw ParseError("ragged row: expected " + std::to_string(ncols) + " cells, got " +
                           std::to_string(rows[r].size()),
                       row_lines[r]);
    }
  }
  if (static_cast<std::size_t>(label_count) >= ncols)
    throw ArgumentError("label count leaves no feature columns");
  const std::size_t nfeat = ncols - static_cast<std::size_t>(label_count);

  Dataset ds;
  for (std::size_t c = 0; c < ncols; ++c) {
    std::string name;
    if (has_header) {
      name = header[c];
    } else if (c < nfeat) {
      name = "feature_" + std::to_string(c + 1);
    } else {
      name = "label_" + std::to_string(c - nfeat + 1);
    }
    if (c < nfeat) {
      ds.feature_names.push_back(name);
    } else {
      ds.label_names.push_back(name);
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  ds.features.resize(n, static_cast<Eigen::Index>(nfeat));
  ds.labels.resize(n, static_cast<Eigen::Index>(label_count));
  for (Eigen::Index r = 0; r < n; ++r) {
    const int line_no = row_lines[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < ncols; ++c) {
      const std::string& tok = rows[static_cast<std::size_t>(r)][c];
      double v;
      if (!parse_number(tok, &v))
        throw ParseError("invalid numeric value '" + tok + "'", line_no);
      if (c < nfeat) {
        ds.features(r, static_cast<Eigen::Index>(c)) = v;
      } else {
        if (v != 0.0 && v != 1.0) {
          throw ValidationError("label column '" + ds.label_names[c - nfeat] +
                                "' has non-binary value '" + tok + "' on line " +
                                std::to_string(line_no));
        }
        ds.labels(r, static_cast<Eigen::Index>(c - nfeat)) = v;
      }
    }
  }
  validate(ds);
  return ds;
}

std::vector<std::string> parse_label_xml(const std::string& text) {
  // Minimal scan for <label name="..."> elements, in document order.
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = text.find("<label", pos)) != std::string::npos) {
    // Skip <labels ...> elements.
    std::size_t after = pos + 6;
    if (after < text.size() &&
        (std::isalnum(static_cast<unsigned char>(text[after])) || text[after] == '_')) {
      pos = after;
      continue;
    }
    std::size_t close = text.find('>', pos);
    if (close == std::string::npos) throw ParseError("unterminated <label> element", 1);
    std::string element = text.substr(pos, close - pos);
    std::size_t name_pos = element.find("name");
    if (name_pos == std::string::npos)
      throw ParseError("<label> element without a name attribute", 1);
    std::size_t eq = element.find('=', name_pos);
    if (eq == std::string::npos)
      throw ParseError("<label> element without a name attribute", 1);
    std::size_t q1 = element.find_first_of("\"'", eq);
    if (q1 == std::string::npos)
      throw ParseError("<label> name attribute is not quoted", 1);
    char q = element[q1];
    std::size_t q2 = element.find(q, q1 + 1);
    if (q2 == std::string::npos)
      throw ParseError("unterminated <label> name attribute", 1);
    names.push_back(element.substr(q1 + 1, q2 - q1 - 1));
    pos = close + 1;
  }
  if (names.empty()) throw ValidationError("labels XML contains no <label> elements");
  return names;
}

std::string to_arff(const Dataset& dataset) {
  validate(dataset);
  std::ostringstream out;
  out << "@relation "
      << quote_if_needed(dataset.source.empty() ? "dataset" : dataset.source, '\'') << "\n\n";
  for (const std::string& name : dataset.feature_names) {
    out << "@attribute " << quote_if_needed(name, '\'') << " numeric\n";
  }
  for (const std::string& name : dataset.label_names) {
    out << "@attribute " << quote_if_needed(name, '\'') << " {0,1}\n";
  }
  out << "\n@data\n";
  for (Eigen::Index r = 0; r < dataset.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < dataset.features.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(dataset.features(r, c));
    }
    for (Eigen::Index c = 0; c < dataset.labels.cols(); ++c) {
      out << ',' << (dataset.labels(r, c) == 1.0 ? '1' : '0');
    }
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const Dataset& dataset) {
  validate(dataset);
  std::ostringstream out;
  auto quote_csv = [](const std::string& name) {
    if (name.find_first_of(",\"") == std::string::npos && name == trim(name) &&
        !name.empty()) {
      double unused;
      if (!parse_number(name, &unused)) return name;  // numeric names need quoting
    }
    std::string quoted = "\"";
    for (char c : name) {
      quoted.push_back(c);
      if (c == '"') quoted.push_back('"');
    }
    quoted.push_back('"');
    return quoted;
  };
  for (std::size_t c = 0; c < dataset.feature_names.size(); ++c) {
    if (c > 0) out << ',';
    out << quote_csv(dataset.feature_names[c]);
  }
  for (const std::string& name : dataset.label_names) out << ',' << quote_csv(name);
  out << '\n';
  for (Eigen::Index r = 0; r < dataset.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < dataset.features.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(dataset.features(r, c));
    }
    for (Eigen::Index c = 0; c < dataset.labels.cols(); ++c) {
      out << ',' << (dataset.labels(r, c) == 1.0 ? '1' : '0');
    }
    out << '\n';
  }
  return out.str();
}

StandardizationParams fit_standardizer(const Dataset& dataset,
                                       const std::vector<int>& rows) {
  if (rows.empty()) throw ArgumentError("fit_standardizer: row list is empty");
  const Eigen::Index n = dataset.features.rows();
  for (int r : rows) {
    if (r < 0 || r >= n)
      throw ArgumentError("fit_standardizer: row index " + std::to_string(r) +
                          " out of range");
  }
  const Eigen::Index f = dataset.features.cols();
  StandardizationParams params;
  params.means = Eigen::VectorXd::Zero(f);
  params.stddevs = Eigen::VectorXd::Zero(f);
  const double m = static_cast<double>(rows.size());
  for (int r : rows) params.means += dataset.features.row(r).transpose();
  params.means /= m;
  for (int r : rows) {
    Eigen::VectorXd d = dataset.features.row(r).transpose() - params.means;
    params.stddevs += d.cwiseProduct(d);
  }
  params.stddevs = (params.stddevs / m).cwiseSqrt();
  return params;
}

Dataset apply_standardizer(const Dataset& dataset,
                           const StandardizationParams& params) {
  if (params.means.size() != dataset.features.cols() ||
      params.stddevs.size() != dataset.features.cols()) {
    throw ArgumentError("apply_standardizer: parameter length disagrees with features");
  }
  Dataset out = dataset;
  for (Eigen::Index c = 0; c < out.features.cols(); ++c) {
    const double sd = params.stddevs(c);
    if (sd > 0.0) {
      out.features.col(c) = (dataset.features.col(c).array() - params.means(c)) / sd;
    } else {
      out.features.col(c).setZero();
    }
  }
  return out;
}

Dataset select_rows(const Dataset& dataset, const std::vector<int>& rows) {
  const Eigen::Index n = dataset.features.rows();
  Dataset out;
  out.feature_names = dataset.feature_names;
  out.label_names = dataset.label_names;
  out.source = dataset.source;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dataset.features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()), dataset.labels.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= n)
      throw ArgumentError("select_rows: row index " + std::to_string(rows[i]) +
                          " out of range");
    out.features.row(static_cast<Eigen::Index>(i)) = dataset.features.row(rows[i]);
    out.labels.row(static_cast<Eigen::Index>(i)) = dataset.labels.row(rows[i]);
  }
  return out;
}

std::vector<int> FoldAssignment::test_rows(int fold) const {
  if (fold < 0 || fold >= fold_count)
    throw ArgumentError("fold index " + std::to_string(fold) + " out of range");
  std::vector<int> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

std::vector<int> FoldAssignment::train_rows(int fold) const {
  if (fold < 0 || fold >= fold_count)
    throw ArgumentError("fold index " + std::to_string(fold) + " out of range");
  std::vector<int> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

FoldAssignment kfold_split(int instance_count, int fold_count, std::uint64_t seed) {
  if (instance_count < 2) throw ArgumentError("kfold_split: need at least 2 instances");
  if (fold_count < 2 || fold_count > instance_count)
    throw ArgumentError("kfold_split: fold count must be in [2, instance count]");
  std::vector<int> perm(static_cast<std::size_t>(instance_count));
  std::iota(perm.begin(), perm.end(), 0);
  SeededRng rng(seed);
  shuffle(perm, rng);
  FoldAssignment fa;
  fa.fold_count = fold_count;
  fa.seed = seed;
  fa.assignment.assign(static_cast<std::size_t>(instance_count), 0);
  for (int pos = 0; pos < instance_count; ++pos) {
    fa.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] =
        pos % fold_count;
  }
  return fa;
}

}  // namespace gpmfs
