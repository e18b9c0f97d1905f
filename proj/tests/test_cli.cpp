#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gpmfs/reports.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = "\"" + testutil::cli_path() + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.output.append(buf, got);
  }
  int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("gpmfs_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

std::string flags_args() {
  std::string dir = testutil::data_dir();
  return "--dataset \"" + dir + "/flags.arff\" --xml \"" + dir + "/flags.xml\"";
}

// reports carry a timestamp; drop it before comparing runs
std::string without_timestamp(const std::string& path) {
  std::istringstream in(gpmfs::read_file(path));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("generated_at") == std::string::npos) out << line << '\n';
  }
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("cli: version and help exit cleanly") {
  CliResult version = run_cli("--version");
  CHECK(version.code == 0);
  CHECK(version.output.find("gpmfs") != std::string::npos);

  CliResult help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK(help.output.find("select") != std::string::npos);
  CHECK(help.output.find("evaluate") != std::string::npos);
  CHECK(help.output.find("sweep-q") != std::string::npos);
  CHECK(help.output.find("sensitivity") != std::string::npos);
  CHECK(help.output.find("trace") != std::string::npos);
  CHECK(help.output.find("stats") != std::string::npos);
}

TEST_CASE("cli: argument problems exit with code 2") {
  CHECK(run_cli("").code == 2);               // a subcommand is required
  CHECK(run_cli("select").code == 2);         // --dataset is required
  CHECK(run_cli("frobnicate").code == 2);     // unknown subcommand
  CHECK(run_cli("select --dataset x.arff --label-count 2 --no-such-flag").code == 2);
  CHECK(run_cli("select --dataset x.arff --format yaml --label-count 2").code == 2);
  CHECK(run_cli("stats").code == 2);          // --scores is required

  TempDir tmp;
  std::string base = flags_args() + " --out " + tmp.file("out.json");
  CHECK(run_cli("select " + base + " --label-count 7").code == 2);  // two label sources
  CHECK(run_cli("select " + base + " --alpha -1").code == 2);
  CHECK(run_cli("select " + base + " --sigma nonsense").code == 2);
  CHECK(run_cli("select " + base + " --global-fraction 0").code == 2);
  CHECK(run_cli("evaluate " + base + " --predictor psychic").code == 2);
  CHECK(run_cli("select --config " + tmp.file("missing.toml") + " " + base).code == 2);
}

TEST_CASE("cli: unreadable input files exit with code 3") {
  TempDir tmp;
  CliResult r = run_cli("select --dataset " + tmp.file("absent.arff") +
                        " --label-count 2 --out " + tmp.file("out.json"));
  CHECK(r.code == 3);
  CHECK(r.output.find("error") != std::string::npos);

  CHECK(run_cli("stats --scores " + tmp.file("absent.csv")).code == 3);
}

TEST_CASE("cli: select writes a structured report") {
  TempDir tmp;
  std::string out = tmp.file("selection.json");
  CliResult r = run_cli("select " + flags_args() + " --out " + out);
  REQUIRE(r.code == 0);
  CHECK(r.output.find("wrote") != std::string::npos);

  json report = json::parse(gpmfs::read_file(out));
  CHECK(report["schema"] == "gpmfs.selection/1");
  CHECK(report["dataset"]["instances"] == 194);
  CHECK(report["dataset"]["features"] == 19);
  CHECK(report["dataset"]["labels"] == 7);
  CHECK(report["config"]["params"]["sigma"] == "auto");
  CHECK(report["sigma_used"].get<double>() > 0.0);

  // round(0.2 * 19) = 4 global features, ordered by weight-row norm
  REQUIRE(report["global"].size() == 4);
  double previous = 1e300;
  for (const auto& entry : report["global"]) {
    CHECK(entry.contains("index"));
    CHECK(entry.contains("name"));
    double norm = entry["norm"].get<double>();
    CHECK(norm <= previous);
    previous = norm;
  }

  REQUIRE(report["per_label"].size() == 7);
  for (const auto& entry : report["per_label"]) {
    // complete starts with the global order
    REQUIRE(entry["complete"].size() >= 4);
    for (std::size_t g = 0; g < 4; ++g) {
      CHECK(entry["complete"][g] == report["global"][g]["index"]);
    }
    CHECK(entry["complete"].size() == 4 + entry["personalized"].size());
  }

  CHECK(report["stats"]["global_size"] == 4);
  CHECK(report["row_norms"].size() == 19);
  CHECK(report["objective_trace"].size() >= 1);
}

TEST_CASE("cli: select output is deterministic apart from the timestamp") {
  TempDir tmp;
  std::string first = tmp.file("a.json");
  std::string second = tmp.file("b.json");
  REQUIRE(run_cli("select " + flags_args() + " --max-iter 5 --out " + first).code == 0);
  REQUIRE(run_cli("select " + flags_args() + " --max-iter 5 --out " + second).code == 0);
  CHECK(without_timestamp(first) == without_timestamp(second));
}

TEST_CASE("cli: trace writes one row per iteration") {
  TempDir tmp;
  std::string out = tmp.file("trace.csv");
  CliResult r =
      run_cli("trace " + flags_args() + " --max-iter 6 --tol 0 --out " + out);
  REQUIRE(r.code == 0);

  std::vector<std::string> rows = lines_of(gpmfs::read_file(out));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "iteration,objective");
  double previous = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::size_t comma = rows[i].find(',');
    REQUIRE(comma != std::string::npos);
    CHECK(rows[i].substr(0, comma) == std::to_string(i));
    double value = std::stod(rows[i].substr(comma + 1));
    if (i > 1) CHECK(value <= previous + 1e-8 * std::abs(previous));
    previous = value;
  }
}

TEST_CASE("cli: evaluate writes JSON and CSV reports") {
  TempDir tmp;
  std::string out = tmp.file("evaluation.json");
  CliResult r = run_cli("evaluate " + flags_args() +
                        " --folds 3 --seed 1 --max-iter 5 --out " + out);
  REQUIRE(r.code == 0);
  CHECK(r.output.find("mean hamming_loss") != std::string::npos);
  CHECK(r.output.find("mean average_precision") != std::string::npos);

  json report = json::parse(gpmfs::read_file(out));
  CHECK(report["schema"] == "gpmfs.cv/1");
  CHECK(report["folds"] == 3);
  CHECK(report["seed"] == 1);
  REQUIRE(report["per_fold"].size() == 3);
  for (const auto& fold : report["per_fold"]) {
    double hl = fold["hamming_loss"].get<double>();
    CHECK(hl >= 0.0);
    CHECK(hl <= 1.0);
    double ap = fold["average_precision"].get<double>();
    CHECK(ap >= 0.0);
    CHECK(ap <= 1.0);
  }
  CHECK(report["mean"].contains("macro_f1"));
  CHECK(report["mean"]["skipped_instances"].is_number_integer());

  std::vector<std::string> rows = lines_of(gpmfs::read_file(tmp.file("evaluation.csv")));
  REQUIRE(rows.size() == 5);  // header, three folds, mean
  CHECK(rows[0].rfind("fold,hamming_loss", 0) == 0);
  CHECK(rows[4].rfind("mean,", 0) == 0);
}

TEST_CASE("cli: evaluate is stable across worker counts") {
  TempDir tmp;
  std::string serial = tmp.file("serial.json");
  std::string parallel = tmp.file("parallel.json");
  REQUIRE(run_cli("evaluate " + flags_args() + " --folds 3 --max-iter 4 --out " +
                  serial).code == 0);
  REQUIRE(run_cli("evaluate " + flags_args() + " --folds 3 --max-iter 4 --workers 3 --out " +
                  parallel).code == 0);
  json a = json::parse(gpmfs::read_file(serial));
  json b = json::parse(gpmfs::read_file(parallel));
  CHECK(a["per_fold"] == b["per_fold"]);
  CHECK(a["mean"] == b["mean"]);
}

TEST_CASE("cli: evaluate supports the mlknn baseline") {
  TempDir tmp;
  std::string out = tmp.file("mlknn.json");
  CliResult r = run_cli("evaluate " + flags_args() +
                        " --folds 3 --max-iter 4 --predictor mlknn --out " + out);
  REQUIRE(r.code == 0);
  json report = json::parse(gpmfs::read_file(out));
  CHECK(report["config"]["predictor"] == "mlknn");
  CHECK(report["per_fold"].size() == 3);
}

TEST_CASE("cli: sweep-q reports shrinking personalized sets") {
  TempDir tmp;
  std::string out = tmp.file("sweep.csv");
  CliResult r = run_cli("sweep-q " + flags_args() +
                        " --q-values 0,1 --folds 2 --max-iter 3 --out " + out);
  REQUIRE(r.code == 0);

  std::vector<std::string> rows = lines_of(gpmfs::read_file(out));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("q,mean_personalized", 0) == 0);

  auto cell = [](const std::string& row, int index) {
    std::istringstream in(row);
    std::string token;
    for (int i = 0; i <= index; ++i) std::getline(in, token, ',');
    return std::stod(token);
  };
  double at_zero = cell(rows[1], 1);
  double at_one = cell(rows[2], 1);
  CHECK(cell(rows[1], 0) == 0.0);
  CHECK(cell(rows[2], 0) == 1.0);
  CHECK(at_one == 0.0);  // q = 1 admits no personalized features
  CHECK(at_zero >= at_one);

  CHECK(run_cli("sweep-q " + flags_args() + " --q-values 0,2 --out " +
                tmp.file("bad.csv")).code == 2);
}

TEST_CASE("cli: sensitivity walks its value-fraction grid") {
  TempDir tmp;
  std::string out = tmp.file("sensitivity.csv");
  CliResult r = run_cli("sensitivity " + flags_args() +
                        " --param gamma --values 1 --fractions 0.1,0.2"
                        " --folds 2 --max-iter 3 --out " + out);
  REQUIRE(r.code == 0);

  std::vector<std::string> rows = lines_of(gpmfs::read_file(out));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "param,value,fraction,average_precision");
  CHECK(rows[1].rfind("gamma,1,0.1,", 0) == 0);
  CHECK(rows[2].rfind("gamma,1,0.2,", 0) == 0);

  CHECK(run_cli("sensitivity " + flags_args() + " --param tau --out " +
                tmp.file("bad.csv")).code == 2);
  CHECK(run_cli("sensitivity " + flags_args() + " --values -1 --out " +
                tmp.file("bad.csv")).code == 2);
}

TEST_CASE("cli: stats computes ranks and the critical difference") {
  TempDir tmp;
  std::ostringstream csv;
  csv << "dataset,m1,m2,m3,m4,m5,m6,m7\n";
  for (int r = 0; r < 10; ++r) {
    csv << "d" << r;
    for (int c = 0; c < 7; ++c) {
      csv << ',' << (((r * 7 + c * 3) % 11) + c * 0.01);
    }
    csv << '\n';
  }
  std::string scores = tmp.file("scores.csv");
  gpmfs::write_file(scores, csv.str());

  std::string out = tmp.file("stats.json");
  CliResult r = run_cli("stats --scores " + scores + " --out " + out);
  REQUIRE(r.code == 0);
  CHECK(r.output.find("critical difference") != std::string::npos);

  json report = json::parse(gpmfs::read_file(out));
  CHECK(report["schema"] == "gpmfs.stats/1");
  CHECK(report["methods"].size() == 7);
  CHECK(report["datasets"].size() == 10);
  CHECK(report["ranks"].size() == 10);
  CHECK(report["average_ranks"].size() == 7);
  // default q-alpha of 2.394 over 7 methods and 10 datasets
  CHECK(std::abs(report["critical_difference"].get<double>() - 2.3128) < 5e-5);
  CHECK(report["comparisons"].size() == 6);
  CHECK(report["direction"] == "higher");

  // rank rows each sum to 28 = 7*8/2
  for (const auto& row : report["ranks"]) {
    double sum = 0.0;
    for (const auto& v : row) sum += v.get<double>();
    CHECK(sum == doctest::Approx(28.0));
  }

  // an explicit control must be honored
  std::string out2 = tmp.file("stats2.json");
  REQUIRE(run_cli("stats --scores " + scores + " --control m3 --out " + out2).code == 0);
  json with_control = json::parse(gpmfs::read_file(out2));
  CHECK(with_control["control"] == "m3");
  CHECK(with_control["control_index"] == 2);

  CHECK(run_cli("stats --scores " + scores + " --control nope --out " +
                tmp.file("x.json")).code == 2);
  CHECK(run_cli("stats --scores " + scores + " --direction sideways --out " +
                tmp.file("x.json")).code == 2);

  // lower-is-better flips the ranking direction
  std::string out3 = tmp.file("stats3.json");
  REQUIRE(run_cli("stats --scores " + scores + " --direction lower --out " + out3).code == 0);
  CHECK(json::parse(gpmfs::read_file(out3))["direction"] == "lower");
}

TEST_CASE("cli: malformed scores tables exit with code 2") {
  TempDir tmp;
  std::string ragged = tmp.file("ragged.csv");
  gpmfs::write_file(ragged, "dataset,m1,m2\nd0,1.0\n");
  CliResult r = run_cli("stats --scores " + ragged);
  CHECK(r.code == 2);
  CHECK(r.output.find("error") != std::string::npos);

  std::string text = tmp.file("text.csv");
  gpmfs::write_file(text, "dataset,m1,m2\nd0,1.0,abc\n");
  CHECK(run_cli("stats --scores " + text).code == 2);

  std::string narrow = tmp.file("narrow.csv");
  gpmfs::write_file(narrow, "dataset,m1\nd0,1.0\n");
  CHECK(run_cli("stats --scores " + narrow).code == 2);
}

TEST_CASE("cli: GPMFS_OUT_DIR supplies the default output directory") {
  TempDir tmp;
  setenv("GPMFS_OUT_DIR", tmp.path.string().c_str(), 1);
  CliResult r = run_cli("trace " + flags_args() + " --max-iter 2");
  unsetenv("GPMFS_OUT_DIR");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(tmp.path / "trace.csv"));
}

TEST_CASE("cli: options can come from a config file") {
  TempDir tmp;
  std::string cfg = tmp.file("run.toml");
  gpmfs::write_file(cfg, "[trace]\nmax-iter=3\ntol=0.0\n");
  std::string out = tmp.file("trace.csv");
  // --config is an application-level flag, so it precedes the subcommand
  CliResult r = run_cli("--config " + cfg + " trace " + flags_args() + " --out " + out);
  REQUIRE(r.code == 0);
  CHECK(lines_of(gpmfs::read_file(out)).size() == 4);  // header + 3 iterations
}
