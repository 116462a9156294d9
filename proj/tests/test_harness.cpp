#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "geomatch/error.hpp"
#include "geomatch/harness.hpp"

using namespace geomatch;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.n = 30;
  cfg.d = 2;
  cfg.models = {ModelKind::linear_assignment, ModelKind::dot_product, ModelKind::distance};
  for (const char* label : {"mle_linear", "aml_grid2d", "aml_signflip_greedy", "alternating", "degree"}) {
    EstimatorConfig e = parse_estimator_label(label);
    e.grid_size = 16;
    e.restarts = 2;
    cfg.estimators.push_back(e);
  }
  cfg.sigma_grid = {0.01, 0.1, 1.0};
  cfg.trials = 3;
  cfg.base_seed = 1234;
  return cfg;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("geomatch_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("one cell yields one record") {
  SweepConfig cfg;
  cfg.n = 10;
  cfg.estimators = {parse_estimator_label("aml_signflip")};
  cfg.sigma_grid = {0.1};
  cfg.trials = 1;
  const auto records = run_sweep(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].estimator == "aml_signflip");
  CHECK(records[0].overlap >= 0.0);
  CHECK(records[0].overlap <= 1.0);
  CHECK(records[0].runtime_ms == 0.0);
}

TEST_CASE("record order and compatibility filtering") {
  const SweepConfig cfg = small_config();
  const auto records = run_sweep(cfg);
  // mle_linear only on linear_assignment; the other four on the two matrix models.
  CHECK(records.size() == (1 + 4 * 2) * 3 * 3);
  CHECK(records.front().model == ModelKind::linear_assignment);
  CHECK(records.front().estimator == "mle_linear");
  CHECK(records.back().model == ModelKind::distance);
  CHECK(records.back().estimator == "degree");
  for (const auto& r : records) {
    CHECK_FALSE(r.failed());
    CHECK(r.overlap >= 0.0);
    CHECK(r.overlap <= 1.0);
  }
}

TEST_CASE("every estimator sees the same instance for a given noise level and trial") {
  const auto records = run_sweep(small_config());
  std::map<std::pair<int, int>, std::uint64_t> hashes;
  for (const auto& r : records) {
    auto [it, inserted] = hashes.emplace(std::pair{r.sigma_index, r.trial}, r.instance_hash);
    CHECK(it->second == r.instance_hash);
  }
  CHECK(hashes.size() == 9);
}

TEST_CASE("reruns and worker counts give identical bytes") {
  SweepConfig cfg = small_config();
  const std::string a = records_to_csv(run_sweep(cfg));
  const std::string b = records_to_csv(run_sweep(cfg));
  cfg.workers = 8;
  const std::string c = records_to_csv(run_sweep(cfg));
  CHECK(a == b);
  CHECK(a == c);

  cfg.output_path = temp_path("rerun.csv");
  run_sweep(cfg);
  const std::string first = slurp(cfg.output_path);
  cfg.workers = 1;
  run_sweep(cfg);
  CHECK(slurp(cfg.output_path) == first);
  CHECK(first == a);
  std::filesystem::remove(cfg.output_path);
}

TEST_CASE("different base seeds give different instances") {
  SweepConfig cfg = small_config();
  const auto a = run_sweep(cfg);
  cfg.base_seed = 1235;
  const auto b = run_sweep(cfg);
  CHECK(a.front().instance_hash != b.front().instance_hash);
}

TEST_CASE("csv layout") {
  const auto records = run_sweep(small_config());
  const std::string csv = records_to_csv(records);
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "model,estimator,n,d,sigma,trial,seed,instance_hash,overlap,objective,runtime_ms,iterations");
  std::size_t rows = 0;
  while (std::getline(ss, line)) {
    const auto cells = split(line, ',');
    CHECK(cells.size() == 12);
    CHECK(std::stod(cells[4]) == records[rows].sigma);
    CHECK(std::stod(cells[8]) == records[rows].overlap);
    ++rows;
  }
  CHECK(rows == records.size());
}

TEST_CASE("real formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 5e-4, 123456.789, 0.0, -2.5e-300}) CHECK(std::stod(format_real(v)) == v);
  CHECK(format_real(std::nan("")) == "nan");
  CHECK(format_real(INFINITY) == "inf");
}

TEST_CASE("failed estimator runs become flagged rows") {
  SweepConfig cfg;
  cfg.n = 12;  // haar_mle enumerates permutations only up to n = 8
  cfg.estimators = {parse_estimator_label("haar_mle"), parse_estimator_label("degree")};
  cfg.sigma_grid = {0.1, 0.2};
  cfg.trials = 2;
  const auto records = run_sweep(cfg);
  REQUIRE(records.size() == 8);
  for (int k = 0; k < 4; ++k) {
    CHECK(records[k].failed());
    CHECK(records[k].iterations == -1);
    CHECK(std::isnan(records[k].objective));
  }
  for (int k = 4; k < 8; ++k) CHECK_FALSE(records[k].failed());
  const auto summary = summarize(records);
  REQUIRE(summary.size() == 4);
  CHECK(summary[0].failures == 2);
  CHECK(summary[0].count == 0);
  CHECK(summary[2].failures == 0);
  CHECK(records_to_csv(records).find(",nan,") != std::string::npos);
}

TEST_CASE("unwritable output keeps the records") {
  SweepConfig cfg;
  cfg.n = 10;
  cfg.estimators = {parse_estimator_label("degree")};
  cfg.sigma_grid = {0.1};
  cfg.trials = 3;
  cfg.output_path = "/nonexistent-dir/deeper/out.csv";
  try {
    run_sweep(cfg);
    FAIL("expected a write error");
  } catch (const SweepWriteError& e) {
    CHECK(e.kind() == ErrorKind::io);
    CHECK(e.records().size() == 3);
  }
}

TEST_CASE("config validation") {
  SweepConfig cfg = small_config();
  cfg.sigma_grid = {0.2, 0.1};
  CHECK_THROWS_AS(run_sweep(cfg), Error);
  cfg = small_config();
  cfg.sigma_grid = {0.0, 0.1};
  CHECK_THROWS_AS(run_sweep(cfg), Error);
  cfg = small_config();
  cfg.trials = 0;
  CHECK_THROWS_AS(run_sweep(cfg), Error);
  cfg = small_config();
  cfg.estimators.clear();
  CHECK_THROWS_AS(run_sweep(cfg), Error);
  cfg = small_config();
  cfg.models = {ModelKind::dot_product};
  cfg.estimators = {parse_estimator_label("mle_linear")};
  CHECK_THROWS_AS(run_sweep(cfg), Error);
}

TEST_CASE("config json") {
  const SweepConfig cfg = sweep_config_from_json(R"({
    "n": 50, "d": 3, "models": ["dot_product", "distance"],
    "estimators": ["umeyama", "aml_signflip_greedy", {"kind": "grampa", "eta": 0.5}],
    "sigma_grid": {"min": 0.01, "max": 1.0, "points": 3},
    "trials": 4, "base_seed": 9, "workers": 2
  })");
  CHECK(cfg.n == 50);
  CHECK(cfg.d == 3);
  CHECK(cfg.models.size() == 2);
  REQUIRE(cfg.estimators.size() == 3);
  CHECK(cfg.estimators[1].matcher == Matcher::greedy);
  CHECK(cfg.estimators[2].eta == 0.5);
  REQUIRE(cfg.sigma_grid.size() == 3);
  CHECK(cfg.sigma_grid[1] == doctest::Approx(0.1));
  CHECK(cfg.trials == 4);
  CHECK(cfg.base_seed == 9);

  const SweepConfig back = sweep_config_from_json(sweep_config_to_json(cfg));
  CHECK(back.sigma_grid == cfg.sigma_grid);
  CHECK(back.estimators[2].eta == 0.5);
  CHECK(back.estimators[1].label() == "aml_signflip_greedy");

  const SweepConfig defaults = sweep_config_from_json(R"({"n": 200, "d": 2, "estimators": ["degree"]})");
  CHECK(defaults.sigma_grid == default_sigma_grid(200, 2));

  CHECK_THROWS_AS(sweep_config_from_json("[1, 2]"), Error);
  CHECK_THROWS_AS(sweep_config_from_json("{"), Error);
  CHECK_THROWS_AS(sweep_config_from_json(R"({"estimators": ["bogus"]})"), Error);
  CHECK_THROWS_AS(sweep_config_from_json(R"({"models": ["bogus"]})"), Error);
}

TEST_CASE("default noise grid brackets both thresholds") {
  const auto g = default_sigma_grid(200, 2);
  REQUIRE(g.size() == 15);
  CHECK(g.front() == doctest::Approx(0.1 * 0.005));
  CHECK(g.back() == doctest::Approx(10.0 * std::pow(200.0, -0.5)));
  for (std::size_t k = 1; k < g.size(); ++k) {
    CHECK(g[k] > g[k - 1]);
    CHECK(g[k] / g[k - 1] == doctest::Approx(g[1] / g[0]));
  }
}

TEST_CASE("demo configurations") {
  const SweepConfig d2 = demo_config(200, 2);
  REQUIRE(d2.estimators.size() == 3);
  CHECK(d2.estimators[1].label() == "aml_grid2d");
  CHECK(d2.estimators[1].grid_size == 100);
  CHECK(d2.estimators[2].label() == "aml_grid2d_greedy");
  const SweepConfig d4 = demo_config(200, 4);
  REQUIRE(d4.estimators.size() == 4);
  CHECK(d4.estimators[3].label() == "umeyama");
}

TEST_CASE("summary of a single record and of identical records") {
  SweepRecord r;
  r.model = ModelKind::dot_product;
  r.estimator = "degree";
  r.sigma = 0.5;
  r.overlap = 0.37;
  auto one = summarize({r});
  REQUIRE(one.size() == 1);
  CHECK(one[0].mean_overlap == 0.37);
  CHECK(one[0].std_overlap == 0.0);
  const auto ten = summarize(std::vector<SweepRecord>(10, r));
  REQUIRE(ten.size() == 1);
  CHECK(ten[0].count == 10);
  CHECK(ten[0].std_overlap < 1e-15);
  CHECK(ten[0].mean_overlap == doctest::Approx(0.37).epsilon(1e-15));
  CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("summary agrees with an independent pass over the csv") {
  const auto records = run_sweep(small_config());
  const auto summary = summarize(records);

  struct Sums {
    double n = 0, s = 0, ss = 0;
  };
  std::map<std::string, Sums> by_key;
  std::stringstream csv(records_to_csv(records));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    const auto c = split(line, ',');
    const double v = std::stod(c[8]);
    Sums& acc = by_key[c[0] + "|" + c[1] + "|" + c[4]];
    acc.n += 1;
    acc.s += v;
    acc.ss += v * v;
  }
  CHECK(summary.size() == by_key.size());
  for (const auto& row : summary) {
    const Sums& acc = by_key.at(std::string(to_string(row.model)) + "|" + row.estimator + "|" + format_real(row.sigma));
    const double mean = acc.s / acc.n;
    const double var = std::max(0.0, acc.ss / acc.n - mean * mean);
    CHECK(row.count == acc.n);
    CHECK(std::abs(row.mean_overlap - mean) <= 1e-12);
    CHECK(std::abs(row.std_overlap - std::sqrt(var)) <= 1e-7);  // one-pass variance loses digits
    CHECK(std::abs(row.std_overlap * row.std_overlap - var) <= 1e-12);
  }
}

TEST_CASE("summary ordering follows first appearance then noise") {
  const auto summary = summarize(run_sweep(small_config()));
  CHECK(summary[0].estimator == "mle_linear");
  CHECK(summary[0].sigma < summary[1].sigma);
  CHECK(summary[1].sigma < summary[2].sigma);
  CHECK(summary[3].estimator == "aml_grid2d");
  CHECK(summary[3].model == ModelKind::dot_product);
  const std::string js = summary_to_json(summary);
  CHECK(js.find("\"mean_overlap\"") != std::string::npos);
}

TEST_CASE("timing is recorded only on request") {
  SweepConfig cfg = small_config();
  cfg.record_timing = true;
  cfg.estimators = {parse_estimator_label("aml_grid2d")};
  cfg.models = {ModelKind::dot_product};
  double total = 0.0;
  for (const auto& r : run_sweep(cfg)) {
    CHECK(r.runtime_ms >= 0.0);
    total += r.runtime_ms;
  }
  CHECK(total > 0.0);
}

TEST_CASE("mle_linear far below the perfect-recovery threshold") {
  SweepConfig cfg;
  cfg.n = 200;
  cfg.d = 2;
  cfg.models = {ModelKind::linear_assignment};
  cfg.estimators = {parse_estimator_label("mle_linear")};
  cfg.sigma_grid = {0.1 * 0.005};
  cfg.trials = 10;
  cfg.base_seed = 77;
  const auto summary = summarize(run_sweep(cfg));
  REQUIRE(summary.size() == 1);
  CHECK(summary[0].mean_overlap >= 0.99);
}

TEST_CASE("seed derivation") {
  EstimatorConfig a = parse_estimator_label("aml_grid2d"), b = parse_estimator_label("aml_grid2d_greedy");
  CHECK(record_seed(1, ModelKind::dot_product, a, 0, 0) != record_seed(1, ModelKind::dot_product, b, 0, 0));
  CHECK(record_seed(1, ModelKind::dot_product, a, 0, 0) != record_seed(1, ModelKind::distance, a, 0, 0));
  CHECK(record_seed(1, ModelKind::dot_product, a, 0, 1) != record_seed(1, ModelKind::dot_product, a, 1, 0));
  CHECK(instance_seed(1, 0, 1) != instance_seed(1, 1, 0));
  CHECK(instance_seed(1, 2, 3) == instance_seed(1, 2, 3));
  CHECK(SeedHasher(5).add("ab").value() != SeedHasher(5).add("ba").value());
}
