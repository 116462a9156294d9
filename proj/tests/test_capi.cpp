#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "geomatch/geomatch.h"

namespace {

struct Text {
  char* p = nullptr;
  ~Text() { gm_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(gm_version()).size() > 0);
  CHECK(std::string(gm_status_name(GM_OK)) == "ok");
  CHECK(std::string(gm_status_name(GM_ERR_CAPACITY)) == "capacity error");
}

TEST_CASE("instance lifecycle") {
  gm_instance* inst = nullptr;
  REQUIRE(gm_instance_sample(20, 2, 0.0, nullptr, 7, &inst) == GM_OK);
  int n = 0, d = 0;
  double sigma = -1.0;
  CHECK(gm_instance_shape(inst, &n, &d, &sigma) == GM_OK);
  CHECK(n == 20);
  CHECK(d == 2);
  CHECK(sigma == 0.0);

  std::vector<int> pi(20);
  std::vector<double> x(40), y(40);
  CHECK(gm_instance_pi_star(inst, pi.data()) == GM_OK);
  CHECK(gm_instance_points(inst, x.data(), y.data()) == GM_OK);
  for (int i = 0; i < 20; ++i) {
    CHECK(y[2 * i] == x[2 * pi[i]]);
    CHECK(y[2 * i + 1] == x[2 * pi[i] + 1]);
  }

  Text js;
  CHECK(gm_instance_to_json(inst, &js.p) == GM_OK);
  gm_instance* back = nullptr;
  CHECK(gm_instance_from_json(js.p, &back) == GM_OK);
  std::uint64_t h1 = 0, h2 = 1;
  gm_instance_hash(inst, &h1);
  gm_instance_hash(back, &h2);
  CHECK(h1 == h2);
  gm_instance_free(back);
  gm_instance_free(inst);
}

TEST_CASE("errors map to status codes") {
  gm_instance* inst = nullptr;
  CHECK(gm_instance_sample(1, 2, 0.1, nullptr, 1, &inst) == GM_ERR_PARAMETER);
  CHECK(inst == nullptr);
  CHECK(std::strlen(gm_last_error()) > 0);
  const double bad_cov[] = {1.0, 2.0, 2.0, 1.0};
  CHECK(gm_instance_sample(5, 2, 0.1, bad_cov, 1, &inst) == GM_ERR_PARAMETER);
  CHECK(gm_instance_sample(5, 2, 0.1, nullptr, 1, nullptr) == GM_ERR_NULL_ARGUMENT);
  CHECK(gm_instance_from_json("{", &inst) == GM_ERR_PARAMETER);

  REQUIRE(gm_instance_sample(10, 3, 0.1, nullptr, 1, &inst) == GM_OK);
  CHECK(std::strlen(gm_last_error()) == 0);
  gm_observation* obs = nullptr;
  REQUIRE(gm_observe(inst, GM_MODEL_DOT_PRODUCT, &obs) == GM_OK);
  std::vector<int> perm(10);
  CHECK(gm_estimate(obs, "aml_grid2d", perm.data(), nullptr, nullptr) == GM_ERR_UNSUPPORTED_DIMENSION);
  CHECK(gm_estimate(obs, "mle_linear", perm.data(), nullptr, nullptr) == GM_ERR_CONTRACT);
  CHECK(gm_estimate(obs, "bogus", perm.data(), nullptr, nullptr) == GM_ERR_PARAMETER);
  gm_observation_free(obs);
  gm_instance_free(inst);

  const double w[] = {1, 2, 3, 4, 5, 6};
  int p2[2];
  CHECK(gm_solve_lap_max(w, -1, p2, nullptr) == GM_ERR_DIMENSION);
}

TEST_CASE("observe and estimate") {
  gm_instance* inst = nullptr;
  REQUIRE(gm_instance_sample(40, 2, 0.0, nullptr, 3, &inst) == GM_OK);
  std::vector<int> truth(40);
  gm_instance_pi_star(inst, truth.data());

  for (gm_model m : {GM_MODEL_DOT_PRODUCT, GM_MODEL_DISTANCE}) {
    gm_observation* obs = nullptr;
    REQUIRE(gm_observe(inst, m, &obs) == GM_OK);
    gm_model tag;
    int rows = 0, cols = 0;
    gm_observation_shape(obs, &tag, &rows, &cols);
    CHECK(tag == m);
    CHECK(rows == 40);
    CHECK(cols == 40);
    std::vector<int> perm(40);
    double objective = 0.0;
    int iterations = 0;
    CHECK(gm_estimate(obs, "aml_grid2d", perm.data(), &objective, &iterations) == GM_OK);
    CHECK(perm == truth);
    CHECK(iterations == 200);
    CHECK(gm_estimate(obs, R"({"kind": "aml_grid2d", "grid_size": 10, "matcher": "greedy"})", perm.data(),
                      nullptr, &iterations) == GM_OK);
    CHECK(iterations == 20);
    double ov = 0.0;
    CHECK(gm_overlap(perm.data(), truth.data(), 40, &ov) == GM_OK);
    CHECK(ov > 0.5);
    gm_observation_free(obs);
  }

  gm_observation* la = nullptr;
  REQUIRE(gm_observe(inst, GM_MODEL_LINEAR_ASSIGNMENT, &la) == GM_OK);
  int rows = 0, cols = 0;
  gm_observation_shape(la, nullptr, &rows, &cols);
  CHECK(cols == 2);
  std::vector<double> left(80);
  CHECK(gm_observation_payload(la, left.data(), nullptr) == GM_OK);
  std::vector<int> perm(40);
  CHECK(gm_estimate(la, "mle_linear", perm.data(), nullptr, nullptr) == GM_OK);
  CHECK(perm == truth);
  gm_observation_free(la);
  gm_instance_free(inst);
}

TEST_CASE("lap and greedy through the C API") {
  const double w[] = {2, 3, 3, 5};
  int perm[2];
  double objective = 0.0;
  CHECK(gm_solve_lap_max(w, 2, perm, &objective) == GM_OK);
  CHECK(objective == 7.0);
  CHECK(gm_greedy_match(w, 2, perm, &objective) == GM_OK);
  CHECK(perm[0] == 0);
  CHECK(perm[1] == 1);
  const int p[] = {0, 1, 2}, q[] = {0, 2, 1};
  double ov = 0.0;
  CHECK(gm_overlap(p, q, 3, &ov) == GM_OK);
  CHECK(ov == doctest::Approx(1.0 / 3.0));
  const int bad[] = {0, 0, 1};
  CHECK(gm_overlap(p, bad, 3, &ov) == GM_ERR_CONTRACT);
}

TEST_CASE("sweeps through the C API") {
  const char* cfg = R"({"n": 20, "d": 2, "models": ["linear_assignment", "dot_product"],
                        "estimators": ["mle_linear", "aml_signflip"], "sigma_grid": [0.01, 0.5],
                        "trials": 2, "base_seed": 5, "workers": 3})";
  gm_sweep* a = nullptr;
  gm_sweep* b = nullptr;
  REQUIRE(gm_sweep_run(cfg, &a) == GM_OK);
  REQUIRE(gm_sweep_run(cfg, &b) == GM_OK);
  size_t count = 0, failures = 9;
  gm_sweep_record_count(a, &count);
  gm_sweep_failure_count(a, &failures);
  CHECK(count == 8);
  CHECK(failures == 0);
  Text ca, cb, summary;
  gm_sweep_csv(a, &ca.p);
  gm_sweep_csv(b, &cb.p);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("model,estimator,n,d,sigma,trial,seed,instance_hash,overlap,objective,runtime_ms,iterations\n", 0) == 0);
  CHECK(gm_sweep_summary_json(a, &summary.p) == GM_OK);
  CHECK(summary.str().find("aml_signflip") != std::string::npos);
  gm_sweep_free(a);
  gm_sweep_free(b);

  gm_sweep* bad = nullptr;
  CHECK(gm_sweep_run(R"({"trials": 0, "estimators": ["degree"]})", &bad) == GM_ERR_PARAMETER);
  CHECK(bad == nullptr);

  const char* unwritable = R"({"n": 10, "estimators": ["degree"], "sigma_grid": [0.1], "trials": 2,
                               "output_path": "/nonexistent-dir/x/out.csv"})";
  gm_sweep* partial = nullptr;
  CHECK(gm_sweep_run(unwritable, &partial) == GM_ERR_IO);
  REQUIRE(partial != nullptr);
  gm_sweep_record_count(partial, &count);
  CHECK(count == 2);
  gm_sweep_free(partial);
}

TEST_CASE("grids, demo configs and thresholds through the C API") {
  double grid[15];
  int count = 0;
  CHECK(gm_default_sigma_grid(200, 2, grid, 15, &count) == GM_OK);
  CHECK(count == 15);
  CHECK(grid[0] == doctest::Approx(5e-4));
  CHECK(gm_default_sigma_grid(200, 2, grid, 3, &count) == GM_ERR_CAPACITY);

  Text demo;
  CHECK(gm_demo_config(200, 2, &demo.p) == GM_OK);
  CHECK(demo.str().find("aml_grid2d") != std::string::npos);

  double perfect = 0, almost = 0, mi = 0, exact = 0;
  CHECK(gm_thresholds(200, 2, 0.01, 0.0, &perfect, &almost, &mi, &exact) == GM_OK);
  CHECK(perfect == doctest::Approx(0.005));
  CHECK(almost == doctest::Approx(std::pow(200.0, -0.5)));
  CHECK(gm_thresholds(200, 2, 0.0, 0.0, &perfect, &almost, &mi, &exact) == GM_ERR_PARAMETER);
}

namespace {

void collect(const char* name, int passed, const char*, void* user) {
  static_cast<std::vector<std::pair<std::string, int>>*>(user)->emplace_back(name, passed);
}

}  // namespace

TEST_CASE("verification suite through the C API") {
  std::vector<std::pair<std::string, int>> lines;
  int failures = -1;
  CHECK(gm_verify(20000, 3, collect, &lines, &failures) == GM_OK);
  CHECK(lines.size() >= 5);
  // At 2e4 samples the Monte-Carlo checks are noisy; the exact checks must pass.
  for (const auto& [name, passed] : lines)
    if (name == "net_lemma" || name == "orbit_identity" || name == "ak_bounds") CHECK(passed == 1);
}
