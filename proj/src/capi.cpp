#include "geomatch/geomatch.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "geomatch/assignment.hpp"
#include "geomatch/error.hpp"
#include "geomatch/estimators.hpp"
#include "geomatch/harness.hpp"
#include "geomatch/models.hpp"
#include "geomatch/theory.hpp"
#include "geomatch/verify.hpp"

struct gm_instance {
  geomatch::Instance value;
};

struct gm_observation {
  geomatch::Observation value;
};

struct gm_sweep {
  std::vector<geomatch::SweepRecord> records;
};

namespace {

thread_local std::string g_last_error;

gm_status status_of(geomatch::ErrorKind kind) {
  using geomatch::ErrorKind;
  switch (kind) {
    case ErrorKind::dimension: return GM_ERR_DIMENSION;
    case ErrorKind::parameter: return GM_ERR_PARAMETER;
    case ErrorKind::contract: return GM_ERR_CONTRACT;
    case ErrorKind::capacity: return GM_ERR_CAPACITY;
    case ErrorKind::unsupported_dimension: return GM_ERR_UNSUPPORTED_DIMENSION;
    case ErrorKind::io: return GM_ERR_IO;
  }
  return GM_ERR_INTERNAL;
}

template <typename Fn>
gm_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return GM_OK;
  } catch (const geomatch::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GM_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

geomatch::ModelKind model_of(gm_model m) {
  switch (m) {
    case GM_MODEL_LINEAR_ASSIGNMENT: return geomatch::ModelKind::linear_assignment;
    case GM_MODEL_DOT_PRODUCT: return geomatch::ModelKind::dot_product;
    case GM_MODEL_DISTANCE: return geomatch::ModelKind::distance;
  }
  throw geomatch::Error(geomatch::ErrorKind::parameter, "unknown model tag");
}

gm_model tag_of(geomatch::ModelKind m) {
  switch (m) {
    case geomatch::ModelKind::linear_assignment: return GM_MODEL_LINEAR_ASSIGNMENT;
    case geomatch::ModelKind::dot_product: return GM_MODEL_DOT_PRODUCT;
    case geomatch::ModelKind::distance: return GM_MODEL_DISTANCE;
  }
  return GM_MODEL_LINEAR_ASSIGNMENT;
}

geomatch::Matrix read_square(const double* w, int n) {
  if (n < 0) throw geomatch::Error(geomatch::ErrorKind::dimension, "negative size");
  geomatch::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = w[static_cast<std::size_t>(i) * n + j];
  return m;
}

void write_rows(const geomatch::Matrix& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
}

geomatch::EstimatorConfig parse_estimator(const char* text) {
  const std::string s(text);
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && s[first] == '{') {
    // Reuse the sweep-config parser for the object form.
    nlohmann::json cfg;
    try {
      cfg["estimators"] = nlohmann::json::array({nlohmann::json::parse(s)});
    } catch (const nlohmann::json::exception& e) {
      throw geomatch::Error(geomatch::ErrorKind::parameter, std::string("estimator JSON: ") + e.what());
    }
    cfg["sigma_grid"] = {1.0};
    return geomatch::sweep_config_from_json(cfg.dump()).estimators.front();
  }
  return geomatch::parse_estimator_label(s);
}

}  // namespace

extern "C" {

const char* gm_version(void) { return "0.1.0"; }

const char* gm_status_name(gm_status status) {
  switch (status) {
    case GM_OK: return "ok";
    case GM_ERR_DIMENSION: return "dimension error";
    case GM_ERR_PARAMETER: return "parameter error";
    case GM_ERR_CONTRACT: return "contract error";
    case GM_ERR_CAPACITY: return "capacity error";
    case GM_ERR_UNSUPPORTED_DIMENSION: return "unsupported dimension";
    case GM_ERR_IO: return "i/o error";
    case GM_ERR_NULL_ARGUMENT: return "null argument";
    case GM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* gm_last_error(void) { return g_last_error.c_str(); }

void gm_string_free(char* s) { std::free(s); }

gm_status gm_instance_sample(int n, int d, double sigma, const double* covariance, uint64_t seed,
                             gm_instance** out) {
  if (!out) return GM_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    std::optional<geomatch::Matrix> cov;
    if (covariance) {
      if (d < 1) throw geomatch::Error(geomatch::ErrorKind::parameter, "instance needs d >= 1");
      cov = read_square(covariance, d);
    }
    auto inst = std::make_unique<gm_instance>();
    inst->value = geomatch::sample_instance(n, d, sigma, cov, seed);
    *out = inst.release();
  });
}

gm_status gm_instance_from_json(const char* json, gm_instance** out) {
  if (!json || !out) return GM_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    auto inst = std::make_unique<gm_instance>();
    inst->value = geomatch::instance_from_json(json);
    *out = inst.release();
  });
}

gm_status gm_instance_to_json(const gm_instance* inst, char** out) {
  if (!inst || !out) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = dup_string(geomatch::instance_to_json(inst->value)); });
}

void gm_instance_free(gm_instance* inst) { delete inst; }

gm_status gm_instance_shape(const gm_instance* inst, int* n, int* d, double* sigma) {
  if (!inst) return GM_ERR_NULL_ARGUMENT;
  if (n) *n = inst->value.n();
  if (d) *d = inst->value.d();
  if (sigma) *sigma = inst->value.sigma;
  return GM_OK;
}

gm_status gm_instance_pi_star(const gm_instance* inst, int* pi_star) {
  if (!inst || !pi_star) return GM_ERR_NULL_ARGUMENT;
  const auto& m = inst->value.pi_star.mapping();
  std::copy(m.begin(), m.end(), pi_star);
  return GM_OK;
}

gm_status gm_instance_points(const gm_instance* inst, double* x, double* y) {
  if (!inst) return GM_ERR_NULL_ARGUMENT;
  if (x) write_rows(inst->value.x, x);
  if (y) write_rows(inst->value.y, y);
  return GM_OK;
}

gm_status gm_instance_hash(const gm_instance* inst, uint64_t* out) {
  if (!inst || !out) return GM_ERR_NULL_ARGUMENT;
  *out = geomatch::instance_hash(inst->value);
  return GM_OK;
}

gm_status gm_observe(const gm_instance* inst, gm_model model, gm_observation** out) {
  if (!inst || !out) return GM_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    auto obs = std::make_unique<gm_observation>();
    obs->value = geomatch::observe(inst->value, model_of(model));
    *out = obs.release();
  });
}

void gm_observation_free(gm_observation* obs) { delete obs; }

gm_status gm_observation_shape(const gm_observation* obs, gm_model* model, int* rows, int* cols) {
  if (!obs) return GM_ERR_NULL_ARGUMENT;
  if (model) *model = tag_of(obs->value.model);
  if (rows) *rows = static_cast<int>(obs->value.left.rows());
  if (cols) *cols = static_cast<int>(obs->value.left.cols());
  return GM_OK;
}

gm_status gm_observation_payload(const gm_observation* obs, double* left, double* right) {
  if (!obs) return GM_ERR_NULL_ARGUMENT;
  if (left) write_rows(obs->value.left, left);
  if (right) write_rows(obs->value.right, right);
  return GM_OK;
}

gm_status gm_estimate(const gm_observation* obs, const char* estimator, int* perm, double* objective,
                      int* iterations) {
  if (!obs || !estimator || !perm) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const geomatch::EstimateResult r = geomatch::estimate(obs->value, parse_estimator(estimator));
    const auto& m = r.permutation.mapping();
    std::copy(m.begin(), m.end(), perm);
    if (objective) *objective = r.objective;
    if (iterations) *iterations = r.iterations;
  });
}

gm_status gm_overlap(const int* p, const int* q, int n, double* out) {
  if (!p || !q || !out) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] {
    if (n < 0) throw geomatch::Error(geomatch::ErrorKind::dimension, "negative size");
    *out = geomatch::overlap(geomatch::Permutation(std::vector<int>(p, p + n)),
                             geomatch::Permutation(std::vector<int>(q, q + n)));
  });
}

gm_status gm_solve_lap_max(const double* w, int n, int* perm, double* objective) {
  if (!w || !perm) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto a = geomatch::solve_lap_max(read_square(w, n));
    std::copy(a.permutation.mapping().begin(), a.permutation.mapping().end(), perm);
    if (objective) *objective = a.objective;
  });
}

gm_status gm_greedy_match(const double* w, int n, int* perm, double* objective) {
  if (!w || !perm) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto a = geomatch::greedy_match(read_square(w, n));
    std::copy(a.permutation.mapping().begin(), a.permutation.mapping().end(), perm);
    if (objective) *objective = a.objective;
  });
}

gm_status gm_default_sigma_grid(int n, int d, double* grid, int capacity, int* count) {
  if (!count) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] {
    if (n < 2 || d < 1) throw geomatch::Error(geomatch::ErrorKind::parameter, "grid needs n >= 2, d >= 1");
    const auto g = geomatch::default_sigma_grid(n, d);
    *count = static_cast<int>(g.size());
    if (grid) {
      if (capacity < *count) throw geomatch::Error(geomatch::ErrorKind::capacity, "grid buffer too small");
      std::copy(g.begin(), g.end(), grid);
    }
  });
}

gm_status gm_demo_config(int n, int d, char** json_out) {
  if (!json_out) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] {
    if (n < 2 || d < 1) throw geomatch::Error(geomatch::ErrorKind::parameter, "demo needs n >= 2, d >= 1");
    *json_out = dup_string(geomatch::sweep_config_to_json(geomatch::demo_config(n, d)));
  });
}

gm_status gm_sweep_run(const char* config_json, gm_sweep** out) {
  if (!config_json || !out) return GM_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    auto sweep = std::make_unique<gm_sweep>();
    const auto cfg = geomatch::sweep_config_from_json(config_json);
    try {
      sweep->records = geomatch::run_sweep(cfg);
    } catch (const geomatch::SweepWriteError& e) {
      sweep->records = e.records();
      *out = sweep.release();
      throw;
    }
    *out = sweep.release();
  });
}

void gm_sweep_free(gm_sweep* sweep) { delete sweep; }

gm_status gm_sweep_record_count(const gm_sweep* sweep, size_t* count) {
  if (!sweep || !count) return GM_ERR_NULL_ARGUMENT;
  *count = sweep->records.size();
  return GM_OK;
}

gm_status gm_sweep_failure_count(const gm_sweep* sweep, size_t* count) {
  if (!sweep || !count) return GM_ERR_NULL_ARGUMENT;
  *count = 0;
  for (const auto& r : sweep->records) *count += r.failed();
  return GM_OK;
}

gm_status gm_sweep_csv(const gm_sweep* sweep, char** csv_out) {
  if (!sweep || !csv_out) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] { *csv_out = dup_string(geomatch::records_to_csv(sweep->records)); });
}

gm_status gm_sweep_summary_json(const gm_sweep* sweep, char** json_out) {
  if (!sweep || !json_out) return GM_ERR_NULL_ARGUMENT;
  return guarded([&] {
    *json_out = dup_string(geomatch::summary_to_json(geomatch::summarize(sweep->records)));
  });
}

gm_status gm_verify(long mgf_samples, uint64_t seed, gm_verify_callback cb, void* user, int* failures) {
  return guarded([&] {
    geomatch::VerifyOptions opts;
    if (mgf_samples > 0) opts.mgf_samples = mgf_samples;
    opts.seed = seed;
    int bad = 0;
    for (const auto& c : geomatch::run_verification(opts)) {
      bad += !c.passed;
      if (cb) cb(c.name.c_str(), c.passed ? 1 : 0, c.detail.c_str(), user);
    }
    if (failures) *failures = bad;
  });
}

gm_status gm_thresholds(int n, int d, double sigma, double epsilon, double* perfect, double* almost,
                        double* mi_almost_lhs, double* exact_nec_lhs) {
  return guarded([&] {
    const auto r = geomatch::thresholds(n, d, sigma, epsilon);
    if (perfect) *perfect = r.perfect_threshold;
    if (almost) *almost = r.almost_threshold;
    if (mi_almost_lhs) *mi_almost_lhs = r.mi_almost_lhs;
    if (exact_nec_lhs) *exact_nec_lhs = r.exact_nec_lhs;
  });
}

}  // extern "C"
