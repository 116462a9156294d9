#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geomatch/error.hpp"
#include "geomatch/estimators.hpp"
#include "geomatch/models.hpp"

namespace geomatch {

/// Output columns, in order.  Downstream plotting reads this exact header.
inline constexpr std::string_view kCsvHeader =
    "model,estimator,n,d,sigma,trial,seed,instance_hash,overlap,objective,runtime_ms,iterations";

struct SweepConfig {
  int n = 200;
  int d = 2;
  std::vector<ModelKind> models{ModelKind::dot_product};
  std::vector<EstimatorConfig> estimators;
  std::vector<double> sigma_grid;  // ascending, > 0
  int trials = 10;
  std::uint64_t base_seed = 0;
  std::string output_path;  // empty: keep records in memory only
  int workers = 1;
  bool record_timing = false;  // wall-clock runtimes make the CSV non-reproducible
  std::optional<Matrix> covariance;

  void validate() const;
};

/// `points` values log-spaced between lo and hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int points);

/// 15 points from 0.1 n^{-2/d} to 10 n^{-1/d}.
std::vector<double> default_sigma_grid(int n, int d);

SweepConfig sweep_config_from_json(std::string_view text);
std::string sweep_config_to_json(const SweepConfig& cfg);

/// Figure analogues: d = 2 runs mle_linear plus the angle grid with exact and
/// greedy rounding; other d run mle_linear, sign flips exact/greedy and Umeyama.
SweepConfig demo_config(int n, int d);

struct SweepRecord {
  ModelKind model = ModelKind::linear_assignment;
  std::string estimator;
  int n = 0;
  int d = 0;
  double sigma = 0.0;
  int sigma_index = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t instance_hash = 0;
  double overlap = 0.0;
  double objective = 0.0;
  double runtime_ms = 0.0;
  int iterations = 0;
  std::string error;  // non-empty on a failed estimator run

  bool failed() const { return !error.empty(); }
};

/// Stable 64-bit digest used for seed derivation.
class SeedHasher {
public:
  explicit SeedHasher(std::uint64_t base);
  SeedHasher& add(std::uint64_t v);
  SeedHasher& add(std::string_view s);
  std::uint64_t value() const;

private:
  std::uint64_t state_;
};

std::uint64_t instance_seed(std::uint64_t base_seed, int sigma_index, int trial);
std::uint64_t record_seed(std::uint64_t base_seed, ModelKind model, const EstimatorConfig& est,
                          int sigma_index, int trial);

/// Raised when the CSV cannot be written; the finished records ride along.
class SweepWriteError : public Error {
public:
  SweepWriteError(const std::string& what, std::vector<SweepRecord> records);
  const std::vector<SweepRecord>& records() const { return records_; }

private:
  std::vector<SweepRecord> records_;
};

/// Runs every compatible (model, estimator, sigma, trial) cell.  One instance
/// per (sigma, trial) is shared by all models and estimators.  Records come
/// back sorted by (model, estimator, sigma, trial) in configuration order and
/// do not depend on the worker count.  Writes the CSV when output_path is set.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

std::string format_real(double v);
std::string records_to_csv(const std::vector<SweepRecord>& records);
void write_text_file(const std::string& path, std::string_view text);

struct SummaryRow {
  ModelKind model = ModelKind::linear_assignment;
  std::string estimator;
  double sigma = 0.0;
  int count = 0;
  int failures = 0;
  double mean_overlap = 0.0;
  double std_overlap = 0.0;  // population standard deviation
  double mean_runtime_ms = 0.0;
};

/// One row per (model, estimator, sigma), in first-appearance order of the
/// (model, estimator) pair and ascending sigma.
std::vector<SummaryRow> summarize(const std::vector<SweepRecord>& records);
std::string summary_to_json(const std::vector<SummaryRow>& rows);

}  // namespace geomatch
