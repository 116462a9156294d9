#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geomatch/assignment.hpp"
#include "geomatch/linalg.hpp"
#include "geomatch/models.hpp"
#include "geomatch/permutation.hpp"

namespace geomatch {

enum class EstimatorKind {
  mle_linear,
  aml_grid2d,
  aml_signflip,
  umeyama,
  alternating,
  qap_frobenius,
  grampa,
  degree,
  haar_mle,
};

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view name);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::mle_linear;
  Matcher matcher = Matcher::exact;
  int grid_size = 100;  // T0 angles per family
  double eta = 0.2;     // GRAMPA regularizer
  int max_iter = 100;
  int restarts = 10;
  int mc_samples = 1000;
  std::uint64_t seed = 0;
  std::optional<double> sigma;  // noise level assumed by haar_mle

  void validate() const;

  /// Kind name, suffixed with "_greedy" when rounding greedily.
  std::string label() const;
};

/// Accepts a bare kind name or a name ending in "_greedy".
EstimatorConfig parse_estimator_label(std::string_view label);

struct EstimateResult {
  Permutation permutation;
  double objective = 0.0;
  int iterations = 0;
  std::optional<OrthogonalMatrix> best_q;
  std::vector<double> trace;  // per-iteration objective of iterative methods (best restart)
};

/// Latent-coordinate surrogates A^{1/2} (for X) and B^{1/2} (for Y), n x d.
struct Factors {
  Matrix a;
  Matrix b;
};

/// Raw clouds for the linear assignment model, rank-d factors of the Gram
/// pair for the dot-product model, rank-d factors of the double-centered pair
/// for the distance model.
Factors factors_for(const Observation& obs);

/// LAP weights W[i][j] = <b_i, (a Q)_j>, so that sum_i W[i][pi(i)] = <B, Pi A Q>.
Matrix alignment_weights(const Factors& f, const Matrix& q);

/// (Pi A)^T B, the d x d matrix whose nuclear norm is the AML objective.
Matrix cross_moment(const Factors& f, const Permutation& pi);

double aml_objective(const Factors& f, const Permutation& pi);

EstimateResult mle_linear(const Observation& obs);

EstimateResult aml_grid2d(const Factors& f, int grid_size, Matcher matcher = Matcher::exact);
EstimateResult aml_grid2d(const Observation& obs, int grid_size, Matcher matcher = Matcher::exact);

/// The candidate set scanned by aml_grid2d: grid_size rotations then
/// grid_size reflections at angles 2 pi k / grid_size.
std::vector<OrthogonalMatrix> angle_grid(int grid_size);

EstimateResult aml_signflip(const Factors& f, Matcher matcher = Matcher::exact);
EstimateResult aml_signflip(const Observation& obs, Matcher matcher = Matcher::exact);

/// Spectral matching on unit eigenvectors u (of A) and v (of B), n x d each.
EstimateResult umeyama(const Matrix& u, const Matrix& v, Matcher matcher = Matcher::exact);
EstimateResult umeyama(const Observation& obs, Matcher matcher = Matcher::exact);

inline constexpr double kAscentTol = 1e-9;

EstimateResult alternating_procrustes(const Factors& f, const std::optional<OrthogonalMatrix>& init,
                                      int max_iter, int restarts, Rng& rng,
                                      Matcher matcher = Matcher::exact);

/// Alternating ascent on ||(Pi A)^T B||_F; the first start is Q = I / sqrt(d),
/// later starts are random unit-Frobenius matrices.
EstimateResult qap_frobenius(const Factors& f, int max_iter, int restarts, Rng& rng,
                             std::optional<Matrix> init = std::nullopt);

/// Rounds the GRAMPA similarity of two symmetric n x n matrices.
EstimateResult grampa(const Matrix& a, const Matrix& b, double eta);
EstimateResult grampa(const Observation& obs, double eta);

/// Matches the sort order of row sums, ties broken by index.
EstimateResult degree_match(const Matrix& a, const Matrix& b);
EstimateResult degree_match(const Observation& obs);

inline constexpr int kMaxHaarMleN = 8;

/// Haar-integral likelihood by exhaustive permutation enumeration, using the
/// same orthogonal samples for every permutation.
EstimateResult haar_mle(const Factors& f, double sigma, std::span<const OrthogonalMatrix> samples);
EstimateResult haar_mle(const Observation& obs, double sigma, int mc_samples, Rng& rng);

/// Double-centers both distance matrices and runs the inner estimator on the
/// centered Gram pair.
EstimateResult estimate_distance(const Observation& obs, const EstimatorConfig& inner);

bool supports(EstimatorKind kind, ModelKind model);

/// Dispatches on cfg.kind; the RNG is seeded from cfg.seed.
EstimateResult estimate(const Observation& obs, const EstimatorConfig& cfg);

}  // namespace geomatch
