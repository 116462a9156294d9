#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "geomatch/linalg.hpp"
#include "geomatch/permutation.hpp"

namespace geomatch {

enum class ModelKind { linear_assignment, dot_product, distance };

std::string_view to_string(ModelKind kind);
ModelKind parse_model(std::string_view name);

/// Ground truth from the linear assignment model Y = Pi* X + sigma Z.
struct Instance {
  Matrix x;
  Matrix y;
  Permutation pi_star;
  double sigma = 0.0;
  std::optional<Matrix> covariance;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(x.rows()); }
  int d() const { return static_cast<int>(x.cols()); }
};

/// What an estimator may see.  For the linear assignment model left/right are
/// the raw n x d clouds X and Y; otherwise they are symmetric n x n matrices
/// (Gram or squared-distance) for X and Y respectively.
struct Observation {
  ModelKind model = ModelKind::linear_assignment;
  Matrix left;
  Matrix right;
  int dim = 0;  // latent dimension d

  int n() const { return static_cast<int>(left.rows()); }
};

/// Smallest eigenvalue accepted for a user-supplied covariance.
inline constexpr double kMinCovarianceEigen = 1e-6;
/// Eigenvalue slack tolerated when a matrix is required to be PSD.
inline constexpr double kPsdTol = 1e-8;

Instance sample_instance(int n, int d, double sigma, const std::optional<Matrix>& covariance,
                         Rng& rng);

/// Seeds a fresh generator and records the seed in the instance.
Instance sample_instance(int n, int d, double sigma, const std::optional<Matrix>& covariance,
                         std::uint64_t seed);

Observation observe(const Instance& inst, ModelKind model);

Matrix gram(const Matrix& x);
Matrix squared_distances(const Matrix& x);

/// Classical MDS centering -1/2 (I - F) D (I - F) with F = 11^T / n.
Matrix double_center(const Matrix& d);

/// Rank-d factor U_d Lambda_d^{1/2} of a PSD matrix, with negative eigenvalues
/// clipped to zero and each column's largest-magnitude entry made positive.
Matrix factorize(const Matrix& a, int d);

/// Unit eigenvectors behind factorize(a, d), same column signs.
Matrix top_eigenvectors(const Matrix& a, int d);

/// 64-bit FNV-1a digest of the instance payload (X, Y, pi*, sigma).
std::uint64_t instance_hash(const Instance& inst);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(std::string_view text);

}  // namespace geomatch
