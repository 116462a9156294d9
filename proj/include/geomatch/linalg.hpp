#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace geomatch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Tolerance on ||Q^T Q - I||_F accepted for an orthogonal matrix.
inline constexpr double kOrthogonalityTol = 1e-9;

/// A d x d matrix validated to lie in O(d) at construction.
class OrthogonalMatrix {
public:
  OrthogonalMatrix() = default;
  explicit OrthogonalMatrix(Matrix q);

  static OrthogonalMatrix identity(int d);

  int dim() const { return static_cast<int>(q_.rows()); }
  const Matrix& matrix() const { return q_; }
  double determinant() const { return q_.determinant(); }

  OrthogonalMatrix operator*(const OrthogonalMatrix& other) const;
  OrthogonalMatrix transpose() const;

private:
  struct Unchecked {};
  OrthogonalMatrix(Matrix q, Unchecked) : q_(std::move(q)) {}

  Matrix q_;
};

/// Frobenius inner product <A, B> = tr(A^T B).
double inner(const Matrix& a, const Matrix& b);

void require_finite(const Matrix& m, const char* what);

/// Sum of singular values; equal to max over O(d) of <M, Q>.
double nuclear_norm(const Matrix& m);

/// Q* = U V^T maximizing <M, Q> over O(d).  Rank-deficient M yields one of the
/// maximizers; the attained value is always nuclear_norm(M).
OrthogonalMatrix procrustes_rotation(const Matrix& m);

/// [[c,-s],[s,c]] for a rotation, [[c,s],[s,-c]] for a reflection.
OrthogonalMatrix rotation2d(double theta, bool reflect);

inline constexpr int kMaxSignFlipDim = 20;

/// The 2^d sign vectors in lexicographic order, +1 before -1 in each slot.
std::vector<std::vector<int>> sign_vectors(int d);

/// Diagonal +-1 matrices, same order as sign_vectors(d).
std::vector<OrthogonalMatrix> sign_flip_group(int d);

/// Haar-distributed element of O(d): QR of a Gaussian matrix with the sign of
/// diag(R) fixed positive.
OrthogonalMatrix haar_orthogonal(int d, Rng& rng);

/// Angle spacing used by net_O2: the chord |e^{ia} - e^{ib}| <= delta holds
/// whenever |a - b| <= 2 asin(delta / 2).
double net_angle_spacing(double delta);

/// Finite subset of O(2) covering every element within operator-norm distance
/// delta: equally spaced rotations followed by equally spaced reflections.
std::vector<OrthogonalMatrix> net_O2(double delta);

/// Spectral (operator 2-) norm.
double operator_norm(const Matrix& m);

/// Eigen-phases theta_l in [-pi, pi] of an orthogonal matrix, sorted ascending.
std::vector<double> eigen_phases(const OrthogonalMatrix& q);

/// Symmetric eigendecomposition with eigenvalues in descending order.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;  // columns match values
};
SymmetricEigen symmetric_eigen(const Matrix& a);

Matrix standard_normal(int rows, int cols, Rng& rng);

}  // namespace geomatch
