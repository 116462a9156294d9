#include "geomatch/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "geomatch/error.hpp"

namespace geomatch {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) fail(ErrorKind::dimension, what);
}

}  // namespace

OrthogonalMatrix::OrthogonalMatrix(Matrix q) : q_(std::move(q)) {
  require_square(q_, "orthogonal matrix must be square");
  require_finite(q_, "orthogonal matrix");
  const Matrix id = Matrix::Identity(q_.rows(), q_.cols());
  if ((q_.transpose() * q_ - id).norm() > kOrthogonalityTol)
    fail(ErrorKind::contract, "matrix is not orthogonal");
}

OrthogonalMatrix OrthogonalMatrix::identity(int d) {
  return OrthogonalMatrix(Matrix::Identity(d, d), Unchecked{});
}

OrthogonalMatrix OrthogonalMatrix::operator*(const OrthogonalMatrix& other) const {
  if (dim() != other.dim()) fail(ErrorKind::dimension, "orthogonal product size mismatch");
  return OrthogonalMatrix(q_ * other.q_, Unchecked{});
}

OrthogonalMatrix OrthogonalMatrix::transpose() const {
  return OrthogonalMatrix(q_.transpose(), Unchecked{});
}

double inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::dimension, "inner product of differently shaped matrices");
  return a.cwiseProduct(b).sum();
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) fail(ErrorKind::parameter, std::string(what) + " has non-finite entries");
}

double nuclear_norm(const Matrix& m) {
  require_square(m, "nuclear_norm expects a square matrix");
  require_finite(m, "nuclear_norm input");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

OrthogonalMatrix procrustes_rotation(const Matrix& m) {
  require_square(m, "procrustes_rotation expects a square matrix");
  require_finite(m, "procrustes_rotation input");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix q = svd.matrixU() * svd.matrixV().transpose();
  // Re-orthonormalize away the last few ulps so the validated constructor
  // never rejects an SVD product.
  Eigen::HouseholderQR<Matrix> qr(q);
  Matrix qq = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < qq.cols(); ++i)
    if (r(i, i) < 0) qq.col(i) = -qq.col(i);
  return OrthogonalMatrix(std::move(qq));
}

OrthogonalMatrix rotation2d(double theta, bool reflect) {
  if (!std::isfinite(theta)) fail(ErrorKind::parameter, "rotation angle must be finite");
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix q(2, 2);
  if (reflect)
    q << c, s, s, -c;
  else
    q << c, -s, s, c;
  return OrthogonalMatrix(std::move(q));
}

std::vector<std::vector<int>> sign_vectors(int d) {
  if (d < 1) fail(ErrorKind::dimension, "sign flips need d >= 1");
  if (d > kMaxSignFlipDim) fail(ErrorKind::capacity, "sign-flip enumeration capped at d = 20");
  const std::uint64_t count = std::uint64_t{1} << d;
  std::vector<std::vector<int>> out;
  out.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<int> s(d);
    // The first coordinate is the most significant bit.
    for (int l = 0; l < d; ++l) s[l] = (mask >> (d - 1 - l)) & 1 ? -1 : 1;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<OrthogonalMatrix> sign_flip_group(int d) {
  std::vector<OrthogonalMatrix> out;
  for (const auto& s : sign_vectors(d)) {
    Vector diag(d);
    for (int l = 0; l < d; ++l) diag(l) = s[l];
    out.emplace_back(Matrix(diag.asDiagonal()));
  }
  return out;
}

Matrix standard_normal(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> gauss;
  Matrix m(rows, cols);
  // Row-major draw order keeps sampled clouds stable under layout changes.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

OrthogonalMatrix haar_orthogonal(int d, Rng& rng) {
  if (d < 1) fail(ErrorKind::dimension, "haar_orthogonal needs d >= 1");
  const Matrix g = standard_normal(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return OrthogonalMatrix(std::move(q));
}

double net_angle_spacing(double delta) {
  if (!(delta > 0.0 && delta < 2.0)) fail(ErrorKind::parameter, "net resolution must lie in (0, 2)");
  return 2.0 * std::asin(delta / 2.0);
}

std::vector<OrthogonalMatrix> net_O2(double delta) {
  const double spacing = net_angle_spacing(delta);
  const int steps = static_cast<int>(std::ceil(2.0 * std::numbers::pi / spacing));
  std::vector<OrthogonalMatrix> net;
  net.reserve(2 * steps);
  for (int reflect = 0; reflect < 2; ++reflect)
    for (int k = 0; k < steps; ++k)
      net.push_back(rotation2d(2.0 * std::numbers::pi * k / steps, reflect == 1));
  return net;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

std::vector<double> eigen_phases(const OrthogonalMatrix& q) {
  Eigen::EigenSolver<Matrix> es(q.matrix(), false);
  std::vector<double> phases;
  phases.reserve(q.dim());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto z = es.eigenvalues()(i);
    double im = z.imag();
    if (std::abs(im) < 1e-12) im = 0.0;
    phases.push_back(std::atan2(im, z.real()));
  }
  std::sort(phases.begin(), phases.end());
  return phases;
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
  require_square(a, "symmetric_eigen expects a square matrix");
  require_finite(a, "symmetric_eigen input");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) fail(ErrorKind::contract, "eigendecomposition did not converge");
  const Eigen::Index n = a.rows();
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

}  // namespace geomatch
