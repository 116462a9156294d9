#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "geomatch/error.hpp"
#include "geomatch/linalg.hpp"
#include "oracles.hpp"

using namespace geomatch;

TEST_CASE("nuclear norm of small matrices") {
  Matrix m(2, 2);
  m << 3, 0, 0, -4;
  CHECK(nuclear_norm(m) == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(nuclear_norm(Matrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("nuclear norm agrees with eigenvalues of M^T M") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = standard_normal(3, 3, rng);
    const double expect = oracle::nuclear_norm_via_gram(m);
    CHECK(std::abs(nuclear_norm(m) - expect) <= 1e-9 * expect);
  }
}

TEST_CASE("nuclear norm rejects bad input") {
  CHECK_THROWS_AS(nuclear_norm(Matrix::Ones(2, 3)), Error);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = std::nan("");
  CHECK_THROWS_AS(nuclear_norm(m), Error);
  try {
    nuclear_norm(Matrix::Ones(2, 3));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::dimension);
  }
}

TEST_CASE("procrustes rotation examples") {
  CHECK(procrustes_rotation(Matrix::Identity(2, 2)).matrix().isApprox(Matrix::Identity(2, 2), 1e-12));
  Matrix m(2, 2);
  m << 2, 0, 0, -3;
  Matrix expect(2, 2);
  expect << 1, 0, 0, -1;
  CHECK((procrustes_rotation(m).matrix() - expect).norm() < 1e-12);
}

TEST_CASE("procrustes attains the nuclear norm") {
  Rng rng(12);
  for (int d : {1, 2, 3, 4, 6}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix m = standard_normal(d, d, rng);
      const OrthogonalMatrix q = procrustes_rotation(m);
      const double nn = nuclear_norm(m);
      CHECK(std::abs(inner(m, q.matrix()) - nn) <= 1e-9 * (1.0 + nn));
    }
  }
}

TEST_CASE("procrustes on rank-deficient input still attains the nuclear norm") {
  Rng rng(13);
  const Vector u = standard_normal(3, 1, rng), v = standard_normal(3, 1, rng);
  const Matrix m = u * v.transpose();
  const OrthogonalMatrix q = procrustes_rotation(m);
  CHECK(std::abs(inner(m, q.matrix()) - nuclear_norm(m)) < 1e-9 * nuclear_norm(m));
  const OrthogonalMatrix z = procrustes_rotation(Matrix::Zero(3, 3));
  CHECK(z.dim() == 3);
}

TEST_CASE("nuclear norm is right orthogonal invariant") {
  Rng rng(14);
  for (int d : {2, 3, 5}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix m = standard_normal(d, d, rng);
      const Matrix q = haar_orthogonal(d, rng).matrix();
      CHECK(std::abs(nuclear_norm(m * q) - nuclear_norm(m)) <= 1e-9 * nuclear_norm(m));
    }
  }
}

TEST_CASE("rotation2d forms") {
  CHECK((rotation2d(0.0, false).matrix() - Matrix::Identity(2, 2)).norm() < 1e-15);
  Matrix quarter(2, 2);
  quarter << 0, -1, 1, 0;
  CHECK((rotation2d(std::numbers::pi / 2, false).matrix() - quarter).norm() < 1e-15);
  Matrix flip(2, 2);
  flip << 1, 0, 0, -1;
  CHECK((rotation2d(0.0, true).matrix() - flip).norm() < 1e-15);
  CHECK(rotation2d(0.3, false).determinant() == doctest::Approx(1.0));
  CHECK(rotation2d(0.3, true).determinant() == doctest::Approx(-1.0));
}

TEST_CASE("orthogonal matrix validation") {
  CHECK_THROWS_AS(OrthogonalMatrix(Matrix::Ones(2, 2)), Error);
  CHECK_THROWS_AS(OrthogonalMatrix(Matrix::Identity(2, 3)), Error);
  CHECK_NOTHROW(OrthogonalMatrix(Matrix::Identity(3, 3)));
}

TEST_CASE("sign flip group") {
  const auto g1 = sign_flip_group(1);
  REQUIRE(g1.size() == 2);
  CHECK(g1[0].matrix()(0, 0) == 1.0);
  CHECK(g1[1].matrix()(0, 0) == -1.0);

  const auto g2 = sign_flip_group(2);
  CHECK(g2.size() == 4);
  for (const auto& q : g2) CHECK((q.matrix().transpose() * q.matrix() - Matrix::Identity(2, 2)).norm() < 1e-15);

  const auto g3 = sign_flip_group(3);
  CHECK(g3.size() == 8);
  std::set<std::vector<double>> seen;
  for (const auto& q : g3) seen.insert({q.matrix()(0, 0), q.matrix()(1, 1), q.matrix()(2, 2)});
  CHECK(seen.size() == 8);

  // Lexicographic with +1 before -1, first slot most significant.
  const auto v = sign_vectors(2);
  CHECK(v == std::vector<std::vector<int>>{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
}

TEST_CASE("sign flip group is closed and involutive") {
  const auto g = sign_flip_group(3);
  for (const auto& a : g) {
    CHECK(((a * a).matrix() - Matrix::Identity(3, 3)).norm() == 0.0);
    for (const auto& b : g) {
      const Matrix ab = (a * b).matrix();
      bool found = false;
      for (const auto& c : g) found = found || (c.matrix() - ab).norm() == 0.0;
      CHECK(found);
    }
  }
}

TEST_CASE("sign flip group capacity") {
  CHECK_THROWS_AS(sign_flip_group(kMaxSignFlipDim + 1), Error);
  CHECK_THROWS_AS(sign_flip_group(0), Error);
  try {
    sign_flip_group(kMaxSignFlipDim + 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capacity);
  }
}

TEST_CASE("haar samples are orthogonal and seeded") {
  Rng rng(15);
  for (int d : {1, 2, 3, 7}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix q = haar_orthogonal(d, rng).matrix();
      CHECK((q.transpose() * q - Matrix::Identity(d, d)).norm() <= 1e-9);
      CHECK(std::abs(std::abs(q.determinant()) - 1.0) <= 1e-9);
    }
  }
  Rng a(99), b(99);
  CHECK(haar_orthogonal(4, a).matrix() == haar_orthogonal(4, b).matrix());
}

TEST_CASE("haar inner products have zero mean") {
  Rng rng(16);
  Matrix m(3, 3);
  m << 1.0, 0.5, -0.2, 0.3, 2.0, 0.0, -1.0, 0.1, 0.7;
  const int draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < draws; ++s) {
    const double v = inner(haar_orthogonal(3, rng).matrix(), m);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean) <= 4.0 * se);
}

TEST_CASE("haar samples hit both orientations") {
  Rng rng(17);
  int negative = 0;
  for (int s = 0; s < 2000; ++s) negative += haar_orthogonal(2, rng).determinant() < 0 ? 1 : 0;
  CHECK(negative > 900);
  CHECK(negative < 1100);
}

TEST_CASE("net covers the identity and random elements") {
  Rng rng(18);
  for (double delta : {1.5, 0.5, 0.1, 0.02}) {
    const auto net = net_O2(delta);
    CHECK(oracle::net_distance(net, Matrix::Identity(2, 2)) <= delta);
    for (int s = 0; s < 1000; ++s) {
      const Matrix q = haar_orthogonal(2, rng).matrix();
      CHECK(oracle::net_distance(net, q) <= delta);
    }
  }
}

TEST_CASE("net size follows the spacing bound") {
  const double delta = 0.1;
  const auto net = net_O2(delta);
  const double bound = 2.0 * std::ceil(2.0 * std::numbers::pi / (2.0 * std::asin(0.05))) + 2.0;
  CHECK(static_cast<double>(net.size()) <= bound);
  CHECK(net_angle_spacing(delta) == doctest::Approx(2.0 * std::asin(0.05)));
}

TEST_CASE("net rejects out-of-range resolution") {
  CHECK_THROWS_AS(net_O2(0.0), Error);
  CHECK_THROWS_AS(net_O2(2.0), Error);
  CHECK_THROWS_AS(net_O2(-1.0), Error);
}

TEST_CASE("operator norm of a 2x2 matrix") {
  Rng rng(19);
  for (int s = 0; s < 50; ++s) {
    const Matrix m = standard_normal(2, 2, rng);
    CHECK(operator_norm(m) == doctest::Approx(oracle::operator_norm_2x2(m)).epsilon(1e-10));
  }
}

TEST_CASE("eigen phases of rotations and reflections") {
  const auto r = eigen_phases(rotation2d(0.7, false));
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(-0.7));
  CHECK(r[1] == doctest::Approx(0.7));
  const auto f = eigen_phases(rotation2d(1.1, true));
  REQUIRE(f.size() == 2);
  CHECK(std::abs(f[0]) < 1e-9);
  CHECK(std::abs(std::abs(f[1]) - std::numbers::pi) < 1e-9);
  for (double t : eigen_phases(OrthogonalMatrix::identity(3))) CHECK(std::abs(t) < 1e-12);
}

TEST_CASE("symmetric eigen returns descending eigenvalues") {
  Rng rng(20);
  const Matrix g = standard_normal(6, 6, rng);
  const Matrix a = g + g.transpose();
  const auto eig = symmetric_eigen(a);
  for (int i = 1; i < 6; ++i) CHECK(eig.values(i - 1) >= eig.values(i));
  CHECK((eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose() - a).norm() < 1e-10);
}
