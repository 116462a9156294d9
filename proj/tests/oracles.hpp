// Reference computations for tests.  Deliberately naive and independent of
// the library code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;

inline double nuclear_norm_via_gram(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m.transpose() * m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    s += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return s;
}

inline double operator_norm_2x2(const Mat& m) {
  const double f = m.squaredNorm();
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return std::sqrt((f + std::sqrt(std::max(0.0, f * f - 4.0 * det * det))) / 2.0);
}

template <typename Net>
double net_distance(const Net& net, const Mat& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& n : net) best = std::min(best, operator_norm_2x2(q - n.matrix()));
  return best;
}

// Every permutation of {0..n-1} in lexicographic order.
inline void each_perm(int n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do f(p);
  while (std::next_permutation(p.begin(), p.end()));
}

inline double assignment_value(const Mat& w, const std::vector<int>& p) {
  double s = 0.0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) s += w(i, p[i]);
  return s;
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<int> perm;
};

inline Best brute_force_lap(const Mat& w) {
  Best b;
  each_perm(static_cast<int>(w.rows()), [&](const std::vector<int>& p) {
    const double v = assignment_value(w, p);
    if (v > b.value) b = {v, p};
  });
  return b;
}

// Picks the largest remaining entry by a full scan each round.
inline std::vector<int> naive_greedy(const Mat& w) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> p(n, -1);
  std::vector<bool> row_done(n, false), col_done(n, false);
  for (int round = 0; round < n; ++round) {
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (row_done[i] || col_done[j]) continue;
        if (bi < 0 || w(i, j) > w(bi, bj)) bi = i, bj = j;
      }
    p[bi] = bj;
    row_done[bi] = col_done[bj] = true;
  }
  return p;
}

// <B, Pi A Q> with (Pi A) row i = A row p[i].
inline double aligned_inner(const Mat& a, const Mat& b, const std::vector<int>& p, const Mat& q) {
  const Mat aq = a * q;
  double s = 0.0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) s += b.row(i).dot(aq.row(p[i]));
  return s;
}

inline Mat permute_rows(const Mat& a, const std::vector<int>& p) {
  Mat out(a.rows(), a.cols());
  for (int i = 0; i < static_cast<int>(p.size()); ++i) out.row(i) = a.row(p[i]);
  return out;
}

// Nuclear norm of (Pi A)^T B through the Gram eigenvalues.
inline double aml_value(const Mat& a, const Mat& b, const std::vector<int>& p) {
  return nuclear_norm_via_gram(permute_rows(a, p).transpose() * b);
}

inline double frobenius_value(const Mat& a, const Mat& b, const std::vector<int>& p) {
  return (permute_rows(a, p).transpose() * b).norm();
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace oracle
