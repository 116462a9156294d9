#pragma once

#include <span>
#include <utility>
#include <vector>

#include "geomatch/linalg.hpp"
#include "geomatch/models.hpp"
#include "geomatch/permutation.hpp"

namespace geomatch {

/// Distinct vertices (i_1, ..., i_t), t >= 2, read cyclically.
using Orbit = std::vector<int>;

/// n_k = number of k-cycles, k = 1..n; index 0 is unused.
class CycleType {
public:
  explicit CycleType(std::vector<int> counts);
  static CycleType of(const Permutation& p);

  int n() const { return n_; }
  int count(int k) const { return counts_.at(k); }
  const std::vector<int>& counts() const { return counts_; }

private:
  std::vector<int> counts_;
  int n_ = 0;
};

/// Orbits of (pi*)^{-1} o pi: each cycle lists i, sigma(i), sigma^2(i), ...
/// with sigma = (pi*)^{-1} o pi, so pi(i_k) = pi*(i_{k+1}).
std::vector<Orbit> likelihood_orbits(const Permutation& pi_star, const Permutation& pi);

/// (1 / sigma^2) <Pi X - Pi* X, Y>.
double loglik_diff(const Instance& inst, const Permutation& pi);

/// sum_k <X_{pi*(i_{k+1})} - X_{pi*(i_k)}, Y_{i_k}>, indices taken cyclically.
double delta_orbit(const Instance& inst, const Orbit& orbit);

struct AugmentingPairs {
  std::vector<std::pair<int, int>> pairs;     // all i < j with Delta((i, j)) >= 0
  std::vector<std::pair<int, int>> disjoint;  // greedy vertex-disjoint subset, index order
};

AugmentingPairs augmenting_2orbits(const Instance& inst);

/// log a_k(Q) for eigen-phases thetas; see mgf_closed_form.
double log_ak(int k, std::span<const double> thetas, double sigma);

/// E exp(-||X - Pi X Q||_F^2 / (32 sigma^2)) for standard Gaussian X, as the
/// product over cycle lengths of a_k(Q)^{n_k}.  The bracket
/// (s + 2 sigma)^{2k} + (s - 2 sigma)^{2k} - 2 cos(k theta), s = sqrt(1 + 4 sigma^2),
/// is evaluated as 4 sinh^2(k asinh(2 sigma)) + 4 sin^2(k theta / 2), which is
/// the same quantity without the cancellation near k theta = 0.
double mgf_closed_form(const CycleType& type, std::span<const double> thetas, double sigma);
double log_mgf_closed_form(const CycleType& type, std::span<const double> thetas, double sigma);

/// Empirical mean of exp(-||X - Pi X Q||_F^2 / (32 sigma^2)).  With `centered`
/// every draw is replaced by (I - F) X before evaluation.
double mgf_monte_carlo(int n, int d, const Permutation& pi, const OrthogonalMatrix& q, double sigma,
                       long samples, Rng& rng, bool centered = false);

/// prod_l (1 + (2 - 2 cos theta_l) / (16 sigma^2))^{1/2}: the ratio between
/// the centered-cloud MGF and mgf_closed_form.
double mgf_distance_correction(std::span<const double> thetas, double sigma);

struct NetLemmaCheck {
  double lhs = 0.0;  // best <M, Q> over the net
  double rhs = 0.0;  // (1 - delta^2 / 2) ||M||_*
  bool holds = false;
};

NetLemmaCheck check_net_lemma(const Matrix& m, double delta);

struct ThresholdReport {
  double perfect_threshold = 0.0;  // n^{-2/d}
  double almost_threshold = 0.0;   // n^{-1/d}
  double mi_almost_lhs = 0.0;      // must be >= 0 for almost perfect recovery
  double exact_nec_lhs = 0.0;      // bounded above for exact recovery
};

ThresholdReport thresholds(int n, int d, double sigma, double epsilon = 0.0);

}  // namespace geomatch
