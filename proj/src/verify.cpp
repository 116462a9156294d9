#include "geomatch/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "geomatch/theory.hpp"

namespace geomatch {

namespace {

template <typename... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[200];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

VerifyCheck mgf_check(bool centered, const VerifyOptions& opts) {
  VerifyCheck check{centered ? "mgf_centered_vs_monte_carlo" : "mgf_closed_form_vs_monte_carlo", true, {}};
  Rng rng(opts.seed + (centered ? 1 : 0));
  std::uniform_real_distribution<double> sig(0.2, 0.5);
  double worst = 0.0;
  for (int c = 0; c < 5; ++c) {
    const Permutation pi = Permutation::random(4, rng);
    const OrthogonalMatrix q = haar_orthogonal(2, rng);
    const double sigma = sig(rng);
    const auto phases = eigen_phases(q);
    double expected = mgf_closed_form(CycleType::of(pi), phases, sigma);
    if (centered) expected *= mgf_distance_correction(phases, sigma);
    const double mc = mgf_monte_carlo(4, 2, pi, q, sigma, opts.mgf_samples, rng, centered);
    const double rel = std::abs(mc - expected) / expected;
    worst = std::max(worst, rel);
    if (rel > 0.05) check.passed = false;
  }
  check.detail = fmt("worst relative error %.4g over 5 configurations (limit 0.05)", worst);
  return check;
}

VerifyCheck net_check(const VerifyOptions& opts) {
  VerifyCheck check{"net_lemma", true, {}};
  Rng rng(opts.seed + 2);
  int violations = 0;
  for (double delta : {0.5, 0.1, 0.02})
    for (int t = 0; t < 100; ++t)
      if (!check_net_lemma(standard_normal(2, 2, rng), delta).holds) ++violations;
  check.passed = violations == 0;
  check.detail = std::to_string(violations) + " violations over 300 matrices";
  return check;
}

VerifyCheck ak_bounds_check() {
  VerifyCheck check{"ak_bounds", true, {}};
  int bad = 0, total = 0;
  for (int k = 1; k <= 6; ++k)
    for (double sigma : {0.01, 0.1, 0.3, 1.0})
      for (double t1 = -std::numbers::pi; t1 <= std::numbers::pi; t1 += 0.37)
        for (double t2 : {0.0, 1.1, -2.5}) {
          const double th[] = {t1, t2};
          const double id[] = {0.0, 0.0};
          const double la = log_ak(k, th, sigma);
          const double li = log_ak(k, id, sigma);
          const double cap = (k - 1) * 2 * std::log(4 * sigma);
          ++total;
          if (la > li + 1e-12 || li > cap + 1e-12) ++bad;
        }
  check.passed = bad == 0;
  check.detail = std::to_string(bad) + " of " + std::to_string(total) + " grid points violate a_k(Q) <= a_k(I) <= (4 sigma)^{(k-1)d}";
  return check;
}

VerifyCheck orbit_check(const VerifyOptions& opts) {
  VerifyCheck check{"orbit_identity", true, {}};
  Rng rng(opts.seed + 3);
  std::uniform_int_distribution<int> size(2, 20), dim(1, 4);
  std::uniform_real_distribution<double> noise(0.05, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Instance inst = sample_instance(size(rng), dim(rng), noise(rng), std::nullopt, rng);
    const Permutation pi = Permutation::random(inst.n(), rng);
    double total = 0.0;
    for (const auto& o : likelihood_orbits(inst.pi_star, pi)) total += delta_orbit(inst, o);
    const double lhs = loglik_diff(inst, pi) * inst.sigma * inst.sigma;
    worst = std::max(worst, std::abs(lhs - total));
  }
  check.passed = worst <= 1e-9;
  check.detail = fmt("max |sigma^2 L_diff - sum Delta(O)| = %.3g over 100 pairs", worst);
  return check;
}

}  // namespace

std::vector<VerifyCheck> run_verification(const VerifyOptions& opts) {
  return {mgf_check(false, opts), mgf_check(true, opts), net_check(opts), ak_bounds_check(),
          orbit_check(opts)};
}

}  // namespace geomatch
