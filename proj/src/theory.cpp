#include "geomatch/theory.hpp"

#include <cmath>
#include <limits>

#include "geomatch/error.hpp"

namespace geomatch {

CycleType::CycleType(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) fail(ErrorKind::contract, "cycle type needs at least one slot");
  long total = 0;
  for (std::size_t k = 1; k < counts_.size(); ++k) {
    if (counts_[k] < 0) fail(ErrorKind::contract, "cycle counts must be nonnegative");
    total += static_cast<long>(k) * counts_[k];
  }
  if (counts_[0] != 0) fail(ErrorKind::contract, "slot 0 of a cycle type must be zero");
  n_ = static_cast<int>(total);
  if (n_ < 1) fail(ErrorKind::contract, "cycle type describes an empty permutation");
  if (static_cast<int>(counts_.size()) > n_ + 1) {
    for (std::size_t k = n_ + 1; k < counts_.size(); ++k)
      if (counts_[k] != 0) fail(ErrorKind::contract, "cycle longer than n");
    counts_.resize(n_ + 1);
  }
  counts_.resize(n_ + 1, 0);
}

CycleType CycleType::of(const Permutation& p) { return CycleType(p.cycle_type()); }

std::vector<Orbit> likelihood_orbits(const Permutation& pi_star, const Permutation& pi) {
  return pi_star.inverse().compose(pi).cycles();
}

double loglik_diff(const Instance& inst, const Permutation& pi) {
  if (!(inst.sigma > 0.0)) fail(ErrorKind::parameter, "loglik_diff needs sigma > 0");
  if (pi.size() != inst.n()) fail(ErrorKind::dimension, "permutation size differs from n");
  const Matrix diff = pi.apply_rows(inst.x) - inst.pi_star.apply_rows(inst.x);
  return inner(diff, inst.y) / (inst.sigma * inst.sigma);
}

double delta_orbit(const Instance& inst, const Orbit& orbit) {
  const int t = static_cast<int>(orbit.size());
  if (t < 2) fail(ErrorKind::contract, "orbit needs at least two vertices");
  std::vector<char> seen(inst.n(), 0);
  for (int v : orbit) {
    if (v < 0 || v >= inst.n()) fail(ErrorKind::contract, "orbit vertex out of range");
    if (seen[v]) fail(ErrorKind::contract, "orbit has duplicate vertices");
    seen[v] = 1;
  }
  double total = 0.0;
  for (int k = 0; k < t; ++k) {
    const int cur = orbit[k];
    const int nxt = orbit[(k + 1) % t];
    total += (inst.x.row(inst.pi_star[nxt]) - inst.x.row(inst.pi_star[cur])).dot(inst.y.row(cur));
  }
  return total;
}

AugmentingPairs augmenting_2orbits(const Instance& inst) {
  const int n = inst.n();
  if (n < 2) fail(ErrorKind::parameter, "augmenting_2orbits needs n >= 2");
  AugmentingPairs out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (delta_orbit(inst, {i, j}) >= 0.0) out.pairs.emplace_back(i, j);
  std::vector<char> used(n, 0);
  for (const auto& [i, j] : out.pairs) {
    if (used[i] || used[j]) continue;
    used[i] = used[j] = 1;
    out.disjoint.emplace_back(i, j);
  }
  return out;
}

namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorKind::parameter, "sigma must be > 0");
}

// log[(s + 2 sigma)^{2k} + (s - 2 sigma)^{2k} - 2 cos(k theta)].
double log_bracket(int k, double theta, double sigma) {
  const double u = k * std::asinh(2.0 * sigma);
  const double sv = std::sin(0.5 * k * theta);
  if (u < 20.0) {
    const double sh = std::sinh(u);
    return std::log(4.0 * (sh * sh + sv * sv));
  }
  const double e = std::exp(-2.0 * u);
  const double base = 2.0 * u + 2.0 * std::log1p(-e);  // log(4 sinh^2 u)
  return base + std::log1p(4.0 * sv * sv * e / ((1.0 - e) * (1.0 - e)));
}

}  // namespace

double log_ak(int k, std::span<const double> thetas, double sigma) {
  require_sigma(sigma);
  if (k < 1) fail(ErrorKind::contract, "cycle length must be >= 1");
  const double d = static_cast<double>(thetas.size());
  double acc = k * d * std::log(4.0 * sigma);
  for (double th : thetas) acc -= 0.5 * log_bracket(k, th, sigma);
  return acc;
}

double log_mgf_closed_form(const CycleType& type, std::span<const double> thetas, double sigma) {
  require_sigma(sigma);
  if (thetas.empty()) fail(ErrorKind::dimension, "need one eigen-phase per dimension");
  double acc = 0.0;
  for (int k = 1; k <= type.n(); ++k)
    if (type.count(k) > 0) acc += type.count(k) * log_ak(k, thetas, sigma);
  return acc;
}

double mgf_closed_form(const CycleType& type, std::span<const double> thetas, double sigma) {
  return std::exp(log_mgf_closed_form(type, thetas, sigma));
}

double mgf_monte_carlo(int n, int d, const Permutation& pi, const OrthogonalMatrix& q, double sigma,
                       long samples, Rng& rng, bool centered) {
  require_sigma(sigma);
  if (pi.size() != n || q.dim() != d) fail(ErrorKind::dimension, "permutation or Q has the wrong size");
  if (samples < 1) fail(ErrorKind::parameter, "samples must be >= 1");
  std::normal_distribution<double> gauss;
  const double scale = 1.0 / (32.0 * sigma * sigma);
  const Matrix& qm = q.matrix();
  Matrix x(n, d), px(n, d);
  double acc = 0.0;
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) x(i, j) = gauss(rng);
    if (centered) x.rowwise() -= x.colwise().mean();
    for (int i = 0; i < n; ++i) px.row(i) = x.row(pi[i]);
    acc += std::exp(-scale * (x - px * qm).squaredNorm());
  }
  return acc / static_cast<double>(samples);
}

double mgf_distance_correction(std::span<const double> thetas, double sigma) {
  require_sigma(sigma);
  double log_factor = 0.0;
  for (double th : thetas) log_factor += 0.5 * std::log1p((2.0 - 2.0 * std::cos(th)) / (16.0 * sigma * sigma));
  return std::exp(log_factor);
}

NetLemmaCheck check_net_lemma(const Matrix& m, double delta) {
  if (m.rows() != 2 || m.cols() != 2) fail(ErrorKind::dimension, "net lemma check is for 2 x 2 matrices");
  NetLemmaCheck out;
  out.lhs = -std::numeric_limits<double>::infinity();
  for (const auto& q : net_O2(delta)) out.lhs = std::max(out.lhs, inner(m, q.matrix()));
  out.rhs = (1.0 - 0.5 * delta * delta) * nuclear_norm(m);
  out.holds = out.lhs >= out.rhs - 1e-12;
  return out;
}

ThresholdReport thresholds(int n, int d, double sigma, double epsilon) {
  if (n < 2 || d < 1) fail(ErrorKind::parameter, "thresholds need n >= 2 and d >= 1");
  require_sigma(sigma);
  const double logn = std::log(static_cast<double>(n));
  const double snr = std::log1p(1.0 / (sigma * sigma));
  ThresholdReport r;
  r.perfect_threshold = std::pow(static_cast<double>(n), -2.0 / d);
  r.almost_threshold = std::pow(static_cast<double>(n), -1.0 / d);
  r.mi_almost_lhs = 0.5 * d * snr - (1.0 - epsilon) * logn + 1.0 + std::log(n + 1.0) / n;
  r.exact_nec_lhs = 0.25 * d * snr - logn + std::log(static_cast<double>(d));
  return r;
}

}  // namespace geomatch
