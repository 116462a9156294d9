#include "geomatch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "geomatch/error.hpp"

namespace geomatch {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr std::pair<EstimatorKind, std::string_view> kKindNames[] = {
    {EstimatorKind::mle_linear, "mle_linear"},
    {EstimatorKind::aml_grid2d, "aml_grid2d"},
    {EstimatorKind::aml_signflip, "aml_signflip"},
    {EstimatorKind::umeyama, "umeyama"},
    {EstimatorKind::alternating, "alternating"},
    {EstimatorKind::qap_frobenius, "qap_frobenius"},
    {EstimatorKind::grampa, "grampa"},
    {EstimatorKind::degree, "degree"},
    {EstimatorKind::haar_mle, "haar_mle"},
};

constexpr std::string_view kGreedySuffix = "_greedy";

void require_model(const Observation& obs, ModelKind model, const char* who) {
  if (obs.model != model)
    fail(ErrorKind::contract, std::string(who) + " expects a " + std::string(to_string(model)) +
                                  " observation, got " + std::string(to_string(obs.model)));
}

void require_factors(const Factors& f) {
  if (f.a.rows() != f.b.rows() || f.a.cols() != f.b.cols() || f.a.rows() == 0)
    fail(ErrorKind::dimension, "factor pair must have identical non-empty shapes");
}

Matrix symmetric_payload_left(const Observation& obs) {
  return obs.model == ModelKind::linear_assignment ? gram(obs.left) : obs.left;
}

Matrix symmetric_payload_right(const Observation& obs) {
  return obs.model == ModelKind::linear_assignment ? gram(obs.right) : obs.right;
}

Observation centered(const Observation& obs) {
  require_model(obs, ModelKind::distance, "estimate_distance");
  Observation c;
  c.model = ModelKind::dot_product;
  c.dim = obs.dim;
  c.left = double_center(obs.left);
  c.right = double_center(obs.right);
  return c;
}

// Scans candidate rotations and keeps the first strictly best LAP value, so
// the result depends only on candidate order.
EstimateResult best_over(const Factors& f, std::span<const OrthogonalMatrix> candidates,
                         Matcher matcher) {
  require_factors(f);
  EstimateResult best;
  best.objective = kNegInf;
  LapWarmStart warm;
  for (const auto& q : candidates) {
    const Matrix w = alignment_weights(f, q.matrix());
    Assignment a = matcher == Matcher::exact ? solve_lap_max(w, warm) : greedy_match(w);
    ++best.iterations;
    if (a.objective > best.objective) {
      best.objective = a.objective;
      best.permutation = std::move(a.permutation);
      best.best_q = q;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  fail(ErrorKind::parameter, "unknown estimator '" + std::string(name) + "'");
}

void EstimatorConfig::validate() const {
  if (grid_size < 1) fail(ErrorKind::parameter, "grid_size must be >= 1");
  if (!(eta > 0.0)) fail(ErrorKind::parameter, "eta must be > 0");
  if (max_iter < 1) fail(ErrorKind::parameter, "max_iter must be >= 1");
  if (restarts < 1) fail(ErrorKind::parameter, "restarts must be >= 1");
  if (mc_samples < 1) fail(ErrorKind::parameter, "mc_samples must be >= 1");
}

std::string EstimatorConfig::label() const {
  std::string s(to_string(kind));
  if (matcher == Matcher::greedy) s += kGreedySuffix;
  return s;
}

EstimatorConfig parse_estimator_label(std::string_view label) {
  EstimatorConfig cfg;
  if (label.size() > kGreedySuffix.size() && label.ends_with(kGreedySuffix)) {
    cfg.matcher = Matcher::greedy;
    label.remove_suffix(kGreedySuffix.size());
  }
  cfg.kind = parse_estimator_kind(label);
  return cfg;
}

Factors factors_for(const Observation& obs) {
  switch (obs.model) {
    case ModelKind::linear_assignment:
      return {obs.left, obs.right};
    case ModelKind::dot_product:
      return {factorize(obs.left, obs.dim), factorize(obs.right, obs.dim)};
    case ModelKind::distance:
      return {factorize(double_center(obs.left), obs.dim),
              factorize(double_center(obs.right), obs.dim)};
  }
  fail(ErrorKind::contract, "unknown model");
}

Matrix alignment_weights(const Factors& f, const Matrix& q) {
  return f.b * (f.a * q).transpose();
}

Matrix cross_moment(const Factors& f, const Permutation& pi) {
  return pi.apply_rows(f.a).transpose() * f.b;
}

double aml_objective(const Factors& f, const Permutation& pi) {
  return nuclear_norm(cross_moment(f, pi));
}

EstimateResult mle_linear(const Observation& obs) {
  require_model(obs, ModelKind::linear_assignment, "mle_linear");
  if (obs.left.rows() != obs.right.rows() || obs.left.cols() != obs.right.cols())
    fail(ErrorKind::dimension, "clouds must have identical shapes");
  Assignment a = solve_lap_max(obs.right * obs.left.transpose());
  EstimateResult r;
  r.permutation = std::move(a.permutation);
  r.objective = a.objective;
  r.iterations = 1;
  return r;
}

std::vector<OrthogonalMatrix> angle_grid(int grid_size) {
  if (grid_size < 1) fail(ErrorKind::parameter, "grid_size must be >= 1");
  std::vector<OrthogonalMatrix> grid;
  grid.reserve(2 * grid_size);
  for (int reflect = 0; reflect < 2; ++reflect)
    for (int k = 0; k < grid_size; ++k)
      grid.push_back(rotation2d(2.0 * std::numbers::pi * k / grid_size, reflect == 1));
  return grid;
}

EstimateResult aml_grid2d(const Factors& f, int grid_size, Matcher matcher) {
  if (f.a.cols() != 2) fail(ErrorKind::unsupported_dimension, "aml_grid2d requires d = 2");
  const auto grid = angle_grid(grid_size);
  return best_over(f, grid, matcher);
}

EstimateResult aml_grid2d(const Observation& obs, int grid_size, Matcher matcher) {
  if (obs.dim != 2) fail(ErrorKind::unsupported_dimension, "aml_grid2d requires d = 2");
  return aml_grid2d(factors_for(obs), grid_size, matcher);
}

EstimateResult aml_signflip(const Factors& f, Matcher matcher) {
  const auto group = sign_flip_group(static_cast<int>(f.a.cols()));
  return best_over(f, group, matcher);
}

EstimateResult aml_signflip(const Observation& obs, Matcher matcher) {
  if (obs.dim > kMaxSignFlipDim) fail(ErrorKind::capacity, "sign-flip enumeration capped at d = 20");
  return aml_signflip(factors_for(obs), matcher);
}

EstimateResult umeyama(const Matrix& u, const Matrix& v, Matcher matcher) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() == 0)
    fail(ErrorKind::dimension, "eigenvector bases must have identical shapes");
  const int d = static_cast<int>(u.cols());
  EstimateResult best;
  best.objective = kNegInf;
  for (const auto& signs : sign_vectors(d)) {
    Matrix w = Matrix::Zero(u.rows(), u.rows());
    for (int l = 0; l < d; ++l) w.noalias() += signs[l] * v.col(l) * u.col(l).transpose();
    Assignment a = match(w, matcher);
    ++best.iterations;
    if (a.objective > best.objective) {
      best.objective = a.objective;
      best.permutation = std::move(a.permutation);
      Vector diag(d);
      for (int l = 0; l < d; ++l) diag(l) = signs[l];
      best.best_q = OrthogonalMatrix(Matrix(diag.asDiagonal()));
    }
  }
  return best;
}

EstimateResult umeyama(const Observation& obs, Matcher matcher) {
  if (obs.dim > kMaxSignFlipDim) fail(ErrorKind::capacity, "sign enumeration capped at d = 20");
  Matrix a, b;
  switch (obs.model) {
    case ModelKind::linear_assignment:
      a = gram(obs.left);
      b = gram(obs.right);
      break;
    case ModelKind::dot_product:
      a = obs.left;
      b = obs.right;
      break;
    case ModelKind::distance:
      a = double_center(obs.left);
      b = double_center(obs.right);
      break;
  }
  return umeyama(top_eigenvectors(a, obs.dim), top_eigenvectors(b, obs.dim), matcher);
}

EstimateResult alternating_procrustes(const Factors& f, const std::optional<OrthogonalMatrix>& init,
                                      int max_iter, int restarts, Rng& rng, Matcher matcher) {
  require_factors(f);
  if (max_iter < 1 || restarts < 1) fail(ErrorKind::parameter, "max_iter and restarts must be >= 1");
  const int d = static_cast<int>(f.a.cols());
  EstimateResult best;
  best.objective = kNegInf;
  for (int run = 0; run < restarts; ++run) {
    OrthogonalMatrix q = (run == 0 && init) ? *init : haar_orthogonal(d, rng);
    EstimateResult cur;
    cur.objective = kNegInf;
    LapWarmStart warm;
    for (int it = 0; it < max_iter; ++it) {
      const Matrix w = alignment_weights(f, q.matrix());
      Assignment a = matcher == Matcher::exact ? solve_lap_max(w, warm) : greedy_match(w);
      const Matrix m = cross_moment(f, a.permutation);
      const double value = nuclear_norm(m);
      if (it > 0 && value - cur.objective < kAscentTol) break;
      cur.objective = value;
      cur.permutation = std::move(a.permutation);
      q = procrustes_rotation(m);
      cur.best_q = q;
      cur.trace.push_back(value);
      ++cur.iterations;
    }
    if (cur.objective > best.objective) best = std::move(cur);
  }
  return best;
}

EstimateResult qap_frobenius(const Factors& f, int max_iter, int restarts, Rng& rng,
                             std::optional<Matrix> init) {
  require_factors(f);
  if (max_iter < 1 || restarts < 1) fail(ErrorKind::parameter, "max_iter and restarts must be >= 1");
  const int d = static_cast<int>(f.a.cols());
  EstimateResult best;
  best.objective = kNegInf;
  for (int run = 0; run < restarts; ++run) {
    Matrix q;
    if (run == 0)
      q = init ? *init : Matrix(Matrix::Identity(d, d));
    else
      q = standard_normal(d, d, rng);
    if (q.rows() != d || q.cols() != d) fail(ErrorKind::dimension, "qap init must be d x d");
    q /= q.norm();
    EstimateResult cur;
    cur.objective = kNegInf;
    for (int it = 0; it < max_iter; ++it) {
      Assignment a = match(alignment_weights(f, q), Matcher::exact);
      const Matrix m = cross_moment(f, a.permutation);
      const double value = m.norm();
      if (it > 0 && value - cur.objective < kAscentTol) break;
      cur.objective = value;
      cur.permutation = std::move(a.permutation);
      cur.trace.push_back(value);
      ++cur.iterations;
      if (value == 0.0) break;
      q = m / value;
    }
    if (cur.objective > best.objective) best = std::move(cur);
  }
  return best;
}

EstimateResult grampa(const Matrix& a, const Matrix& b, double eta) {
  if (!(eta > 0.0)) fail(ErrorKind::parameter, "eta must be > 0");
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    fail(ErrorKind::dimension, "grampa expects two n x n matrices");
  const SymmetricEigen ea = symmetric_eigen(a);
  const SymmetricEigen eb = symmetric_eigen(b);
  const Eigen::Index n = a.rows();
  const Vector ua1 = ea.vectors.colwise().sum().transpose();
  const Vector vb1 = eb.vectors.colwise().sum().transpose();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      // 1/(g^2 + eta^2) shifted by -1/eta^2 and scaled by eta^4. The shift adds a
      // constant matrix to the similarity, which leaves the assignment unchanged.
      const double g2 = (ea.values(i) - eb.values(j)) * (ea.values(i) - eb.values(j));
      k(i, j) = -ua1(i) * vb1(j) * g2 / (1.0 + g2 / (eta * eta));
    }
  // similarity(p, q) relates node p of A to node q of B.
  const Matrix similarity = ea.vectors * k * eb.vectors.transpose();
  Assignment asg = solve_lap_max(similarity.transpose());
  EstimateResult r;
  r.permutation = std::move(asg.permutation);
  r.objective = asg.objective;
  r.iterations = 1;
  return r;
}

EstimateResult grampa(const Observation& obs, double eta) {
  return grampa(symmetric_payload_left(obs), symmetric_payload_right(obs), eta);
}

EstimateResult degree_match(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    fail(ErrorKind::dimension, "degree matching expects two n x n matrices");
  const int n = static_cast<int>(a.rows());
  const Vector da = a.rowwise().sum();
  const Vector db = b.rowwise().sum();
  auto rank_order = [n](const Vector& deg) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return deg(x) < deg(y); });
    return idx;
  };
  const auto oa = rank_order(da);
  const auto ob = rank_order(db);
  std::vector<int> map(n);
  for (int k = 0; k < n; ++k) map[ob[k]] = oa[k];
  EstimateResult r;
  r.permutation = Permutation(std::move(map));
  for (int i = 0; i < n; ++i) r.objective += db(i) * da(r.permutation[i]);
  r.iterations = 1;
  return r;
}

EstimateResult degree_match(const Observation& obs) {
  return degree_match(symmetric_payload_left(obs), symmetric_payload_right(obs));
}

EstimateResult haar_mle(const Factors& f, double sigma, std::span<const OrthogonalMatrix> samples) {
  require_factors(f);
  const int n = static_cast<int>(f.a.rows());
  if (n > kMaxHaarMleN) fail(ErrorKind::capacity, "haar_mle enumerates permutations only up to n = 8");
  if (!(sigma > 0.0)) fail(ErrorKind::parameter, "haar_mle needs sigma > 0");
  if (samples.empty()) fail(ErrorKind::parameter, "haar_mle needs at least one sample");
  const double inv_var = 1.0 / (sigma * sigma);
  const double log_count = std::log(static_cast<double>(samples.size()));

  EstimateResult best;
  best.objective = kNegInf;
  std::vector<double> expo(samples.size());
  for_each_permutation(n, [&](const std::vector<int>& p) {
    Matrix m = Matrix::Zero(f.a.cols(), f.b.cols());
    for (int i = 0; i < n; ++i) m.noalias() += f.a.row(p[i]).transpose() * f.b.row(i);
    double top = kNegInf;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      expo[s] = inner(m, samples[s].matrix()) * inv_var;
      top = std::max(top, expo[s]);
    }
    double acc = 0.0;
    for (double e : expo) acc += std::exp(e - top);
    const double value = top + std::log(acc) - log_count;
    ++best.iterations;
    if (value > best.objective) {
      best.objective = value;
      best.permutation = Permutation(p);
    }
  });
  return best;
}

EstimateResult haar_mle(const Observation& obs, double sigma, int mc_samples, Rng& rng) {
  if (obs.n() > kMaxHaarMleN) fail(ErrorKind::capacity, "haar_mle enumerates permutations only up to n = 8");
  if (mc_samples < 1) fail(ErrorKind::parameter, "mc_samples must be >= 1");
  const Factors f = factors_for(obs);
  std::vector<OrthogonalMatrix> samples;
  samples.reserve(mc_samples);
  for (int s = 0; s < mc_samples; ++s) samples.push_back(haar_orthogonal(obs.dim, rng));
  return haar_mle(f, sigma, samples);
}

EstimateResult estimate_distance(const Observation& obs, const EstimatorConfig& inner) {
  switch (inner.kind) {
    case EstimatorKind::aml_grid2d:
    case EstimatorKind::aml_signflip:
    case EstimatorKind::umeyama:
    case EstimatorKind::alternating:
      break;
    default:
      fail(ErrorKind::contract,
           "estimate_distance cannot wrap '" + std::string(to_string(inner.kind)) + "'");
  }
  return estimate(centered(obs), inner);
}

bool supports(EstimatorKind kind, ModelKind model) {
  if (kind == EstimatorKind::mle_linear) return model == ModelKind::linear_assignment;
  return model != ModelKind::linear_assignment;
}

EstimateResult estimate(const Observation& obs, const EstimatorConfig& cfg) {
  cfg.validate();
  if (obs.model == ModelKind::distance) {
    switch (cfg.kind) {
      case EstimatorKind::aml_grid2d:
      case EstimatorKind::aml_signflip:
      case EstimatorKind::umeyama:
      case EstimatorKind::alternating:
        return estimate_distance(obs, cfg);
      default:
        break;
    }
  }
  Rng rng(cfg.seed);
  switch (cfg.kind) {
    case EstimatorKind::mle_linear:
      return mle_linear(obs);
    case EstimatorKind::aml_grid2d:
      return aml_grid2d(obs, cfg.grid_size, cfg.matcher);
    case EstimatorKind::aml_signflip:
      return aml_signflip(obs, cfg.matcher);
    case EstimatorKind::umeyama:
      return umeyama(obs, cfg.matcher);
    case EstimatorKind::alternating:
      return alternating_procrustes(factors_for(obs), std::nullopt, cfg.max_iter, cfg.restarts,
                                    rng, cfg.matcher);
    case EstimatorKind::qap_frobenius:
      return qap_frobenius(factors_for(obs), cfg.max_iter, cfg.restarts, rng);
    case EstimatorKind::grampa:
      return grampa(obs, cfg.eta);
    case EstimatorKind::degree:
      return degree_match(obs);
    case EstimatorKind::haar_mle:
      if (!cfg.sigma) fail(ErrorKind::parameter, "haar_mle needs a noise level");
      return haar_mle(obs, *cfg.sigma, cfg.mc_samples, rng);
  }
  fail(ErrorKind::contract, "unknown estimator kind");
}

}  // namespace geomatch
