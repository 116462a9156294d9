#include "geomatch/models.hpp"

#include <cstring>

#include <json.hpp>

#include "geomatch/error.hpp"

namespace geomatch {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::linear_assignment: return "linear_assignment";
    case ModelKind::dot_product: return "dot_product";
    case ModelKind::distance: return "distance";
  }
  return "unknown";
}

ModelKind parse_model(std::string_view name) {
  if (name == "linear_assignment") return ModelKind::linear_assignment;
  if (name == "dot_product") return ModelKind::dot_product;
  if (name == "distance") return ModelKind::distance;
  fail(ErrorKind::parameter, "unknown model '" + std::string(name) + "'");
}

namespace {

Matrix covariance_factor(const Matrix& cov, int d) {
  if (cov.rows() != d || cov.cols() != d) fail(ErrorKind::dimension, "covariance must be d x d");
  require_finite(cov, "covariance");
  if ((cov - cov.transpose()).norm() > 1e-12 * (1.0 + cov.norm()))
    fail(ErrorKind::parameter, "covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.eigenvalues().minCoeff() <= kMinCovarianceEigen)
    fail(ErrorKind::parameter, "covariance must be positive definite");
  Eigen::LLT<Matrix> llt(cov);
  return llt.matrixL();
}

}  // namespace

Instance sample_instance(int n, int d, double sigma, const std::optional<Matrix>& covariance,
                         Rng& rng) {
  if (n < 2) fail(ErrorKind::parameter, "instance needs n >= 2");
  if (d < 1) fail(ErrorKind::parameter, "instance needs d >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail(ErrorKind::parameter, "sigma must be >= 0");

  Instance inst;
  inst.sigma = sigma;
  inst.x = standard_normal(n, d, rng);
  if (covariance) {
    inst.x = inst.x * covariance_factor(*covariance, d).transpose();
    inst.covariance = *covariance;
  }
  inst.pi_star = Permutation::random(n, rng);
  const Matrix z = standard_normal(n, d, rng);
  inst.y = inst.pi_star.apply_rows(inst.x);
  if (sigma > 0.0) inst.y += sigma * z;
  return inst;
}

Instance sample_instance(int n, int d, double sigma, const std::optional<Matrix>& covariance,
                         std::uint64_t seed) {
  Rng rng(seed);
  Instance inst = sample_instance(n, d, sigma, covariance, rng);
  inst.seed = seed;
  return inst;
}

Matrix gram(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix g(n, n);
  // Explicit row dot products: permuting rows of x permutes g bit-exactly.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) g(i, j) = g(j, i) = x.row(i).dot(x.row(j));
  return g;
}

Matrix squared_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix dm(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dm(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) dm(i, j) = dm(j, i) = (x.row(i) - x.row(j)).squaredNorm();
  }
  return dm;
}

Observation observe(const Instance& inst, ModelKind model) {
  Observation obs;
  obs.model = model;
  obs.dim = inst.d();
  switch (model) {
    case ModelKind::linear_assignment:
      obs.left = inst.x;
      obs.right = inst.y;
      break;
    case ModelKind::dot_product:
      obs.left = gram(inst.x);
      obs.right = gram(inst.y);
      break;
    case ModelKind::distance:
      obs.left = squared_distances(inst.x);
      obs.right = squared_distances(inst.y);
      break;
  }
  return obs;
}

Matrix double_center(const Matrix& dm) {
  if (dm.rows() != dm.cols() || dm.rows() == 0) fail(ErrorKind::dimension, "distance matrix must be square");
  require_finite(dm, "distance matrix");
  const double scale = 1.0 + dm.cwiseAbs().maxCoeff();
  if ((dm - dm.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    fail(ErrorKind::contract, "distance matrix must be symmetric");
  if (dm.diagonal().cwiseAbs().maxCoeff() > 1e-12 * scale)
    fail(ErrorKind::contract, "distance matrix must have zero diagonal");
  // (I - F) D (I - F) = D - row means - column means + grand mean.
  const Vector row_mean = dm.rowwise().mean();
  const Vector col_mean = dm.colwise().mean().transpose();
  const double grand = dm.mean();
  Matrix c = dm;
  c.colwise() -= row_mean;
  c.rowwise() -= col_mean.transpose();
  c.array() += grand;
  c *= -0.5;
  return 0.5 * (c + c.transpose());
}

namespace {

struct TopEigen {
  Vector values;
  Matrix vectors;
};

TopEigen top_eigen(const Matrix& a, int d) {
  if (a.rows() != a.cols()) fail(ErrorKind::dimension, "factorize expects a square matrix");
  if (d < 1 || d > a.rows()) fail(ErrorKind::dimension, "target rank must lie in [1, n]");
  const SymmetricEigen es = symmetric_eigen(a);
  TopEigen out{es.values.head(d), es.vectors.leftCols(d)};
  const double scale = std::max(1.0, std::abs(es.values(0)));
  if (out.values(d - 1) < -kPsdTol * scale) fail(ErrorKind::contract, "matrix is not positive semidefinite");
  for (int k = 0; k < d; ++k) {
    Eigen::Index arg = 0;
    out.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.vectors(arg, k) < 0) out.vectors.col(k) = -out.vectors.col(k);
  }
  return out;
}

}  // namespace

Matrix top_eigenvectors(const Matrix& a, int d) { return top_eigen(a, d).vectors; }

Matrix factorize(const Matrix& a, int d) {
  TopEigen te = top_eigen(a, d);
  const Vector root = te.values.cwiseMax(0.0).cwiseSqrt();
  return te.vectors * root.asDiagonal();
}

namespace {

struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void bytes(const void* p, std::size_t len) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= c[i];
      h *= 1099511628211ULL;
    }
  }
  void real(double v) { bytes(&v, sizeof v); }
  void integer(std::int64_t v) { bytes(&v, sizeof v); }
};

nlohmann::json to_rows(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix from_rows(const nlohmann::json& rows, Eigen::Index r, Eigen::Index c, const char* what) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != r)
    fail(ErrorKind::dimension, std::string(what) + " has the wrong row count");
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      fail(ErrorKind::dimension, std::string(what) + " has the wrong column count");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[j].get<double>();
  }
  return m;
}

}  // namespace

std::uint64_t instance_hash(const Instance& inst) {
  Fnv f;
  f.integer(inst.n());
  f.integer(inst.d());
  f.real(inst.sigma);
  for (Eigen::Index i = 0; i < inst.x.rows(); ++i)
    for (Eigen::Index j = 0; j < inst.x.cols(); ++j) {
      f.real(inst.x(i, j));
      f.real(inst.y(i, j));
    }
  for (int v : inst.pi_star.mapping()) f.integer(v);
  return f.h;
}

std::string instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["n"] = inst.n();
  j["d"] = inst.d();
  j["sigma"] = inst.sigma;
  j["seed"] = inst.seed;
  j["covariance"] = inst.covariance ? to_rows(*inst.covariance) : nlohmann::json(nullptr);
  j["X"] = to_rows(inst.x);
  j["Y"] = to_rows(inst.y);
  j["pi_star"] = inst.pi_star.mapping();
  return j.dump();
}

Instance instance_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parameter, std::string("instance JSON: ") + e.what());
  }
  try {
    Instance inst;
    const int n = j.at("n").get<int>();
    const int d = j.at("d").get<int>();
    if (n < 1 || d < 1) fail(ErrorKind::dimension, "instance JSON has non-positive n or d");
    inst.sigma = j.at("sigma").get<double>();
    inst.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("covariance") && !j["covariance"].is_null())
      inst.covariance = from_rows(j["covariance"], d, d, "covariance");
    inst.x = from_rows(j.at("X"), n, d, "X");
    inst.y = from_rows(j.at("Y"), n, d, "Y");
    inst.pi_star = Permutation(j.at("pi_star").get<std::vector<int>>());
    if (inst.pi_star.size() != n) fail(ErrorKind::dimension, "pi_star length differs from n");
    return inst;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parameter, std::string("instance JSON: ") + e.what());
  }
}

}  // namespace geomatch
