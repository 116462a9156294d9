#include "geomatch/permutation.hpp"

#include <numeric>

#include "geomatch/error.hpp"

namespace geomatch {

Permutation::Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
  const int n = size();
  std::vector<char> seen(n, 0);
  for (int v : map_) {
    if (v < 0 || v >= n || seen[v]) fail(ErrorKind::contract, "mapping is not a bijection");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(n);
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Permutation Permutation::random(int n, Rng& rng) {
  std::vector<int> m(n);
  std::iota(m.begin(), m.end(), 0);
  // Fisher-Yates with an explicit uniform draw; std::shuffle's draw sequence
  // is implementation-defined.
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(m[i], m[pick(rng)]);
  }
  return Permutation(std::move(m));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (size() != other.size()) fail(ErrorKind::dimension, "composing permutations of different size");
  std::vector<int> m(size());
  for (int i = 0; i < size(); ++i) m[i] = map_[other.map_[i]];
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<int> m(size());
  for (int i = 0; i < size(); ++i) m[map_[i]] = i;
  return Permutation(std::move(m));
}

Matrix Permutation::apply_rows(const Matrix& x) const {
  if (x.rows() != size()) fail(ErrorKind::dimension, "row count does not match permutation size");
  Matrix out(x.rows(), x.cols());
  for (int i = 0; i < size(); ++i) out.row(i) = x.row(map_[i]);
  return out;
}

Matrix Permutation::matrix() const {
  Matrix p = Matrix::Zero(size(), size());
  for (int i = 0; i < size(); ++i) p(i, map_[i]) = 1.0;
  return p;
}

std::vector<std::vector<int>> Permutation::cycles() const {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(size(), 0);
  for (int start = 0; start < size(); ++start) {
    if (seen[start] || map_[start] == start) continue;
    std::vector<int> cyc;
    for (int i = start; !seen[i]; i = map_[i]) {
      seen[i] = 1;
      cyc.push_back(i);
    }
    out.push_back(std::move(cyc));
  }
  return out;
}

std::vector<int> Permutation::cycle_type() const {
  std::vector<int> counts(size() + 1, 0);
  std::vector<char> seen(size(), 0);
  for (int start = 0; start < size(); ++start) {
    if (seen[start]) continue;
    int len = 0;
    for (int i = start; !seen[i]; i = map_[i]) {
      seen[i] = 1;
      ++len;
    }
    ++counts[len];
  }
  return counts;
}

int hamming(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) fail(ErrorKind::dimension, "permutations differ in length");
  int h = 0;
  for (int i = 0; i < p.size(); ++i) h += p[i] != q[i];
  return h;
}

double overlap(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) fail(ErrorKind::dimension, "permutations differ in length");
  if (p.size() == 0) return 1.0;
  return 1.0 - static_cast<double>(hamming(p, q)) / p.size();
}

}  // namespace geomatch
