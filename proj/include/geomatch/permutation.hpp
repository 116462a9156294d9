#pragma once

#include <span>
#include <vector>

#include "geomatch/linalg.hpp"

namespace geomatch {

/// Bijection on {0..n-1}.  Acting on a point cloud, (Pi X) has row i equal to
/// row pi(i) of X, so the permutation matrix has Pi[i][pi(i)] = 1.
class Permutation {
public:
  Permutation() = default;
  explicit Permutation(std::vector<int> mapping);

  static Permutation identity(int n);
  static Permutation random(int n, Rng& rng);

  int size() const { return static_cast<int>(map_.size()); }
  int operator[](int i) const { return map_[i]; }
  int operator()(int i) const { return map_[i]; }
  const std::vector<int>& mapping() const { return map_; }

  /// (this o other)(i) = this(other(i)).
  Permutation compose(const Permutation& other) const;
  Permutation inverse() const;

  /// Rows permuted by the action convention above.
  Matrix apply_rows(const Matrix& x) const;
  Matrix matrix() const;

  /// Cycles of length >= 2, each starting at its smallest element and
  /// following i -> this(i); cycles ordered by their first element.
  std::vector<std::vector<int>> cycles() const;

  /// counts[k] = number of k-cycles for k = 1..n (counts[0] unused).
  std::vector<int> cycle_type() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

private:
  std::vector<int> map_;
};

/// Number of indices where the two permutations disagree.
int hamming(const Permutation& p, const Permutation& q);

/// Fraction of indices where the two permutations agree.
double overlap(const Permutation& p, const Permutation& q);

/// Calls visit(perm) for every permutation of {0..n-1} in lexicographic order.
template <typename Visit>
void for_each_permutation(int n, Visit&& visit);

}  // namespace geomatch

#include <algorithm>
#include <numeric>
#include <utility>

namespace geomatch {

template <typename Visit>
void for_each_permutation(int n, Visit&& visit) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    visit(std::as_const(p));
  } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace geomatch
