#pragma once

#include <vector>

#include "geomatch/linalg.hpp"
#include "geomatch/permutation.hpp"

namespace geomatch {

struct Assignment {
  Permutation permutation;  // row i is assigned column permutation(i)
  double objective = 0.0;   // sum_i W[i][permutation(i)]
};

/// Exact max-weight perfect matching on a square weight matrix.
///
/// Shortest augmenting paths on the cost rowmax(W) - W, O(n^3).  Among all
/// optimal assignments the lexicographically smallest one is returned: the
/// final duals define the equality subgraph, and rows are pinned in index
/// order to their smallest feasible column by rotating alternating cycles.
Assignment solve_lap_max(const Matrix& w);

/// Column duals and matching left by a previous solve.  Passing the same
/// object to a sequence of nearby problems reuses them as a starting point;
/// the returned assignment is the same as without it.
struct LapWarmStart {
  std::vector<double> v;
  std::vector<int> col4row;
};

Assignment solve_lap_max(const Matrix& w, LapWarmStart& warm);

/// Repeatedly takes the largest remaining entry, ties broken by smallest
/// (row, column), and deletes its row and column.
Assignment greedy_match(const Matrix& w);

enum class Matcher { exact, greedy };

Assignment match(const Matrix& w, Matcher matcher);

}  // namespace geomatch
