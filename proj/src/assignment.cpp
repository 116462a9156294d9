#include "geomatch/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "geomatch/error.hpp"

namespace geomatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_weights(const Matrix& w) {
  if (w.rows() != w.cols()) fail(ErrorKind::dimension, "weight matrix must be square");
  require_finite(w, "weight matrix");
}

double assignment_value(const Matrix& w, const std::vector<int>& col4row) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) total += w(i, col4row[i]);
  return total;
}

// Min-cost solver state.  Costs are nonnegative; u and v stay dual feasible
// (cost - u - v >= 0) and tight on matched pairs.
struct ShortestPathLap {
  const RowMatrix& cost;
  int n;
  std::vector<double> u, v, dist;
  std::vector<int> path, col4row, row4col, remaining;
  std::vector<char> visited_row, visited_col;

  explicit ShortestPathLap(const RowMatrix& c)
      : cost(c),
        n(static_cast<int>(c.rows())),
        u(n, 0.0),
        v(n, 0.0),
        dist(n),
        path(n, -1),
        col4row(n, -1),
        row4col(n, -1),
        remaining(n),
        visited_row(n),
        visited_col(n) {}

  // Dijkstra over reduced costs from a free row to the nearest free column.
  int augmenting_path(int start, double& min_val) {
    min_val = 0.0;
    int num_remaining = n;
    for (int it = 0; it < n; ++it) remaining[it] = n - it - 1;
    std::fill(visited_row.begin(), visited_row.end(), 0);
    std::fill(visited_col.begin(), visited_col.end(), 0);
    std::fill(dist.begin(), dist.end(), kInf);

    int sink = -1;
    int i = start;
    while (sink == -1) {
      int index = -1;
      double lowest = kInf;
      visited_row[i] = 1;
      const double ui = u[i];
      for (int it = 0; it < num_remaining; ++it) {
        const int j = remaining[it];
        const double r = min_val + cost(i, j) - ui - v[j];
        if (r < dist[j]) {
          path[j] = i;
          dist[j] = r;
        }
        if (dist[j] < lowest || (dist[j] == lowest && row4col[j] == -1)) {
          lowest = dist[j];
          index = it;
        }
      }
      min_val = lowest;
      if (index < 0 || min_val == kInf) fail(ErrorKind::contract, "assignment problem is infeasible");
      const int j = remaining[index];
      if (row4col[j] == -1)
        sink = j;
      else
        i = row4col[j];
      visited_col[j] = 1;
      remaining[index] = remaining[--num_remaining];
    }
    return sink;
  }

  // Column reduction: v_j = min_i cost(i, j), then match tight pairs whose
  // row and column are both still free.
  void reduce() {
    for (int j = 0; j < n; ++j) {
      int best = 0;
      for (int i = 1; i < n; ++i)
        if (cost(i, j) < cost(best, j)) best = i;
      v[j] = cost(best, j);
      if (col4row[best] == -1) {
        col4row[best] = j;
        row4col[j] = best;
      }
    }
  }

  // Keeps the old column duals, sets each row dual to its smallest reduced
  // cost and retains old pairs that are still tight.
  void warm(const LapWarmStart& w) {
    v = w.v;
    for (int i = 0; i < n; ++i) {
      double lo = kInf;
      for (int j = 0; j < n; ++j) lo = std::min(lo, cost(i, j) - v[j]);
      u[i] = lo;
      const int j = w.col4row[i];
      if (cost(i, j) - v[j] == lo) {
        col4row[i] = j;
        row4col[j] = i;
      }
    }
  }

  void solve() {
    for (int row = 0; row < n; ++row) {
      if (col4row[row] != -1) continue;
      double min_val = 0.0;
      const int sink = augmenting_path(row, min_val);
      u[row] += min_val;
      for (int i = 0; i < n; ++i)
        if (visited_row[i] && i != row) u[i] += min_val - dist[col4row[i]];
      for (int j = 0; j < n; ++j)
        if (visited_col[j]) v[j] -= min_val - dist[j];
      int j = sink;
      while (true) {
        const int i = path[j];
        row4col[j] = i;
        std::swap(col4row[i], j);
        if (i == row) break;
      }
    }
  }
};

// Walks the equality subgraph of the optimal duals and rewrites the matching
// into the lexicographically smallest optimal one.
void lexicographic_canonical(ShortestPathLap& lap, double tol) {
  const int n = lap.n;
  auto tight = [&](int r, int c) { return lap.cost(r, c) - lap.u[r] - lap.v[c] <= tol; };

  std::vector<char> fixed(n, 0), reach(n);
  std::vector<int> next(n), queue;
  queue.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int current = lap.col4row[i];
    bool candidate = false;
    for (int c = 0; c < current && !candidate; ++c)
      candidate = tight(i, c) && !fixed[lap.row4col[c]];
    if (!candidate) {
      fixed[i] = 1;
      continue;
    }

    // Rows that can hand their column along an alternating chain ending at i.
    std::fill(reach.begin(), reach.end(), 0);
    queue.clear();
    queue.push_back(i);
    reach[i] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int target = queue[head];
      const int col = lap.col4row[target];
      for (int r = 0; r < n; ++r) {
        if (reach[r] || fixed[r] || !tight(r, col)) continue;
        reach[r] = 1;
        next[r] = target;
        queue.push_back(r);
      }
    }

    int chosen = current;
    for (int c = 0; c < current; ++c) {
      const int owner = lap.row4col[c];
      if (!fixed[owner] && owner != i && reach[owner] && tight(i, c)) {
        chosen = c;
        break;
      }
    }
    if (chosen != current) {
      // i takes `chosen`; each row on the chain takes its successor's column.
      std::vector<int> chain;
      for (int r = lap.row4col[chosen]; r != i; r = next[r]) chain.push_back(r);
      std::vector<int> new_cols(chain.size());
      for (std::size_t k = 0; k < chain.size(); ++k) {
        const int succ = (k + 1 < chain.size()) ? chain[k + 1] : i;
        new_cols[k] = lap.col4row[succ];
      }
      lap.col4row[i] = chosen;
      lap.row4col[chosen] = i;
      for (std::size_t k = 0; k < chain.size(); ++k) {
        lap.col4row[chain[k]] = new_cols[k];
        lap.row4col[new_cols[k]] = chain[k];
      }
    }
    fixed[i] = 1;
  }
}

Assignment solve_lap_max(const Matrix& w, LapWarmStart* warm) {
  require_weights(w);
  const int n = static_cast<int>(w.rows());
  if (n == 0) return {Permutation(std::vector<int>{}), 0.0};

  // Maximization as minimization of rowmax - W, which is nonnegative.
  const Vector row_max = w.rowwise().maxCoeff();
  RowMatrix cost = (-w).colwise() + row_max;

  ShortestPathLap lap(cost);
  if (warm && static_cast<int>(warm->v.size()) == n && static_cast<int>(warm->col4row.size()) == n)
    lap.warm(*warm);
  else
    lap.reduce();
  lap.solve();
  const double scale = 1.0 + cost.maxCoeff();
  lexicographic_canonical(lap, 1e-10 * scale);
  if (warm) {
    warm->v = lap.v;
    warm->col4row = lap.col4row;
  }

  Assignment out{Permutation(lap.col4row), 0.0};
  out.objective = assignment_value(w, lap.col4row);
  return out;
}

}  // namespace

Assignment solve_lap_max(const Matrix& w) { return solve_lap_max(w, nullptr); }

Assignment solve_lap_max(const Matrix& w, LapWarmStart& warm) { return solve_lap_max(w, &warm); }

Assignment greedy_match(const Matrix& w) {
  require_weights(w);
  const int n = static_cast<int>(w.rows());
  // Each row's columns by descending weight (ties to the smaller column); a
  // heap over rows holds each row's best column not yet known to be taken.
  std::vector<std::vector<int>> order(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i) {
    std::iota(order[i].begin(), order[i].end(), 0);
    std::sort(order[i].begin(), order[i].end(), [&](int a, int b) {
      return w(i, a) > w(i, b) || (w(i, a) == w(i, b) && a < b);
    });
  }
  std::vector<int> cursor(n, 0);
  const auto lower = [&](int r, int s) {
    const double wr = w(r, order[r][cursor[r]]), ws = w(s, order[s][cursor[s]]);
    return wr < ws || (wr == ws && r > s);
  };
  std::vector<int> heap(n);
  std::iota(heap.begin(), heap.end(), 0);
  std::make_heap(heap.begin(), heap.end(), lower);

  std::vector<int> col4row(n, -1);
  std::vector<char> col_used(n, 0);
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), lower);
    const int i = heap.back();
    const int j = order[i][cursor[i]];
    if (col_used[j]) {
      while (col_used[order[i][cursor[i]]]) ++cursor[i];
      std::push_heap(heap.begin(), heap.end(), lower);
      continue;
    }
    heap.pop_back();
    col4row[i] = j;
    col_used[j] = 1;
  }
  Assignment out{Permutation(col4row), 0.0};
  out.objective = assignment_value(w, col4row);
  return out;
}

Assignment match(const Matrix& w, Matcher matcher) {
  return matcher == Matcher::exact ? solve_lap_max(w) : greedy_match(w);
}

}  // namespace geomatch
