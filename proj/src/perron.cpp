#include "cptherm/perron.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "cptherm/error.hpp"

namespace cpt {
namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Dominant eigenvector of x -> Mx + s x (or its transpose), with s the current
// Collatz-Wielandt upper bound, so the shift tracks the eigenvalue rather than
// the largest row sum. Stops once the lower and upper bounds
// min (Mv)_i / v_i <= lambda <= max (Mv)_i / v_i agree to tol, which makes
// every component accurate relative to itself.
double iterate(const SparseMatrix& m, bool transpose, double tol, int budget,
               std::vector<double>& v, int& iterations) {
  const int n = m.dimension;
  v.assign(static_cast<std::size_t>(n), 1.0);
  for (int it = 1; it <= budget; ++it) {
    std::vector<double> w = transpose ? m.multiply_transposed(v) : m.multiply(v);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = w[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (hi <= 0.0) throw Error(ErrorCode::kNoUniquePerron, "zero matrix has no Perron vector");
    if (hi - lo <= tol * hi) {
      iterations = it;
      return 0.5 * (lo + hi);
    }
    for (int i = 0; i < n; ++i) w[i] += hi * v[i];
    const double norm = sup_norm(w);
    for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  throw Error(ErrorCode::kNoConvergence, "power iteration exceeded its budget");
}

}  // namespace

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<double>>& dense) {
  SparseMatrix m;
  m.dimension = static_cast<int>(dense.size());
  m.rows.resize(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i].size() != dense.size()) {
      throw Error(ErrorCode::kInvalidArgument, "matrix is not square");
    }
    for (std::size_t j = 0; j < dense[i].size(); ++j) {
      if (dense[i][j] < 0.0) throw Error(ErrorCode::kInvalidArgument, "matrix has a negative entry");
      if (dense[i][j] > 0.0) m.rows[i].emplace_back(static_cast<int>(j), dense[i][j]);
    }
  }
  return m;
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& v) const {
  std::vector<double> out(static_cast<std::size_t>(dimension), 0.0);
  for (int i = 0; i < dimension; ++i) {
    double s = 0.0;
    for (const auto& [j, x] : rows[i]) s += x * v[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> SparseMatrix::multiply_transposed(const std::vector<double>& u) const {
  std::vector<double> out(static_cast<std::size_t>(dimension), 0.0);
  for (int i = 0; i < dimension; ++i) {
    for (const auto& [j, x] : rows[i]) out[j] += u[i] * x;
  }
  return out;
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t;
  t.dimension = dimension;
  t.rows.resize(rows.size());
  for (int i = 0; i < dimension; ++i) {
    for (const auto& [j, x] : rows[i]) t.rows[j].emplace_back(i, x);
  }
  return t;
}

std::vector<int> strong_components(const SparseMatrix& m, int* count) {
  const int n = m.dimension;
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
      comp(static_cast<std::size_t>(n), -1);
  std::vector<std::uint8_t> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  int next_index = 0;
  int components = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (const auto& [w, x] : m.rows[v]) {
      if (x <= 0.0) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        comp[w] = components;
      } while (w != v);
      ++components;
    }
  };
  for (int v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  if (count) *count = components;
  return comp;
}

bool irreducible(const SparseMatrix& m) {
  if (m.dimension <= 0) return false;
  int count = 0;
  strong_components(m, &count);
  if (count != 1) return false;
  // A single vertex without a self-loop is not irreducible.
  return m.dimension > 1 || !m.rows[0].empty();
}

PerronData power_iteration(const SparseMatrix& m, double tol, int budget) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
  if (!irreducible(m)) {
    throw Error(ErrorCode::kNoUniquePerron, "matrix is reducible; Perron vector not unique");
  }
  PerronData out;
  int it_right = 0;
  int it_left = 0;
  out.eigenvalue = iterate(m, false, tol, budget, out.right, it_right);
  iterate(m, true, tol, budget, out.left, it_left);
  out.iterations = std::max(it_right, it_left);
  const double dot = std::inner_product(out.left.begin(), out.left.end(), out.right.begin(), 0.0);
  for (double& x : out.left) x /= dot;
  return out;
}

double spectral_radius(const SparseMatrix& m, double tol) {
  int count = 0;
  const auto comp = strong_components(m, &count);
  double best = 0.0;
  for (int c = 0; c < count; ++c) {
    std::vector<int> members;
    for (int v = 0; v < m.dimension; ++v) {
      if (comp[v] == c) members.push_back(v);
    }
    std::vector<int> local(static_cast<std::size_t>(m.dimension), -1);
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<int>(i);
    SparseMatrix sub;
    sub.dimension = static_cast<int>(members.size());
    sub.rows.resize(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (const auto& [j, x] : m.rows[members[i]]) {
        if (local[j] >= 0 && x > 0.0) sub.rows[i].emplace_back(local[j], x);
      }
    }
    if (!irreducible(sub)) continue;
    best = std::max(best, power_iteration(sub, tol).eigenvalue);
  }
  return best;
}

}  // namespace cpt
