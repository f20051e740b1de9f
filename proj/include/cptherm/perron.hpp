#pragma once

#include <utility>
#include <vector>

namespace cpt {

/// Nonnegative square matrix stored by rows as (column, value) pairs.
struct SparseMatrix {
  int dimension = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;

  static SparseMatrix from_dense(const std::vector<std::vector<double>>& dense);
  std::vector<double> multiply(const std::vector<double>& v) const;
  std::vector<double> multiply_transposed(const std::vector<double>& u) const;
  SparseMatrix transposed() const;
};

struct PerronData {
  double eigenvalue = 0.0;
  std::vector<double> right;  ///< M v = lambda v, strictly positive
  std::vector<double> left;   ///< u M = lambda u, normalized so u . v = 1
  int iterations = 0;
};

/// Irreducibility of the support graph of a nonnegative matrix.
bool irreducible(const SparseMatrix& m);

/// Perron eigen-triple of an irreducible nonnegative matrix by power
/// iteration on M + sI, with s the running Collatz-Wielandt upper bound (the
/// shift also makes periodic matrices converge). Converged when
/// max_i (Mv)_i / v_i - min_i (Mv)_i / v_i <= tol * lambda, so each component
/// of v is accurate relative to itself.
///
/// Throws kNoUniquePerron for reducible input and kNoConvergence when the
/// iteration budget runs out.
PerronData power_iteration(const SparseMatrix& m, double tol = 1e-13, int budget = 100000);

/// Spectral radius of an arbitrary nonnegative matrix: maximum over the
/// strongly connected components of their Perron eigenvalues.
double spectral_radius(const SparseMatrix& m, double tol = 1e-13);

/// Strongly connected components (Tarjan); component id per vertex.
std::vector<int> strong_components(const SparseMatrix& m, int* count);

}  // namespace cpt
