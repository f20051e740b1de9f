#pragma once

// Independent reference computations for the tests: brute-force enumeration,
// a dense power iteration, closed forms, and random instance generators.
// Nothing here calls into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using Adjacency = std::vector<std::uint8_t>;

inline bool allowed(const Adjacency& adj, int k, int a, int b) { return adj[a * k + b] != 0; }

// Every word of length n over k symbols, filtered by adjacency.
inline std::vector<std::vector<int>> words(int k, const Adjacency& adj, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> w(static_cast<std::size_t>(n), 0);
  for (;;) {
    bool ok = true;
    for (int i = 0; i + 1 < n && ok; ++i) ok = allowed(adj, k, w[i], w[i + 1]);
    if (ok) out.push_back(w);
    int i = n - 1;
    while (i >= 0 && w[i] == k - 1) w[i--] = 0;
    if (i < 0) break;
    ++w[i];
  }
  return out;
}

inline Adjacency ones(int k) { return Adjacency(static_cast<std::size_t>(k * k), 1); }

inline Adjacency golden() { return {1, 1, 1, 0}; }

// Value of a depth-r table at the window starting at w[j].
inline double window_value(const std::vector<double>& table, int k, int r, const std::vector<int>& w, int j) {
  std::size_t idx = 0;
  for (int i = 0; i < r; ++i) idx = idx * k + w[j + i];
  return table[idx];
}

inline double plain_sum(const std::vector<double>& table, int k, int r, const std::vector<int>& w, int n) {
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += window_value(table, k, r, w, j);
  return s;
}

// Lambda_N for a one-sided depth-t cover: sum over admissible words of length
// N + t - 1 satisfying `keep` of exp(S_N phi).
inline double lambda(int k, const Adjacency& adj, const std::vector<double>& table, int r, int t, int n,
                     const std::function<bool(const std::vector<int>&)>& keep = {}) {
  double sum = 0.0;
  for (const auto& w : words(k, adj, n + t - 1))
    if (!keep || keep(w)) sum += std::exp(plain_sum(table, k, r, w, n));
  return sum;
}

// Spectral radius of a nonnegative primitive-or-periodic matrix by power
// iteration on M + I.
inline double perron(const Matrix& m) {
  const std::size_t d = m.size();
  std::vector<double> v(d, 1.0), w(d);
  double lambda = 0.0;
  for (int it = 0; it < 200000; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      w[i] = v[i];
      for (std::size_t j = 0; j < d; ++j) w[i] += m[i][j] * v[j];
    }
    double norm = *std::max_element(w.begin(), w.end());
    for (std::size_t i = 0; i < d; ++i) w[i] /= norm;
    double diff = 0.0;
    for (std::size_t i = 0; i < d; ++i) diff = std::max(diff, std::abs(w[i] - v[i]));
    v.swap(w);
    if (std::abs(norm - 1.0 - lambda) < 1e-15 * norm && diff < 1e-14) {
      lambda = norm - 1.0;
      break;
    }
    lambda = norm - 1.0;
  }
  return lambda;
}

// Classical pressure of a depth-1 potential on an SFT: log of the Perron root
// of A_ab exp(phi_a).
inline double pressure_depth1(int k, const Adjacency& adj, const std::vector<double>& phi) {
  Matrix m(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (allowed(adj, k, a, b)) m[a][b] = std::exp(phi[a]);
  return std::log(perron(m));
}

// Depth-2 potential: matrix on symbols with entry exp(phi(ab)).
inline double pressure_depth2(int k, const Adjacency& adj, const std::vector<double>& phi) {
  Matrix m(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (allowed(adj, k, a, b)) m[a][b] = std::exp(phi[a * k + b]);
  return std::log(perron(m));
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double mx = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Full k-shift, depth-1 potential: P(q phi) = log sum_a exp(q phi_a).
inline double full_shift_pressure(const std::vector<double>& phi, double q = 1.0) {
  std::vector<double> xs;
  for (double v : phi) xs.push_back(q * v);
  return log_sum_exp(xs);
}

inline double full_shift_t(const std::vector<double>& phi, double q) {
  return full_shift_pressure(phi, q) - q * full_shift_pressure(phi, 1.0);
}

// Bernoulli measure of the Gibbs weights exp(q phi_a) / Z.
inline std::vector<double> gibbs_bernoulli(const std::vector<double>& phi, double q = 1.0) {
  double z = full_shift_pressure(phi, q);
  std::vector<double> p;
  for (double v : phi) p.push_back(std::exp(q * v - z));
  return p;
}

inline double shannon(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0) h -= v * std::log(v);
  return h;
}

// alpha(q) = P(phi) - integral of phi against the q-Gibbs Bernoulli measure.
inline double full_shift_alpha(const std::vector<double>& phi, double q) {
  std::vector<double> p = gibbs_bernoulli(phi, q);
  double integral = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) integral += p[i] * phi[i];
  return full_shift_pressure(phi, 1.0) - integral;
}

// Renyi entropy of a Bernoulli measure: -(1/(q-1)) log sum p^q.
inline double renyi(const std::vector<double>& p, double q) {
  double s = 0.0;
  for (double v : p) s += std::pow(v, q);
  return -std::log(s) / (q - 1.0);
}

inline bool strongly_connected(int k, const Adjacency& adj) {
  for (int s = 0; s < k; ++s) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    std::vector<int> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < k; ++b)
        if (allowed(adj, k, a, b) && !seen[b]) {
          seen[b] = true;
          stack.push_back(b);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
  }
  return true;
}

// Random irreducible adjacency with alphabet size in [2, max_k].
inline Adjacency random_irreducible(std::mt19937_64& rng, int max_k, int* k_out, double density = 0.5) {
  std::uniform_int_distribution<int> dim(2, max_k);
  std::bernoulli_distribution bit(density);
  int k = dim(rng);
  for (;;) {
    Adjacency adj(static_cast<std::size_t>(k * k));
    for (auto& v : adj) v = bit(rng) ? 1 : 0;
    if (strongly_connected(k, adj)) {
      *k_out = k;
      return adj;
    }
  }
}

inline std::vector<double> random_table(std::mt19937_64& rng, std::size_t size, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> t(size);
  for (auto& v : t) v = u(rng);
  return t;
}

inline std::size_t ipow(int k, int r) {
  std::size_t out = 1;
  for (int i = 0; i < r; ++i) out *= static_cast<std::size_t>(k);
  return out;
}

inline double golden_log() { return std::log((1.0 + std::sqrt(5.0)) / 2.0); }

}  // namespace oracle
