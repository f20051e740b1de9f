#include "cptherm/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cptherm/cp_pressure.hpp"

namespace cpt {
namespace {

constexpr double kGibbsTolerance = 1e-9;

std::size_t block_code(std::span<const Symbol> block, int k) {
  std::size_t code = 0;
  for (Symbol s : block) code = code * static_cast<std::size_t>(k) + static_cast<std::size_t>(s);
  return code;
}

int edge_position(const BlockGraph& g, int a, int b) {
  const auto& succ = g.successors[a];
  const auto it = std::find(succ.begin(), succ.end(), b);
  return it == succ.end() ? -1 : static_cast<int>(it - succ.begin());
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// Stationary vector of an irreducible stochastic matrix on the graph.
std::vector<double> solve_stationary(const BlockGraph& g,
                                     const std::vector<std::vector<double>>& transitions) {
  SparseMatrix p;
  p.dimension = g.size();
  p.rows.resize(static_cast<std::size_t>(g.size()));
  for (int a = 0; a < g.size(); ++a) {
    for (std::size_t i = 0; i < g.successors[a].size(); ++i) {
      if (transitions[a][i] > 0.0) p.rows[a].emplace_back(g.successors[a][i], transitions[a][i]);
    }
  }
  const PerronData pd = power_iteration(p, 1e-14);
  std::vector<double> pi = pd.left;
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& x : pi) x /= total;
  return pi;
}

}  // namespace

int BlockGraph::index_of(std::span<const Symbol> block) const {
  if (static_cast<int>(block.size()) != block_length) return -1;
  for (Symbol s : block) {
    if (s < 0 || s >= alphabet_size) return -1;
  }
  return lookup[block_code(block, alphabet_size)];
}

std::vector<Symbol> BlockGraph::edge_word(int a, int i) const {
  std::vector<Symbol> w = blocks[a].symbols;
  w.push_back(blocks[successors[a][i]].symbols.back());
  return w;
}

BlockGraph make_block_graph(const ShiftSystem& system, int block_length) {
  if (block_length < 1) throw Error(ErrorCode::kInvalidArgument, "block length must be >= 1");
  BlockGraph g;
  g.block_length = block_length;
  g.alphabet_size = system.alphabet_size();
  g.blocks = system.admissible_words(block_length);
  std::size_t codes = 1;
  for (int i = 0; i < block_length; ++i) codes *= static_cast<std::size_t>(g.alphabet_size);
  g.lookup.assign(codes, -1);
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    g.lookup[block_code(g.blocks[i].view(), g.alphabet_size)] = static_cast<int>(i);
  }
  g.successors.resize(g.blocks.size());
  std::vector<Symbol> next(static_cast<std::size_t>(block_length));
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const auto& w = g.blocks[i].symbols;
    std::copy(w.begin() + 1, w.end(), next.begin());
    for (Symbol b : system.successors(w.back())) {
      next.back() = b;
      g.successors[i].push_back(g.index_of(next));
    }
  }
  return g;
}

TransferMatrix make_transfer_matrix(const ShiftSystem& system, const Potential& phi) {
  TransferMatrix t;
  t.graph = make_block_graph(system, std::max(1, phi.depth() - 1));
  t.offset = phi.max();
  t.edge_potential.resize(static_cast<std::size_t>(t.graph.size()));
  t.matrix.dimension = t.graph.size();
  t.matrix.rows.resize(static_cast<std::size_t>(t.graph.size()));
  for (int a = 0; a < t.graph.size(); ++a) {
    for (std::size_t i = 0; i < t.graph.successors[a].size(); ++i) {
      const auto w = t.graph.edge_word(a, static_cast<int>(i));
      const double v = phi(w);
      t.edge_potential[a].push_back(v);
      t.matrix.rows[a].emplace_back(t.graph.successors[a][i], std::exp(v - t.offset));
    }
  }
  return t;
}

RecodedSystem block_recode(const ShiftSystem& system, const Potential& phi) {
  const int r = phi.depth();
  if (r == 1) return RecodedSystem{system, phi, {}};
  const BlockGraph g = make_block_graph(system, r);
  const int n = g.size();
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  for (int a = 0; a < n; ++a) {
    for (int b : g.successors[a]) adj[static_cast<std::size_t>(a) * n + b] = 1;
  }
  ShiftSystem recoded(n, std::move(adj), system.sidedness());
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) values[a] = phi(g.blocks[a].view());
  return RecodedSystem{recoded, Potential::from_symbols(recoded, std::move(values), phi.name()),
                       g.blocks};
}

double transfer_pressure(const ShiftSystem& system, const Potential& phi) {
  const TransferMatrix t = make_transfer_matrix(system, phi);
  return std::log(power_iteration(t.matrix).eigenvalue) + t.offset;
}

double transfer_pressure_any(const ShiftSystem& system, const Potential& phi) {
  const TransferMatrix t = make_transfer_matrix(system, phi);
  return std::log(spectral_radius(t.matrix)) + t.offset;
}

double measure_entropy(const MarkovMeasure& mu) {
  double h = 0.0;
  for (int a = 0; a < mu.graph.size(); ++a) {
    double row = 0.0;
    for (double p : mu.transitions[a]) row += xlogx(p);
    h -= mu.stationary[a] * row;
  }
  return h;
}

MarkovMeasure lift_measure(const ShiftSystem& system, const MarkovMeasure& mu, int block_length) {
  const int s = mu.graph.block_length;
  if (block_length < s) throw Error(ErrorCode::kInvalidArgument, "cannot lower a measure's block length");
  if (block_length == s) return mu;
  MarkovMeasure out;
  out.graph = make_block_graph(system, block_length);
  out.stationary.assign(static_cast<std::size_t>(out.graph.size()), 0.0);
  out.transitions.resize(static_cast<std::size_t>(out.graph.size()));
  auto step_prob = [&](std::span<const Symbol> from, std::span<const Symbol> to) {
    const int a = mu.graph.index_of(from);
    const int b = mu.graph.index_of(to);
    const int e = edge_position(mu.graph, a, b);
    return e < 0 ? 0.0 : mu.transitions[a][static_cast<std::size_t>(e)];
  };
  for (int i = 0; i < out.graph.size(); ++i) {
    const auto& w = out.graph.blocks[i].symbols;
    const std::span<const Symbol> ws(w);
    double m = mu.stationary[mu.graph.index_of(ws.first(static_cast<std::size_t>(s)))];
    for (int j = 0; j + s < block_length && m > 0.0; ++j) {
      m *= step_prob(ws.subspan(static_cast<std::size_t>(j), static_cast<std::size_t>(s)),
                     ws.subspan(static_cast<std::size_t>(j + 1), static_cast<std::size_t>(s)));
    }
    out.stationary[i] = m;
    for (int b : out.graph.successors[i]) {
      const auto& v = out.graph.blocks[b].symbols;
      const std::span<const Symbol> vs(v);
      out.transitions[i].push_back(
          step_prob(ws.last(static_cast<std::size_t>(s)), vs.last(static_cast<std::size_t>(s))));
    }
  }
  return out;
}

double measure_integral(const ShiftSystem& system, const Potential& phi, const MarkovMeasure& mu) {
  const int level = std::max({mu.graph.block_length, phi.depth() - 1, 1});
  const MarkovMeasure lifted = lift_measure(system, mu, level);
  double total = 0.0;
  for (int a = 0; a < lifted.graph.size(); ++a) {
    if (lifted.stationary[a] == 0.0) continue;
    for (std::size_t i = 0; i < lifted.graph.successors[a].size(); ++i) {
      const double p = lifted.transitions[a][i];
      if (p == 0.0) continue;
      total += lifted.stationary[a] * p * phi(lifted.graph.edge_word(a, static_cast<int>(i)));
    }
  }
  return total;
}

double stationarity_defect(const MarkovMeasure& mu) {
  std::vector<double> next(mu.stationary.size(), 0.0);
  for (int a = 0; a < mu.graph.size(); ++a) {
    for (std::size_t i = 0; i < mu.graph.successors[a].size(); ++i) {
      next[mu.graph.successors[a][i]] += mu.stationary[a] * mu.transitions[a][i];
    }
  }
  double d = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) d = std::max(d, std::abs(next[i] - mu.stationary[i]));
  return d;
}

EquilibriumState equilibrium_markov(const ShiftSystem& system, const Potential& phi) {
  if (!system.irreducible()) {
    throw Error(ErrorCode::kNoUniquePerron, "equilibrium states require an irreducible system");
  }
  const TransferMatrix t = make_transfer_matrix(system, phi);
  const PerronData pd = power_iteration(t.matrix);
  const double lambda = pd.eigenvalue;
  EquilibriumState eq;
  eq.measure.graph = t.graph;
  eq.measure.stationary.resize(static_cast<std::size_t>(t.graph.size()));
  eq.measure.transitions.resize(static_cast<std::size_t>(t.graph.size()));
  for (int a = 0; a < t.graph.size(); ++a) {
    eq.measure.stationary[a] = pd.left[a] * pd.right[a];
    double row = 0.0;
    for (const auto& [b, m] : t.matrix.rows[a]) {
      const double p = m * pd.right[b] / (lambda * pd.right[a]);
      eq.measure.transitions[a].push_back(p);
      row += p;
    }
    for (double& p : eq.measure.transitions[a]) p /= row;
  }
  const double total = std::accumulate(eq.measure.stationary.begin(), eq.measure.stationary.end(), 0.0);
  for (double& x : eq.measure.stationary) x /= total;

  eq.eigenvalue = lambda * std::exp(t.offset);
  eq.entropy = measure_entropy(eq.measure);
  double integral = 0.0;
  for (int a = 0; a < t.graph.size(); ++a) {
    for (std::size_t i = 0; i < t.edge_potential[a].size(); ++i) {
      integral += eq.measure.stationary[a] * eq.measure.transitions[a][i] * t.edge_potential[a][i];
    }
  }
  eq.potential_integral = integral;
  const double pressure = std::log(lambda) + t.offset;
  if (std::abs(pressure - (eq.entropy + eq.potential_integral)) >
      kGibbsTolerance * std::max(1.0, std::abs(pressure))) {
    throw Error(ErrorCode::kNoConvergence, "Gibbs identity log(lambda) = h + int(phi) violated");
  }
  return eq;
}

MarkovMeasure markov_measure(const ShiftSystem& system,
                             const std::vector<std::vector<double>>& transitions,
                             std::vector<double> stationary) {
  const int k = system.alphabet_size();
  if (static_cast<int>(transitions.size()) != k) {
    throw Error(ErrorCode::kInvalidArgument, "transition matrix must be alphabet_size square");
  }
  MarkovMeasure mu;
  mu.graph = make_block_graph(system, 1);
  mu.transitions.resize(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) {
    if (static_cast<int>(transitions[a].size()) != k) {
      throw Error(ErrorCode::kInvalidArgument, "transition matrix must be alphabet_size square");
    }
    double row = 0.0;
    for (int b = 0; b < k; ++b) {
      const double p = transitions[a][b];
      if (p < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative transition probability");
      if (p > 0.0 && !system.allowed(a, b)) {
        throw Error(ErrorCode::kInvalidArgument, "transition on a forbidden edge");
      }
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-9) throw Error(ErrorCode::kInvalidArgument, "rows must sum to 1");
    for (int b : mu.graph.successors[a]) mu.transitions[a].push_back(transitions[a][b]);
  }
  if (stationary.empty()) {
    stationary = solve_stationary(mu.graph, mu.transitions);
  } else if (static_cast<int>(stationary.size()) != k) {
    throw Error(ErrorCode::kInvalidArgument, "stationary vector has the wrong size");
  }
  mu.stationary = std::move(stationary);
  return mu;
}

MarkovMeasure bernoulli_measure(const ShiftSystem& system, const std::vector<double>& probs) {
  const int k = system.alphabet_size();
  if (static_cast<int>(probs.size()) != k) {
    throw Error(ErrorCode::kInvalidArgument, "one probability per symbol required");
  }
  std::vector<std::vector<double>> p(static_cast<std::size_t>(k), probs);
  return markov_measure(system, p, probs);
}

MarkovMeasure dirac_fixed_point(const ShiftSystem& system, Symbol a) {
  if (!system.allowed(a, a)) throw Error(ErrorCode::kInvalidArgument, "symbol is not a fixed point");
  const int k = system.alphabet_size();
  std::vector<std::vector<double>> p(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int b = 0; b < k; ++b) {
    const auto& succ = system.successors(b);
    if (b == a) {
      p[b][a] = 1.0;
    } else {
      for (int c : succ) p[b][c] = 1.0 / static_cast<double>(succ.size());
    }
  }
  std::vector<double> pi(static_cast<std::size_t>(k), 0.0);
  pi[a] = 1.0;
  return markov_measure(system, p, pi);
}

MarkovMeasure perturb_measure(const MarkovMeasure& mu, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> noise(0.0, scale);
  MarkovMeasure out = mu;
  for (auto& row : out.transitions) {
    double total = 0.0;
    for (double& p : row) {
      if (p > 0.0) p *= std::exp(noise(rng));
      total += p;
    }
    for (double& p : row) p /= total;
  }
  out.stationary = solve_stationary(out.graph, out.transitions);
  return out;
}

double vp_residual(const ShiftSystem& system, const Potential& phi, const MarkovMeasure& mu) {
  if (stationarity_defect(mu) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "measure is not invariant");
  }
  const double p = transfer_pressure(system, phi);
  return p - (measure_entropy(mu) + measure_integral(system, phi, mu));
}

InverseVpProbe inverse_vp_probe(const ShiftSystem& system, const Potential& phi,
                                const MarkovMeasure& mu, int n) {
  if (n < 4) throw Error(ErrorCode::kInvalidArgument, "inverse variational probe needs n >= 4");
  if (system.word_count(n) > (std::uint64_t{1} << 24)) {
    throw Error(ErrorCode::kInvalidBudget, "too many n-words to enumerate the typical set");
  }
  InverseVpProbe out;
  out.n = n;
  out.free_energy = measure_entropy(mu) + measure_integral(system, phi, mu);
  out.pressure = transfer_pressure(system, phi);

  const BlockGraph& g = mu.graph;
  const int s = g.block_length;
  if (n <= s) throw Error(ErrorCode::kInvalidArgument, "n must exceed the measure's block length");
  bool memoryless = s == 1;
  for (int a = 1; a < g.size() && memoryless; ++a) {
    for (std::size_t i = 0; i < g.successors[a].size(); ++i) {
      const int pos = edge_position(g, 0, g.successors[a][i]);
      const double ref = pos < 0 ? 0.0 : mu.transitions[0][static_cast<std::size_t>(pos)];
      if (std::abs(ref - mu.transitions[a][i]) > 1e-12) memoryless = false;
    }
    if (g.successors[a].size() != g.successors[0].size()) memoryless = false;
  }

  // Expected statistics: block frequencies (memoryless) or edge frequencies.
  std::vector<double> expected;
  std::vector<int> edge_offset(static_cast<std::size_t>(g.size()) + 1, 0);
  for (int a = 0; a < g.size(); ++a) {
    edge_offset[a + 1] = edge_offset[a] + static_cast<int>(g.successors[a].size());
  }
  if (memoryless) {
    expected = mu.stationary;
  } else {
    for (int a = 0; a < g.size(); ++a) {
      for (double p : mu.transitions[a]) expected.push_back(mu.stationary[a] * p);
    }
  }
  const double radius = 1.0 / std::sqrt(static_cast<double>(n));

  std::vector<Word> typical;
  std::vector<double> counts(expected.size());
  for (const Word& w : system.admissible_words(n)) {
    std::fill(counts.begin(), counts.end(), 0.0);
    const auto ws = w.view();
    int prev = -1;
    int windows = 0;
    for (int j = 0; j + s <= n; ++j) {
      const int b = g.index_of(ws.subspan(static_cast<std::size_t>(j), static_cast<std::size_t>(s)));
      if (memoryless) {
        counts[b] += 1.0;
        ++windows;
      } else if (prev >= 0) {
        counts[edge_offset[prev] + edge_position(g, prev, b)] += 1.0;
        ++windows;
      }
      prev = b;
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      dev = std::max(dev, std::abs(counts[i] / windows - expected[i]));
    }
    if (dev < radius) typical.push_back(w);
  }
  out.typical_words = typical.size();
  if (typical.empty()) {
    throw Error(ErrorCode::kInvalidBudget,
                "typical set is empty at n = " + std::to_string(n) + "; increase n");
  }
  const ShiftSystem one_sided = system.with_sidedness(Sidedness::kOneSided);
  const Cover cover(one_sided, phi.depth());
  const int strings = n - phi.depth() + 1;
  out.value = log_lambda_n(one_sided, SubsetSpec::cylinders(std::move(typical)), phi, cover, strings) /
              static_cast<double>(strings);
  return out;
}

RecodedSystem power_system(const ShiftSystem& system, const Potential& phi, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "power must be >= 1");
  if (k == 1) return RecodedSystem{system, phi, {}};
  const auto words = system.admissible_words(k);
  const int n = static_cast<int>(words.size());
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      adj[static_cast<std::size_t>(a) * n + b] = system.allowed(words[a].symbols.back(), words[b][0]);
    }
  }
  ShiftSystem power(n, std::move(adj), system.sidedness());
  const int r = phi.depth();
  const int depth = 1 + (r - 1 + k - 1) / k;
  std::size_t size = 1;
  for (int i = 0; i < depth; ++i) size *= static_cast<std::size_t>(n);
  std::vector<double> table(size, 0.0);
  std::vector<int> digits(static_cast<std::size_t>(depth));
  std::vector<Symbol> concat;
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t c = idx;
    for (int i = depth - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(c % static_cast<std::size_t>(n));
      c /= static_cast<std::size_t>(n);
    }
    concat.clear();
    for (int d : digits) concat.insert(concat.end(), words[d].symbols.begin(), words[d].symbols.end());
    if (!system.is_admissible(concat)) continue;
    table[idx] = birkhoff_sum(phi, concat, k);
  }
  Potential sk(power, depth, std::move(table), phi.name() + "_S" + std::to_string(k));
  return RecodedSystem{power, sk, words};
}

PowerCheck power_pressure_check(const ShiftSystem& system, const Potential& phi, int k) {
  const RecodedSystem p = power_system(system, phi, k);
  return PowerCheck{transfer_pressure_any(p.system, p.potential),
                    static_cast<double>(k) * transfer_pressure_any(system, phi)};
}

}  // namespace cpt
