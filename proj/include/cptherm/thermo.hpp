#pragma once

// Transfer-matrix oracles for locally constant potentials on SFTs:
// classical pressure, equilibrium (Gibbs) Markov measures, and the
// variational-principle checks built on top of them.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cptherm/perron.hpp"
#include "cptherm/symbolic.hpp"

namespace cpt {

/// Graph whose vertices are the admissible blocks of a fixed length and whose
/// edges join overlapping blocks (a[1..] == b[..-1]).
struct BlockGraph {
  int block_length = 1;
  int alphabet_size = 0;
  std::vector<Word> blocks;
  std::vector<std::vector<int>> successors;

  int size() const noexcept { return static_cast<int>(blocks.size()); }
  /// Index of a block, or -1 when the block is not admissible.
  int index_of(std::span<const Symbol> block) const;
  /// The (block_length + 1)-word read along the edge a -> successors[a][i].
  std::vector<Symbol> edge_word(int a, int i) const;

  std::vector<int> lookup;  // base-k code -> block index
};

BlockGraph make_block_graph(const ShiftSystem& system, int block_length);

/// Weighted transfer matrix on (r-1)-blocks (symbols when r = 1): the entry
/// for the edge a -> b is exp(phi) evaluated on the r-word read along it.
struct TransferMatrix {
  BlockGraph graph;
  std::vector<std::vector<double>> edge_potential;  // aligned with graph.successors
  SparseMatrix matrix;                              // exp(edge_potential - offset)
  double offset = 0.0;                              // log-scale factored out of matrix
};

TransferMatrix make_transfer_matrix(const ShiftSystem& system, const Potential& phi);

/// Shift-invariant Markov measure on the blocks of a BlockGraph.
struct MarkovMeasure {
  BlockGraph graph;
  std::vector<double> stationary;
  std::vector<std::vector<double>> transitions;  // aligned with graph.successors
};

struct EquilibriumState {
  MarkovMeasure measure;
  double entropy = 0.0;
  double potential_integral = 0.0;
  double eigenvalue = 0.0;  ///< Perron eigenvalue; log of it is the pressure
};

struct RecodedSystem {
  ShiftSystem system;
  Potential potential;  ///< depth-1 on the recoded alphabet
  std::vector<Word> blocks;
};

/// Higher-block presentation: the new alphabet is the admissible r-blocks and
/// the potential becomes depth 1. r = 1 returns the input unchanged.
RecodedSystem block_recode(const ShiftSystem& system, const Potential& phi);

/// log of the Perron eigenvalue of the transfer matrix. Requires an
/// irreducible system.
double transfer_pressure(const ShiftSystem& system, const Potential& phi);

/// log spectral radius of the transfer matrix; valid for reducible systems
/// (maximum over irreducible components).
double transfer_pressure_any(const ShiftSystem& system, const Potential& phi);

EquilibriumState equilibrium_markov(const ShiftSystem& system, const Potential& phi);

double measure_entropy(const MarkovMeasure& mu);
double measure_integral(const ShiftSystem& system, const Potential& phi, const MarkovMeasure& mu);
/// |mu P - mu|_inf, zero for an invariant measure.
double stationarity_defect(const MarkovMeasure& mu);

/// The same measure presented on blocks of a larger length.
MarkovMeasure lift_measure(const ShiftSystem& system, const MarkovMeasure& mu, int block_length);

/// Markov measure from a dense transition matrix on symbols. When
/// `stationary` is empty it is solved for (the chain must be irreducible).
MarkovMeasure markov_measure(const ShiftSystem& system,
                             const std::vector<std::vector<double>>& transitions,
                             std::vector<double> stationary = {});
MarkovMeasure bernoulli_measure(const ShiftSystem& system, const std::vector<double>& probs);
/// Point mass on the fixed point a^infinity (requires a -> a allowed).
MarkovMeasure dirac_fixed_point(const ShiftSystem& system, Symbol a);

/// Random invariant Markov measure with the support of `mu`: every positive
/// transition is multiplied by exp(N(0, scale)), rows are renormalized and
/// the stationary vector re-solved.
MarkovMeasure perturb_measure(const MarkovMeasure& mu, std::mt19937_64& rng, double scale);

/// P_X(phi) - (h_mu + int phi dmu). Nonnegative for every invariant mu,
/// zero exactly at the equilibrium state.
double vp_residual(const ShiftSystem& system, const Potential& phi, const MarkovMeasure& mu);

struct InverseVpProbe {
  double value = 0.0;        ///< (1/N) log Lambda over the typical set
  double free_energy = 0.0;  ///< h_mu + int phi dmu
  double pressure = 0.0;     ///< P_X(phi)
  int n = 0;
  std::size_t typical_words = 0;
};

/// Pressure of the frequency-typical set at depth n: the union of the
/// n-cylinders whose empirical block frequencies are strictly within
/// 1/sqrt(n) of mu's. Block statistics are single blocks for memoryless
/// measures and transitions otherwise.
InverseVpProbe inverse_vp_probe(const ShiftSystem& system, const Potential& phi,
                                const MarkovMeasure& mu, int n);

/// k-th power system: alphabet = admissible k-words, potential S_k phi.
RecodedSystem power_system(const ShiftSystem& system, const Potential& phi, int k);

struct PowerCheck {
  double lhs = 0.0;  ///< P_{f^k}(S_k phi)
  double rhs = 0.0;  ///< k P_f(phi)
};

PowerCheck power_pressure_check(const ShiftSystem& system, const Potential& phi, int k);

}  // namespace cpt
