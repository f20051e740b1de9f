#pragma once

// Shift spaces, words, cylinders and locally constant potentials.
//
// Every computation in the library runs on a subshift of finite type (SFT)
// over the alphabet {0, ..., k-1}. The metric is d(x, y) = 2^-j where j is the
// first coordinate (smallest |index| for two-sided sequences) at which x and y
// disagree, so cylinder covers of depth t have diameter 2^-t.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cptherm/error.hpp"

namespace cpt {

using Symbol = int;

enum class Sidedness { kOneSided, kTwoSided };

struct Word {
  std::vector<Symbol> symbols;

  std::size_t length() const noexcept { return symbols.size(); }
  Symbol operator[](std::size_t i) const { return symbols[i]; }
  std::span<const Symbol> view() const noexcept { return symbols; }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

/// A subshift of finite type given by a 0/1 adjacency matrix.
///
/// Construction rejects alphabets of size < 2 and matrices with an empty row
/// or column, so every admissible word extends to an infinite sequence in
/// both directions. Irreducibility is computed and exposed as a flag; the
/// equilibrium-state machinery requires it.
class ShiftSystem {
 public:
  ShiftSystem(int alphabet_size, std::vector<std::uint8_t> adjacency,
              Sidedness sidedness = Sidedness::kOneSided);

  static ShiftSystem full_shift(int k, Sidedness sidedness = Sidedness::kOneSided);
  static ShiftSystem from_rows(const std::vector<std::vector<int>>& rows,
                               Sidedness sidedness = Sidedness::kOneSided);

  int alphabet_size() const noexcept { return k_; }
  Sidedness sidedness() const noexcept { return sidedness_; }
  bool two_sided() const noexcept { return sidedness_ == Sidedness::kTwoSided; }
  bool irreducible() const noexcept { return irreducible_; }
  bool allowed(Symbol a, Symbol b) const { return adjacency_[index(a, b)] != 0; }
  const std::vector<std::uint8_t>& adjacency() const noexcept { return adjacency_; }
  const std::vector<Symbol>& successors(Symbol a) const { return successors_[a]; }
  const std::vector<Symbol>& predecessors(Symbol a) const { return predecessors_[a]; }

  bool is_admissible(std::span<const Symbol> word) const;

  /// All admissible words of length n in lexicographic order.
  std::vector<Word> admissible_words(int n) const;

  /// Number of admissible words of length n (sum of entries of A^(n-1)).
  std::uint64_t word_count(int n) const;

  /// Same system with the other sidedness.
  ShiftSystem with_sidedness(Sidedness sidedness) const;

 private:
  std::size_t index(Symbol a, Symbol b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(k_) +
           static_cast<std::size_t>(b);
  }

  int k_;
  std::vector<std::uint8_t> adjacency_;
  Sidedness sidedness_;
  bool irreducible_ = false;
  std::vector<std::vector<Symbol>> successors_;
  std::vector<std::vector<Symbol>> predecessors_;
};

ShiftSystem make_full_shift(int k);

/// True when the directed graph on k vertices with the given 0/1 matrix is
/// strongly connected.
bool strongly_connected(int k, const std::vector<std::uint8_t>& adjacency);

struct CylinderSet {
  Word base_word;
  int start_index = 0;

  bool nonempty(const ShiftSystem& system) const;
  double diameter(Sidedness sidedness) const;
};

/// Locally constant potential of finite depth r: its value at x depends only
/// on x_0 ... x_{r-1}. The table is indexed by the base-k encoding of the
/// length-r window; entries at inadmissible windows are ignored.
class Potential {
 public:
  Potential(const ShiftSystem& system, int depth, std::vector<double> table,
            std::string name = {});

  static Potential zero(const ShiftSystem& system);
  static Potential constant(const ShiftSystem& system, double c);
  /// Depth-1 potential from one value per symbol.
  static Potential from_symbols(const ShiftSystem& system, std::vector<double> values,
                                std::string name = {});

  int depth() const noexcept { return depth_; }
  int alphabet_size() const noexcept { return k_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& table() const noexcept { return table_; }
  bool admissible_window(std::size_t index) const { return admissible_[index] != 0; }

  std::size_t window_index(std::span<const Symbol> window) const;

  /// Value at a point whose first `depth()` coordinates are `window[0..depth)`.
  double operator()(std::span<const Symbol> window) const {
    return table_[window_index(window)];
  }

  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double sup_norm() const noexcept;

  Potential scaled(double factor) const;

 private:
  int k_;
  int depth_;
  std::vector<double> table_;
  std::vector<std::uint8_t> admissible_;
  std::string name_;
  double min_ = 0.0;
  double max_ = 0.0;
};

/// sup over admissible windows of |phi - psi|; both potentials are brought to
/// the larger depth first.
double sup_distance(const ShiftSystem& system, const Potential& phi, const Potential& psi);

/// Same potential expressed with a larger depth.
Potential deepen(const ShiftSystem& system, const Potential& phi, int depth);

/// Plain Birkhoff sum S_n phi read off a word of length >= n + depth - 1.
double birkhoff_sum(const Potential& phi, std::span<const Symbol> word, int n);

/// sup over the cylinder [word] of S_n phi. Exact: when the word is too short
/// for a plain sum, the maximum is taken over all admissible extensions.
double birkhoff_sup(const ShiftSystem& system, const Potential& phi, const Word& word, int n);
double birkhoff_inf(const ShiftSystem& system, const Potential& phi, const Word& word, int n);

/// The set Z of the pressure definitions.
class SubsetSpec {
 public:
  enum class Kind { kWhole, kSubShift, kCylinderUnion };

  static SubsetSpec whole();
  /// Invariant compact set of all sequences admissible for the sub-adjacency.
  static SubsetSpec sub_shift(std::vector<std::uint8_t> adjacency);
  /// Finite union of cylinders, all anchored at the same coordinate.
  static SubsetSpec cylinders(std::vector<Word> words, int start_index = 0);

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::uint8_t>& sub_adjacency() const noexcept { return sub_adjacency_; }
  const std::vector<Word>& words() const noexcept { return words_; }
  int start_index() const noexcept { return start_index_; }

  void validate(const ShiftSystem& system) const;

  /// f(Z) for a cylinder union: sigma shifts coordinates down by one.
  SubsetSpec shifted_image() const;

  /// Symbols that lie on a bi-infinite (two-sided) or forward-infinite
  /// (one-sided) path of the sub-adjacency. Empty for kWhole.
  std::vector<std::uint8_t> surviving_symbols(const ShiftSystem& system) const;

 private:
  Kind kind_ = Kind::kWhole;
  std::vector<std::uint8_t> sub_adjacency_;
  std::vector<Word> words_;
  int start_index_ = 0;
};

}  // namespace cpt
