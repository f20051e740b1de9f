#include "cptherm/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace cpt {
namespace {

std::vector<std::uint8_t> reachable_from(int k, const std::vector<std::uint8_t>& adj,
                                         int source, bool reverse) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(k), 0);
  std::queue<int> todo;
  seen[source] = 1;
  todo.push(source);
  while (!todo.empty()) {
    const int a = todo.front();
    todo.pop();
    for (int b = 0; b < k; ++b) {
      const auto e = reverse ? adj[b * k + a] : adj[a * k + b];
      if (e && !seen[b]) {
        seen[b] = 1;
        todo.push(b);
      }
    }
  }
  return seen;
}

std::size_t pow_size(int k, int r) {
  std::size_t n = 1;
  for (int i = 0; i < r; ++i) {
    if (n > (std::size_t{1} << 26) / static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::kInvalidArgument, "potential table too large");
    }
    n *= static_cast<std::size_t>(k);
  }
  return n;
}

void decode(std::size_t index, int k, int r, std::vector<Symbol>& out) {
  out.assign(static_cast<std::size_t>(r), 0);
  for (int i = r - 1; i >= 0; --i) {
    out[i] = static_cast<Symbol>(index % static_cast<std::size_t>(k));
    index /= static_cast<std::size_t>(k);
  }
}

// Maximum (or minimum) of S_n phi over admissible right-extensions of `word`
// to length `target`.
double extreme_over_extensions(const ShiftSystem& system, const Potential& phi,
                               std::vector<Symbol>& word, std::size_t target, int n,
                               bool maximize) {
  if (word.size() == target) return birkhoff_sum(phi, word, n);
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  for (Symbol b : system.successors(word.back())) {
    word.push_back(b);
    const double v = extreme_over_extensions(system, phi, word, target, n, maximize);
    word.pop_back();
    best = maximize ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

}  // namespace

bool strongly_connected(int k, const std::vector<std::uint8_t>& adjacency) {
  if (k <= 0) return false;
  const auto fwd = reachable_from(k, adjacency, 0, false);
  const auto bwd = reachable_from(k, adjacency, 0, true);
  return std::all_of(fwd.begin(), fwd.end(), [](auto v) { return v != 0; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](auto v) { return v != 0; });
}

ShiftSystem::ShiftSystem(int alphabet_size, std::vector<std::uint8_t> adjacency,
                         Sidedness sidedness)
    : k_(alphabet_size), adjacency_(std::move(adjacency)), sidedness_(sidedness) {
  if (k_ < 2) {
    throw Error(ErrorCode::kInvalidSystem, "alphabet size must be at least 2");
  }
  const auto n = static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_);
  if (adjacency_.size() != n) {
    throw Error(ErrorCode::kInvalidSystem, "adjacency must be alphabet_size x alphabet_size");
  }
  successors_.resize(static_cast<std::size_t>(k_));
  predecessors_.resize(static_cast<std::size_t>(k_));
  for (int a = 0; a < k_; ++a) {
    for (int b = 0; b < k_; ++b) {
      auto& e = adjacency_[index(a, b)];
      if (e > 1) throw Error(ErrorCode::kInvalidSystem, "adjacency entries must be 0 or 1");
      if (e) {
        successors_[a].push_back(b);
        predecessors_[b].push_back(a);
      }
    }
  }
  for (int a = 0; a < k_; ++a) {
    if (successors_[a].empty() || predecessors_[a].empty()) {
      throw Error(ErrorCode::kInvalidSystem,
                  "symbol " + std::to_string(a) + " has an empty adjacency row or column");
    }
  }
  irreducible_ = strongly_connected(k_, adjacency_);
}

ShiftSystem ShiftSystem::full_shift(int k, Sidedness sidedness) {
  if (k < 2) throw Error(ErrorCode::kInvalidSystem, "full shift needs at least 2 symbols");
  return ShiftSystem(k, std::vector<std::uint8_t>(static_cast<std::size_t>(k) * k, 1),
                     sidedness);
}

ShiftSystem ShiftSystem::from_rows(const std::vector<std::vector<int>>& rows,
                                   Sidedness sidedness) {
  const int k = static_cast<int>(rows.size());
  std::vector<std::uint8_t> adj;
  adj.reserve(rows.size() * rows.size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != k) {
      throw Error(ErrorCode::kInvalidSystem, "adjacency matrix is not square");
    }
    for (int v : row) {
      if (v != 0 && v != 1) throw Error(ErrorCode::kInvalidSystem, "adjacency entries must be 0 or 1");
      adj.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return ShiftSystem(k, std::move(adj), sidedness);
}

bool ShiftSystem::is_admissible(std::span<const Symbol> word) const {
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] < 0 || word[i] >= k_) return false;
    if (i > 0 && !allowed(word[i - 1], word[i])) return false;
  }
  return true;
}

std::vector<Word> ShiftSystem::admissible_words(int n) const {
  std::vector<Word> out;
  if (n <= 0) return out;
  std::vector<Symbol> cur;
  cur.reserve(static_cast<std::size_t>(n));
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == n) {
      out.push_back(Word{cur});
      return;
    }
    if (cur.empty()) {
      for (Symbol a = 0; a < k_; ++a) {
        cur.push_back(a);
        self(self);
        cur.pop_back();
      }
      return;
    }
    for (Symbol b : successors_[cur.back()]) {
      cur.push_back(b);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  return out;
}

std::uint64_t ShiftSystem::word_count(int n) const {
  if (n <= 0) return 0;
  std::vector<std::uint64_t> ending(static_cast<std::size_t>(k_), 1);
  for (int step = 1; step < n; ++step) {
    std::vector<std::uint64_t> next(static_cast<std::size_t>(k_), 0);
    for (int a = 0; a < k_; ++a) {
      for (Symbol b : successors_[a]) next[b] += ending[a];
    }
    ending.swap(next);
  }
  std::uint64_t total = 0;
  for (auto c : ending) total += c;
  return total;
}

ShiftSystem ShiftSystem::with_sidedness(Sidedness sidedness) const {
  return ShiftSystem(k_, adjacency_, sidedness);
}

ShiftSystem make_full_shift(int k) { return ShiftSystem::full_shift(k); }

bool CylinderSet::nonempty(const ShiftSystem& system) const {
  return !base_word.symbols.empty() && system.is_admissible(base_word.view());
}

double CylinderSet::diameter(Sidedness sidedness) const {
  const int len = static_cast<int>(base_word.length());
  if (sidedness == Sidedness::kOneSided) {
    // Coordinates start..start+len-1 fixed; first free coordinate is 0 unless
    // the cylinder starts at 0.
    return start_index == 0 ? std::ldexp(1.0, -len) : 1.0;
  }
  const int first = start_index;
  const int last = start_index + len - 1;
  if (first > 0 || last < 0) return 1.0;
  // Free coordinates nearest to the origin are first-1 and last+1.
  const int j = std::min(1 - first, last + 1);
  return std::ldexp(1.0, -j);
}

Potential::Potential(const ShiftSystem& system, int depth, std::vector<double> table,
                     std::string name)
    : k_(system.alphabet_size()), depth_(depth), table_(std::move(table)), name_(std::move(name)) {
  if (depth_ < 1) throw Error(ErrorCode::kInvalidArgument, "potential depth must be >= 1");
  const std::size_t n = pow_size(k_, depth_);
  if (table_.size() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "potential table must have alphabet_size^depth = " + std::to_string(n) +
                    " entries");
  }
  admissible_.assign(n, 0);
  min_ = std::numeric_limits<double>::infinity();
  max_ = -std::numeric_limits<double>::infinity();
  std::vector<Symbol> w;
  for (std::size_t i = 0; i < n; ++i) {
    decode(i, k_, depth_, w);
    if (!system.is_admissible(w)) {
      table_[i] = 0.0;
      continue;
    }
    if (!std::isfinite(table_[i])) {
      throw Error(ErrorCode::kInvalidArgument, "potential values must be finite");
    }
    admissible_[i] = 1;
    min_ = std::min(min_, table_[i]);
    max_ = std::max(max_, table_[i]);
  }
}

Potential Potential::zero(const ShiftSystem& system) { return constant(system, 0.0); }

Potential Potential::constant(const ShiftSystem& system, double c) {
  return Potential(system, 1, std::vector<double>(static_cast<std::size_t>(system.alphabet_size()), c),
                   c == 0.0 ? "zero" : "constant");
}

Potential Potential::from_symbols(const ShiftSystem& system, std::vector<double> values,
                                  std::string name) {
  return Potential(system, 1, std::move(values), std::move(name));
}

std::size_t Potential::window_index(std::span<const Symbol> window) const {
  std::size_t idx = 0;
  for (int i = 0; i < depth_; ++i) {
    idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(window[i]);
  }
  return idx;
}

double Potential::sup_norm() const noexcept { return std::max(std::abs(min_), std::abs(max_)); }

Potential Potential::scaled(double factor) const {
  Potential out = *this;
  for (std::size_t i = 0; i < out.table_.size(); ++i) out.table_[i] *= factor;
  out.min_ = factor >= 0 ? min_ * factor : max_ * factor;
  out.max_ = factor >= 0 ? max_ * factor : min_ * factor;
  return out;
}

Potential deepen(const ShiftSystem& system, const Potential& phi, int depth) {
  if (depth < phi.depth()) throw Error(ErrorCode::kInvalidArgument, "cannot reduce potential depth");
  if (depth == phi.depth()) return phi;
  const int k = system.alphabet_size();
  const std::size_t n = pow_size(k, depth);
  std::vector<double> table(n, 0.0);
  std::vector<Symbol> w;
  for (std::size_t i = 0; i < n; ++i) {
    decode(i, k, depth, w);
    table[i] = phi(w);
  }
  return Potential(system, depth, std::move(table), phi.name());
}

double sup_distance(const ShiftSystem& system, const Potential& phi, const Potential& psi) {
  const int depth = std::max(phi.depth(), psi.depth());
  const Potential a = deepen(system, phi, depth);
  const Potential b = deepen(system, psi, depth);
  double d = 0.0;
  for (std::size_t i = 0; i < a.table().size(); ++i) {
    if (a.admissible_window(i)) d = std::max(d, std::abs(a.table()[i] - b.table()[i]));
  }
  return d;
}

double birkhoff_sum(const Potential& phi, std::span<const Symbol> word, int n) {
  const auto need = static_cast<std::size_t>(n + phi.depth() - 1);
  if (n < 0 || word.size() < need) {
    throw Error(ErrorCode::kInsufficientWord, "word too short for a plain Birkhoff sum");
  }
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += phi(word.subspan(static_cast<std::size_t>(j)));
  return s;
}

double birkhoff_sup(const ShiftSystem& system, const Potential& phi, const Word& word, int n) {
  if (static_cast<int>(word.length()) < n || word.length() == 0) {
    throw Error(ErrorCode::kInsufficientWord, "word shorter than the number of summands");
  }
  if (!system.is_admissible(word.view())) {
    throw Error(ErrorCode::kInvalidArgument, "word is not admissible");
  }
  const auto target = static_cast<std::size_t>(n + phi.depth() - 1);
  if (word.length() >= target) return birkhoff_sum(phi, word.view(), n);
  std::vector<Symbol> w = word.symbols;
  return extreme_over_extensions(system, phi, w, target, n, true);
}

double birkhoff_inf(const ShiftSystem& system, const Potential& phi, const Word& word, int n) {
  if (static_cast<int>(word.length()) < n || word.length() == 0) {
    throw Error(ErrorCode::kInsufficientWord, "word shorter than the number of summands");
  }
  if (!system.is_admissible(word.view())) {
    throw Error(ErrorCode::kInvalidArgument, "word is not admissible");
  }
  const auto target = static_cast<std::size_t>(n + phi.depth() - 1);
  if (word.length() >= target) return birkhoff_sum(phi, word.view(), n);
  std::vector<Symbol> w = word.symbols;
  return extreme_over_extensions(system, phi, w, target, n, false);
}

SubsetSpec SubsetSpec::whole() { return SubsetSpec{}; }

SubsetSpec SubsetSpec::sub_shift(std::vector<std::uint8_t> adjacency) {
  SubsetSpec s;
  s.kind_ = Kind::kSubShift;
  s.sub_adjacency_ = std::move(adjacency);
  return s;
}

SubsetSpec SubsetSpec::cylinders(std::vector<Word> words, int start_index) {
  SubsetSpec s;
  s.kind_ = Kind::kCylinderUnion;
  s.words_ = std::move(words);
  s.start_index_ = start_index;
  return s;
}

void SubsetSpec::validate(const ShiftSystem& system) const {
  switch (kind_) {
    case Kind::kWhole:
      return;
    case Kind::kSubShift: {
      const auto k = static_cast<std::size_t>(system.alphabet_size());
      if (sub_adjacency_.size() != k * k) {
        throw Error(ErrorCode::kInvalidArgument, "sub-shift adjacency has the wrong size");
      }
      for (std::size_t i = 0; i < sub_adjacency_.size(); ++i) {
        if (sub_adjacency_[i] > system.adjacency()[i]) {
          throw Error(ErrorCode::kInvalidArgument,
                      "sub-shift adjacency must be entrywise <= the parent adjacency");
        }
      }
      return;
    }
    case Kind::kCylinderUnion:
      if (start_index_ < 0 && !system.two_sided()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "cylinders of a one-sided system must start at a coordinate >= 0");
      }
      for (const auto& w : words_) {
        if (w.length() == 0 || !system.is_admissible(w.view())) {
          throw Error(ErrorCode::kInvalidArgument, "cylinder word is empty or not admissible");
        }
      }
      return;
  }
}

SubsetSpec SubsetSpec::shifted_image() const {
  if (kind_ != Kind::kCylinderUnion) return *this;
  SubsetSpec s = *this;
  s.start_index_ = start_index_ - 1;
  return s;
}

std::vector<std::uint8_t> SubsetSpec::surviving_symbols(const ShiftSystem& system) const {
  if (kind_ != Kind::kSubShift) return {};
  const int k = system.alphabet_size();
  std::vector<std::uint8_t> alive(static_cast<std::size_t>(k), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < k; ++a) {
      if (!alive[a]) continue;
      bool out = false;
      bool in = false;
      for (int b = 0; b < k; ++b) {
        if (!alive[b]) continue;
        out = out || sub_adjacency_[a * k + b];
        in = in || sub_adjacency_[b * k + a];
      }
      if (!out || (system.two_sided() && !in)) {
        alive[a] = 0;
        changed = true;
      }
    }
  }
  return alive;
}

}  // namespace cpt
