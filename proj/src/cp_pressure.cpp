#include "cptherm/cp_pressure.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "cptherm/perron.hpp"

namespace cpt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kDead = -1;
constexpr int kContained = 0;  // every extension meets Z (also the only state for whole / sub-shift)
constexpr int kPre = 1;        // before the anchoring coordinate of a cylinder union

std::size_t checked_power(int k, int e, std::size_t limit, const char* what) {
  std::size_t p = 1;
  for (int i = 0; i < e; ++i) {
    p *= static_cast<std::size_t>(k);
    if (p > limit) throw Error(ErrorCode::kInvalidBudget, what);
  }
  return p;
}

// Tracks whether the cylinder of the word read so far (anchored at the cover's
// first coordinate) meets Z.
class SubsetTracker {
 public:
  SubsetTracker(const ShiftSystem& system, const SubsetSpec& z, int lo)
      : system_(system), kind_(z.kind()), k_(system.alphabet_size()) {
    z.validate(system);
    if (kind_ == SubsetSpec::Kind::kSubShift) {
      sub_ = z.sub_adjacency();
      alive_ = z.surviving_symbols(system);
      empty_ = std::none_of(alive_.begin(), alive_.end(), [](std::uint8_t a) { return a != 0; });
    } else if (kind_ == SubsetSpec::Kind::kCylinderUnion) {
      offset_ = z.start_index() - lo;
      if (offset_ < 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "cylinders start left of the cover window; increase cover depth");
      }
      build_trie(z.words());
      empty_ = z.words().empty();
      build_reach();
    }
  }

  bool empty() const noexcept { return empty_; }
  int state_count() const noexcept {
    return kind_ == SubsetSpec::Kind::kCylinderUnion ? 2 + static_cast<int>(terminal_.size()) : 1;
  }
  bool restricted() const noexcept { return kind_ == SubsetSpec::Kind::kSubShift; }
  const std::vector<std::uint8_t>& alive() const noexcept { return alive_; }
  bool edge(Symbol a, Symbol b) const {
    if (restricted()) return sub_[static_cast<std::size_t>(a) * k_ + b] != 0;
    return system_.allowed(a, b);
  }

  int initial(Symbol a) const {
    switch (kind_) {
      case SubsetSpec::Kind::kWhole:
        return kContained;
      case SubsetSpec::Kind::kSubShift:
        return alive_[a] ? kContained : kDead;
      case SubsetSpec::Kind::kCylinderUnion:
        if (offset_ == 0) return enter(0, a);
        return reach_[offset_][a] ? kPre : kDead;
    }
    return kDead;
  }

  // `position` is the index of `next` in the word.
  int step(int state, Symbol prev, Symbol next, int position) const {
    if (!system_.allowed(prev, next)) return kDead;
    switch (kind_) {
      case SubsetSpec::Kind::kWhole:
        return kContained;
      case SubsetSpec::Kind::kSubShift:
        return alive_[next] && sub_[static_cast<std::size_t>(prev) * k_ + next] ? kContained : kDead;
      case SubsetSpec::Kind::kCylinderUnion:
        if (state == kContained) return kContained;
        if (state == kPre) {
          if (position < offset_) return reach_[offset_ - position][next] ? kPre : kDead;
          return enter(0, next);
        }
        return enter(state - 2, next);
    }
    return kDead;
  }

 private:
  int enter(int node, Symbol a) const {
    const int c = child_[static_cast<std::size_t>(node) * k_ + a];
    if (c < 0) return kDead;
    return terminal_[c] ? kContained : 2 + c;
  }

  void build_trie(const std::vector<Word>& words) {
    child_.assign(static_cast<std::size_t>(k_), -1);
    terminal_.assign(1, 0);
    for (const auto& w : words) {
      int node = 0;
      for (Symbol s : w.symbols) {
        const std::size_t slot = static_cast<std::size_t>(node) * k_ + s;
        if (child_[slot] < 0) {
          child_[slot] = static_cast<int>(terminal_.size());
          terminal_.push_back(0);
          child_.resize(child_.size() + static_cast<std::size_t>(k_), -1);
        }
        node = child_[slot];
        if (terminal_[node]) break;
      }
      terminal_[node] = 1;
    }
  }

  // reach_[d][a]: some word of the union can start d steps after symbol a.
  void build_reach() {
    reach_.assign(static_cast<std::size_t>(offset_) + 1, std::vector<std::uint8_t>(k_, 0));
    for (int a = 0; a < k_; ++a) reach_[0][a] = child_[a] >= 0;
    for (int d = 1; d <= offset_; ++d) {
      for (int a = 0; a < k_; ++a) {
        for (Symbol b : system_.successors(a)) {
          if (reach_[d - 1][b]) {
            reach_[d][a] = 1;
            break;
          }
        }
      }
    }
  }

  const ShiftSystem& system_;
  SubsetSpec::Kind kind_;
  int k_;
  bool empty_ = false;
  std::vector<std::uint8_t> sub_;
  std::vector<std::uint8_t> alive_;
  int offset_ = 0;
  std::vector<int> child_;
  std::vector<std::uint8_t> terminal_;
  std::vector<std::vector<std::uint8_t>> reach_;
};

// Forward dynamic program over domain words. Level l holds the classes of
// words of length l + 1; a class is (last K symbols, tracker state) and
// carries the sum of exp(S phi) over its words, scaled per level.
class StringEngine {
 public:
  StringEngine(const ShiftSystem& system, const SubsetSpec& z, const Potential& phi,
               const Cover& cover, int max_string_length)
      : system_(system), phi_(phi), cover_(cover), tracker_(system, z, cover.lo()) {
    if (cover.sidedness() != system.sidedness()) {
      throw Error(ErrorCode::kInvalidCover, "cover and system disagree on sidedness");
    }
    if (cover.depth() < phi.depth()) {
      throw Error(ErrorCode::kInvalidCover, "cover depth must be at least the potential depth");
    }
    if (phi.alphabet_size() != system.alphabet_size()) {
      throw Error(ErrorCode::kInvalidArgument, "potential and system alphabets differ");
    }
    if (max_string_length < 1) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
    k_ = system.alphabet_size();
    suffix_len_ = std::max(1, cover.depth() - 1);
    codes_ = checked_power(k_, suffix_len_, std::size_t{1} << 22, "cover depth too large for the alphabet");
    if (!tracker_.empty()) build(max_string_length + cover.width() - 1);
  }

  bool empty() const noexcept { return levels_.empty(); }
  int width() const noexcept { return cover_.width(); }

  double log_lambda(int n) const {
    if (empty()) return kNegInf;
    const Level& lv = levels_[level_of(n)];
    return lv.log_scale + std::log(std::accumulate(lv.f.begin(), lv.f.end(), 0.0));
  }

  WeightM weight_m(double alpha, int n, int cap_offset) const {
    WeightM out;
    out.depth_cap = n + cap_offset;
    if (empty()) {
      out.log_value = kNegInf;
      out.log_lower = kNegInf;
      out.lower_certified = true;
      return out;
    }
    const int top = level_of(n);
    const int cap = top + cap_offset;
    if (cap >= static_cast<int>(levels_.size())) {
      throw Error(ErrorCode::kInvalidBudget, "depth cap beyond the computed levels");
    }
    const double ratio = perron_ok_ ? perron_log_ - alpha : kNegInf;
    std::vector<double> up(levels_[cap].keys.size(), 1.0);
    std::vector<double> low(levels_[cap].keys.size(), 0.0);
    if (ratio >= 0.0) {
      for (std::size_t i = 0; i < low.size(); ++i) {
        const Key& key = levels_[cap].keys[i];
        if (key.state == kContained) low[i] = perron_h_[key.code];
      }
    }
    for (int l = cap - 1; l >= top; --l) {
      const Level& lv = levels_[l];
      std::vector<double> nu(lv.keys.size());
      std::vector<double> nl(lv.keys.size());
      for (std::size_t i = 0; i < lv.keys.size(); ++i) {
        double su = 0.0;
        double sl = 0.0;
        for (const auto& [c, inc] : lv.children[i]) {
          const double w = std::exp(inc - alpha);
          su += w * up[c];
          sl += w * low[c];
        }
        nu[i] = std::min(1.0, su);
        nl[i] = std::min(1.0, sl);
      }
      up = std::move(nu);
      low = std::move(nl);
    }
    const Level& lv = levels_[top];
    double su = 0.0;
    double sl = 0.0;
    for (std::size_t i = 0; i < lv.keys.size(); ++i) {
      su += lv.f[i] * up[i];
      sl += lv.f[i] * low[i];
    }
    const double tail = lv.log_scale - alpha * n;
    out.log_value = tail + std::log(su);
    out.log_lower = sl > 0.0 ? tail + std::log(sl) : kNegInf;
    out.lower_certified = sl > 0.0;
    return out;
  }

 private:
  struct Key {
    std::size_t code;
    int state;
  };
  struct Level {
    std::vector<Key> keys;
    std::vector<double> f;
    double log_scale = 0.0;
    std::vector<std::vector<std::pair<int, double>>> children;  // (index in next level, increment)
  };

  int level_of(int n) const { return n + cover_.width() - 2; }

  // Increment of S phi when `b` is appended to a word of length `len` whose
  // suffix code is `code`: phi on the first r of the last t symbols.
  double increment(std::size_t code, int len, Symbol b) const {
    if (len + 1 < cover_.width()) return 0.0;
    const int t = cover_.depth();
    window_.assign(static_cast<std::size_t>(t), 0);
    window_[t - 1] = b;
    for (int i = t - 2; i >= 0; --i) {
      window_[i] = static_cast<Symbol>(code % static_cast<std::size_t>(k_));
      code /= static_cast<std::size_t>(k_);
    }
    return phi_(std::span<const Symbol>(window_).first(static_cast<std::size_t>(phi_.depth())));
  }

  std::size_t push(std::size_t code, int len, Symbol b) const {
    const std::size_t next = code * static_cast<std::size_t>(k_) + static_cast<std::size_t>(b);
    return len >= suffix_len_ ? next % codes_ : next;
  }

  void build(int levels) {
    const auto states = static_cast<std::size_t>(tracker_.state_count());
    std::unordered_map<std::size_t, int> index;
    Level first;
    for (Symbol a = 0; a < k_; ++a) {
      const int s = tracker_.initial(a);
      if (s == kDead) continue;
      first.keys.push_back(Key{static_cast<std::size_t>(a), s});
      first.f.push_back(std::exp(increment(0, 0, a)));
    }
    levels_.push_back(std::move(first));
    for (int l = 0; l + 1 < levels; ++l) {
      Level& cur = levels_[l];
      const int len = l + 1;
      Level next;
      index.clear();
      cur.children.resize(cur.keys.size());
      for (std::size_t i = 0; i < cur.keys.size(); ++i) {
        const Key key = cur.keys[i];
        const auto last = static_cast<Symbol>(key.code % static_cast<std::size_t>(k_));
        for (Symbol b : system_.successors(last)) {
          const int s = tracker_.step(key.state, last, b, len);
          if (s == kDead) continue;
          const Key nk{push(key.code, len, b), s};
          const std::size_t id = nk.code * states + static_cast<std::size_t>(s);
          auto [it, fresh] = index.try_emplace(id, static_cast<int>(next.keys.size()));
          if (fresh) {
            next.keys.push_back(nk);
            next.f.push_back(0.0);
          }
          const double inc = increment(key.code, len, b);
          cur.children[i].emplace_back(it->second, inc);
          next.f[it->second] += cur.f[i] * std::exp(inc);
        }
      }
      const double m = *std::max_element(next.f.begin(), next.f.end());
      for (double& x : next.f) x /= m;
      next.log_scale = cur.log_scale + std::log(m);
      levels_.push_back(std::move(next));
    }
    build_perron();
  }

  // Perron data of the suffix-class matrix of the recurrent part of Z; it
  // certifies lower bounds for M at the depth cap.
  void build_perron() {
    const bool restricted = tracker_.restricted();
    std::vector<int> id(codes_, -1);
    std::vector<std::size_t> members;
    const int kk = suffix_len_;
    std::vector<Symbol> w(static_cast<std::size_t>(kk));
    for (std::size_t c = 0; c < codes_; ++c) {
      std::size_t x = c;
      for (int i = kk - 1; i >= 0; --i) {
        w[i] = static_cast<Symbol>(x % static_cast<std::size_t>(k_));
        x /= static_cast<std::size_t>(k_);
      }
      bool ok = true;
      for (int i = 0; i < kk && ok; ++i) {
        if (restricted && !tracker_.alive()[w[i]]) ok = false;
        if (i > 0 && !tracker_.edge(w[i - 1], w[i])) ok = false;
      }
      if (!ok) continue;
      id[c] = static_cast<int>(members.size());
      members.push_back(c);
    }
    if (members.empty()) return;
    SparseMatrix m;
    m.dimension = static_cast<int>(members.size());
    m.rows.resize(members.size());
    const double shift = phi_.max();
    const int full_len = cover_.width();
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::size_t c = members[i];
      const auto last = static_cast<Symbol>(c % static_cast<std::size_t>(k_));
      for (Symbol b = 0; b < k_; ++b) {
        if (!tracker_.edge(last, b)) continue;
        if (restricted && !tracker_.alive()[b]) continue;
        const int j = id[push(c, kk, b)];
        if (j < 0) continue;
        m.rows[i].emplace_back(j, std::exp(increment(c, std::max(kk, full_len), b) - shift));
      }
    }
    if (!irreducible(m)) return;
    try {
      const PerronData pd = power_iteration(m);
      const double hmax = *std::max_element(pd.right.begin(), pd.right.end());
      perron_h_.assign(codes_, 0.0);
      for (std::size_t i = 0; i < members.size(); ++i) perron_h_[members[i]] = pd.right[i] / hmax;
      perron_log_ = std::log(pd.eigenvalue) + shift;
      perron_ok_ = true;
    } catch (const Error&) {
      perron_ok_ = false;
    }
  }

  const ShiftSystem& system_;
  const Potential& phi_;
  const Cover& cover_;
  SubsetTracker tracker_;
  int k_ = 0;
  int suffix_len_ = 1;
  std::size_t codes_ = 1;
  std::vector<Level> levels_;
  bool perron_ok_ = false;
  double perron_log_ = 0.0;
  std::vector<double> perron_h_;
  mutable std::vector<Symbol> window_;
};

// lcm of the periods of the nontrivial strongly connected components of the
// graph Z lives on. log Lambda_N may oscillate with this period.
int graph_period(const ShiftSystem& system, const SubsetSpec& z) {
  const int k = system.alphabet_size();
  const auto& adj = z.kind() == SubsetSpec::Kind::kSubShift ? z.sub_adjacency() : system.adjacency();
  std::vector<std::uint8_t> reach(adj.begin(), adj.end());
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < k; ++i)
      if (reach[static_cast<std::size_t>(i) * k + m])
        for (int j = 0; j < k; ++j)
          if (reach[static_cast<std::size_t>(m) * k + j]) reach[static_cast<std::size_t>(i) * k + j] = 1;
  auto same = [&](int a, int b) {
    return a == b || (reach[static_cast<std::size_t>(a) * k + b] && reach[static_cast<std::size_t>(b) * k + a]);
  };
  int period = 1;
  std::vector<int> level(static_cast<std::size_t>(k), -1);
  for (int root = 0; root < k; ++root) {
    if (level[root] >= 0 || !reach[static_cast<std::size_t>(root) * k + root]) continue;
    std::vector<int> queue{root};
    level[root] = 0;
    int g = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      for (int v = 0; v < k; ++v) {
        if (!adj[static_cast<std::size_t>(u) * k + v] || !same(root, v)) continue;
        if (level[v] < 0) {
          level[v] = level[u] + 1;
          queue.push_back(v);
        } else {
          g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
        }
      }
    }
    if (g > 0) period = std::lcm(period, g);
  }
  return period;
}

PressureEstimate degenerate_estimate(const Cover& cover, int n_min, int n_max, EstimateMode mode) {
  PressureEstimate e;
  e.value = kNegInf;
  e.bracket_lo = kNegInf;
  e.bracket_hi = kNegInf;
  e.cover_depth = cover.depth();
  e.n_min = n_min;
  e.n_max = n_max;
  e.mode = mode;
  e.degenerate = true;
  e.notes.push_back("Z is empty");
  return e;
}

}  // namespace

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

Cover::Cover(const ShiftSystem& system, int depth)
    : depth_(depth), sidedness_(system.sidedness()) {
  if (depth < 1) throw Error(ErrorCode::kInvalidCover, "cover depth must be >= 1");
  lo_ = system.two_sided() ? -(depth - 1) : 0;
  width_ = system.two_sided() ? 2 * depth - 1 : depth;
}

double Cover::diameter() const { return std::ldexp(1.0, -depth_); }

std::vector<CylinderSet> Cover::elements(const ShiftSystem& system) const {
  checked_power(system.alphabet_size(), width_, std::size_t{1} << 24, "cover has too many elements");
  std::vector<CylinderSet> out;
  for (auto& w : system.admissible_words(width_)) out.push_back(CylinderSet{std::move(w), lo_});
  return out;
}

double Cover::oscillation(const ShiftSystem& system, const Potential& phi) const {
  if (depth_ >= phi.depth()) return 0.0;
  double gamma = 0.0;
  for (const auto& u : system.admissible_words(depth_)) {
    gamma = std::max(gamma, birkhoff_sup(system, phi, u, 1) - birkhoff_inf(system, phi, u, 1));
  }
  return gamma;
}

CoverString make_cover_string(const ShiftSystem& system, const Potential& phi, const Cover& cover,
                              const std::vector<int>& indices) {
  if (indices.empty()) throw Error(ErrorCode::kInvalidArgument, "a string has length >= 1");
  const auto elements = cover.elements(system);
  const int m = static_cast<int>(indices.size());
  const int width = cover.width();
  CoverString s;
  s.indices = indices;
  s.eta = std::exp(-static_cast<double>(m));
  s.psi = 1.0 / m;
  std::vector<Symbol> domain(static_cast<std::size_t>(m + width - 1), -1);
  bool consistent = true;
  for (int j = 0; j < m && consistent; ++j) {
    const int i = indices[j];
    if (i < 0 || i >= static_cast<int>(elements.size())) {
      throw Error(ErrorCode::kInvalidArgument, "cover index out of range");
    }
    const auto& w = elements[i].base_word.symbols;
    for (int p = 0; p < width; ++p) {
      Symbol& slot = domain[j + p];
      if (slot >= 0 && slot != w[p]) consistent = false;
      slot = w[p];
    }
  }
  s.domain = CylinderSet{Word{domain}, cover.lo()};
  s.empty = !consistent || !system.is_admissible(domain);
  if (!s.empty) {
    const Word tail{std::vector<Symbol>(domain.begin() - cover.lo(), domain.end())};
    s.xi = std::exp(birkhoff_sup(system, phi, tail, m));
  }
  return s;
}

std::string to_string(EstimateMode mode) {
  switch (mode) {
    case EstimateMode::kPressure:
      return "P";
    case EstimateMode::kCapacityLower:
      return "CP_lower";
    case EstimateMode::kCapacityUpper:
      return "CP_upper";
  }
  return "unknown";
}

std::vector<double> log_lambda_series(const ShiftSystem& system, const SubsetSpec& z,
                                      const Potential& phi, const Cover& cover, int n_max) {
  const StringEngine engine(system, z, phi, cover, n_max);
  std::vector<double> out(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) out[n - 1] = engine.log_lambda(n);
  return out;
}

double log_lambda_n(const ShiftSystem& system, const SubsetSpec& z, const Potential& phi,
                    const Cover& cover, int n) {
  return StringEngine(system, z, phi, cover, n).log_lambda(n);
}

double lambda_n(const ShiftSystem& system, const SubsetSpec& z, const Potential& phi,
                const Cover& cover, int n) {
  return std::exp(log_lambda_n(system, z, phi, cover, n));
}

CapacityPair capacity_pressures(const ShiftSystem& system, const SubsetSpec& z,
                                const Potential& phi, const Cover& cover, int n_max) {
  if (n_max < 8) throw Error(ErrorCode::kInvalidBudget, "capacity estimates need n_max >= 8");
  const int n_min = n_max / 2;
  const auto series = log_lambda_series(system, z, phi, cover, n_max);
  if (series.back() == kNegInf) {
    return CapacityPair{degenerate_estimate(cover, n_min, n_max, EstimateMode::kCapacityLower),
                        degenerate_estimate(cover, n_min, n_max, EstimateMode::kCapacityUpper)};
  }
  PressureEstimate base;
  base.cover_depth = cover.depth();
  base.n_min = n_min;
  base.n_max = n_max;
  double lo = std::numeric_limits<double>::infinity();
  double hi = kNegInf;
  double inc_lo = lo;
  double inc_hi = hi;
  double raw_lo = lo;
  double raw_hi = hi;
  std::vector<double> xs;
  std::vector<double> ys;
  // The accelerated extremes are taken over the last quarter of the window.
  const int n_tail = n_max - n_max / 4;
  int lag = graph_period(system, z);
  if (3 * lag >= n_tail) lag = 1;
  if (lag > 1) base.notes.push_back("increments taken over the graph period " + std::to_string(lag));
  base.metrics["increment_lag"] = lag;
  auto increment = [&](int n) { return (series[n - 1] - series[n - 1 - lag]) / lag; };
  for (int n = 1; n <= n_max; ++n) {
    const double v = series[n - 1];
    const double d = n == 1 ? v : v - series[n - 2];
    base.diagnostics.push_back(DiagnosticRow{n, v, d});
    if (n < n_min) continue;
    const double step = increment(n);
    inc_lo = std::min(inc_lo, step);
    inc_hi = std::max(inc_hi, step);
    raw_lo = std::min(raw_lo, v / n);
    raw_hi = std::max(raw_hi, v / n);
    xs.push_back(n);
    ys.push_back(v);
    if (n < n_tail) continue;
    // Aitken on three successive increments; log Lambda_N obeys a linear
    // recurrence, so the increments approach the limit geometrically.
    const double d1 = increment(n - lag);
    const double d0 = increment(n - 2 * lag);
    const double den = (step - d1) - (d1 - d0);
    double acc = step;
    if (std::abs(den) > 1e-14 * std::max(1.0, std::abs(step))) {
      const double corr = (step - d1) * (step - d1) / den;
      if (std::abs(corr) <= 100.0 * std::abs(step - d1)) acc = step - corr;
    }
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  base.metrics["increment_min"] = inc_lo;
  base.metrics["increment_max"] = inc_hi;
  base.bracket_lo = lo;
  base.bracket_hi = hi;
  base.metrics["raw_mean_min"] = raw_lo;
  base.metrics["raw_mean_max"] = raw_hi;
  base.metrics["regression_slope"] = least_squares_slope(xs, ys);
  CapacityPair out{base, base};
  out.lower.mode = EstimateMode::kCapacityLower;
  out.lower.value = lo;
  out.upper.mode = EstimateMode::kCapacityUpper;
  out.upper.value = hi;
  return out;
}

WeightM weight_m(const ShiftSystem& system, const SubsetSpec& z, double alpha,
                 const Potential& phi, const Cover& cover, int n, int cap_offset) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
  if (cap_offset < 0) throw Error(ErrorCode::kInvalidArgument, "cap offset must be >= 0");
  const StringEngine engine(system, z, phi, cover, n + cap_offset);
  return engine.weight_m(alpha, n, cap_offset);
}

PressureEstimate bisect_critical(const std::function<std::vector<double>(double)>& log_m,
                                 const std::vector<double>& ns, double lo, double hi,
                                 double scale, const CriticalOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  const double threshold = 1e-3 * scale;
  std::vector<std::pair<double, double>> probes;
  int near_critical = 0;
  auto slope = [&](double alpha) {
    const double s = least_squares_slope(ns, log_m(alpha));
    probes.emplace_back(alpha, s);
    if (std::abs(s) <= threshold) ++near_critical;
    return s;
  };
  if (!(slope(lo) > 0.0) || !(slope(hi) < 0.0)) {
    throw Error(ErrorCode::kInconclusive, "growth classification does not bracket the critical value");
  }
  while (hi - lo > options.tol) {
    if (static_cast<int>(probes.size()) >= options.max_probes) {
      throw Error(ErrorCode::kInconclusive, "probe budget exhausted before the bracket closed");
    }
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::sort(probes.begin(), probes.end());
  for (std::size_t i = 1; i < probes.size(); ++i) {
    if (probes[i].second > probes[i - 1].second + 1e-9 * scale) {
      throw Error(ErrorCode::kInconclusive, "growth classification is not monotone in alpha");
    }
  }
  PressureEstimate e;
  e.mode = EstimateMode::kPressure;
  e.bracket_lo = lo;
  e.bracket_hi = hi;
  e.value = 0.5 * (lo + hi);
  const auto ys = log_m(e.value);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    e.diagnostics.push_back(
        DiagnosticRow{static_cast<int>(ns[i]), ys[i], i == 0 ? 0.0 : ys[i] - ys[i - 1]});
  }
  e.metrics["classification_threshold"] = threshold;
  e.metrics["near_critical_probes"] = near_critical;
  e.metrics["probes"] = static_cast<double>(probes.size());
  return e;
}

PressureEstimate critical_alpha(const ShiftSystem& system, const SubsetSpec& z,
                                const Potential& phi, const Cover& cover,
                                const CriticalOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  if (options.n_max < 4) throw Error(ErrorCode::kInvalidBudget, "n_max must be >= 4");
  const int n_min = options.n_max / 2;
  const StringEngine engine(system, z, phi, cover, options.n_max + options.cap_offset);
  if (engine.empty()) return degenerate_estimate(cover, n_min, options.n_max, EstimateMode::kPressure);

  std::vector<double> xs;
  for (int n = n_min; n <= options.n_max; ++n) xs.push_back(n);
  auto log_m = [&](double alpha) {
    std::vector<double> ys;
    for (int n = n_min; n <= options.n_max; ++n) {
      ys.push_back(engine.weight_m(alpha, n, options.cap_offset).log_value);
    }
    return ys;
  };
  const double log_k = std::log(system.alphabet_size());
  PressureEstimate e = bisect_critical(log_m, xs, phi.min() - 1.0, phi.max() + log_k + 1.0,
                                       std::max(1.0, phi.max() - phi.min() + log_k), options);
  e.cover_depth = cover.depth();
  e.n_min = n_min;
  e.n_max = options.n_max;
  e.metrics["depth_cap_offset"] = options.cap_offset;
  return e;
}

RefinedPressure pressure_refined(const ShiftSystem& system, const SubsetSpec& z,
                                 const Potential& phi, const std::vector<int>& depths,
                                 const CriticalOptions& options, int jobs) {
  if (depths.empty()) throw Error(ErrorCode::kInvalidArgument, "no cover depths given");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < phi.depth()) {
      throw Error(ErrorCode::kInvalidCover, "cover depth must be at least the potential depth");
    }
    if (i > 0 && depths[i] <= depths[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "cover depths must be increasing");
    }
  }
  auto run = [&](int t) {
    const Cover cover(system, t);
    return std::make_pair(critical_alpha(system, z, phi, cover, options),
                          cover.oscillation(system, phi));
  };
  std::vector<std::pair<PressureEstimate, double>> results(depths.size());
  const std::size_t batch = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t i = 0; i < depths.size(); i += batch) {
    std::vector<std::future<std::pair<PressureEstimate, double>>> pending;
    for (std::size_t j = i; j < std::min(depths.size(), i + batch); ++j) {
      pending.push_back(std::async(batch > 1 ? std::launch::async : std::launch::deferred, run,
                                   depths[j]));
    }
    for (std::size_t j = 0; j < pending.size(); ++j) results[i + j] = pending[j].get();
  }

  RefinedPressure out;
  bool warning = false;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    DepthRow row{depths[i], results[i].first.value, 0.0, results[i].second};
    if (i > 0) {
      row.delta = row.value - out.depths.back().value;
      if (!results[i].first.degenerate &&
          std::abs(row.delta) > row.oscillation + out.depths.back().oscillation + 2.0 * options.tol) {
        warning = true;
      }
    }
    out.depths.push_back(row);
  }
  out.estimate = results.back().first;
  out.estimate.convergence_warning = warning;
  if (warning) out.estimate.notes.push_back("per-depth estimates moved by more than the oscillation bound");
  return out;
}

}  // namespace cpt
