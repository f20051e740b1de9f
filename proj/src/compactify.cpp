#include "cptherm/compactify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace cpt {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Join cells of the arc partition under the circle map, level by level.
// The cut points of level n are F^{-j}(b) for the non-fixed arc boundaries b
// and j < n, together with the fixed points 0 and +-pi. Birkhoff sums at a
// cut split into a backward part (the preimage chain of b) and a forward part
// (the orbit of b), both tabulated once.
class CellTower {
 public:
  CellTower(const CirclePotential& phi, CoverKind kind, int arcs, int levels)
      : kind_(kind), phi0_(phi.at_origin()), phi_inf_(phi.at_infinity()) {
    if (arcs < 4 || arcs % 2 != 0) {
      throw Error(ErrorCode::kInvalidBudget, "arc count must be even and >= 4");
    }
    if (levels < 1) throw Error(ErrorCode::kInvalidBudget, "need at least one level");
    for (int k = 1; k < arcs; ++k) {
      if (2 * k == arcs) continue;
      Chain c;
      const double b = -kPi + 2.0 * kPi * k / arcs;
      c.back.push_back(b);
      c.back_sum.push_back(0.0);
      c.fwd_prefix.push_back(0.0);
      double x = b;
      for (int j = 1; j <= levels; ++j) {
        c.back.push_back(LineDoublingModel::circle_preimage(c.back.back()));
        c.back_sum.push_back(c.back_sum.back() + phi(c.back.back()));
        c.fwd_prefix.push_back(c.fwd_prefix.back() + phi(x));
        x = LineDoublingModel::circle_map(x);
      }
      chains_.push_back(std::move(c));
    }
    for (int n = 1; n <= levels; ++n) build_level(n);
  }

  struct Level {
    std::vector<double> weight;  // log sup S_n over each cell
    std::vector<int> parent;     // cell of the previous level containing it
    int origin_left = -1;        // the two cells with endpoint 0
    int origin_right = -1;
  };

  const Level& level(int n) const { return levels_[n - 1]; }
  int levels() const { return static_cast<int>(levels_.size()); }

 private:
  struct Chain {
    std::vector<double> back;        // back[j] = F^{-j}(b)
    std::vector<double> back_sum;    // sum of phi(back[1..j])
    std::vector<double> fwd_prefix;  // sum of phi(F^i b), i < k
  };
  struct Cut {
    double theta;
    double s;
  };

  void build_level(int n) {
    std::vector<Cut> cuts;
    cuts.push_back(Cut{-kPi, n * phi_inf_});
    cuts.push_back(Cut{0.0, n * phi0_});
    cuts.push_back(Cut{kPi, n * phi_inf_});
    for (const auto& c : chains_) {
      for (int j = 0; j < n; ++j) cuts.push_back(Cut{c.back[j], c.back_sum[j] + c.fwd_prefix[n - j]});
    }
    std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) { return a.theta < b.theta; });
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](const Cut& a, const Cut& b) { return a.theta == b.theta; }),
               cuts.end());

    Level lv;
    const std::size_t cells = cuts.size() - 1;
    std::vector<double> weight(cells);
    std::vector<double> mids(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      weight[i] = std::max(cuts[i].s, cuts[i + 1].s);
      mids[i] = 0.5 * (cuts[i].theta + cuts[i + 1].theta);
      if (cuts[i + 1].theta == 0.0) lv.origin_left = static_cast<int>(i);
      if (cuts[i].theta == 0.0) lv.origin_right = static_cast<int>(i);
    }
    // Line cover: the first and last cells form the tail element around infinity.
    auto index = [&](std::size_t i) {
      if (kind_ == CoverKind::kCircle) return static_cast<int>(i);
      return i + 1 == cells ? 0 : static_cast<int>(i);
    };
    const std::size_t kept = kind_ == CoverKind::kCircle ? cells : cells - 1;
    lv.weight.assign(kept, kNegInf);
    for (std::size_t i = 0; i < cells; ++i) {
      double& w = lv.weight[static_cast<std::size_t>(index(i))];
      w = std::max(w, weight[i]);
    }
    lv.origin_left = index(static_cast<std::size_t>(lv.origin_left));
    lv.origin_right = index(static_cast<std::size_t>(lv.origin_right));
    if (!levels_.empty()) {
      lv.parent.resize(kept);
      for (std::size_t i = 0; i < cells; ++i) {
        const auto pos = std::upper_bound(prev_cuts_.begin(), prev_cuts_.end(), mids[i]) - prev_cuts_.begin() - 1;
        const std::size_t prev_cells = prev_cuts_.size() - 1;
        const int p = kind_ == CoverKind::kCircle
                          ? static_cast<int>(pos)
                          : (static_cast<std::size_t>(pos) + 1 == prev_cells ? 0 : static_cast<int>(pos));
        lv.parent[static_cast<std::size_t>(index(i))] = p;
      }
    }
    prev_cuts_.clear();
    for (const auto& c : cuts) prev_cuts_.push_back(c.theta);
    levels_.push_back(std::move(lv));
  }

  CoverKind kind_;
  double phi0_;
  double phi_inf_;
  std::vector<Chain> chains_;
  std::vector<Level> levels_;
  std::vector<double> prev_cuts_;
};

double log_lambda(const CellTower& tower, CircleSubset z, int n) {
  const auto& lv = tower.level(n);
  if (z == CircleSubset::kOrigin) return std::min(lv.weight[lv.origin_left], lv.weight[lv.origin_right]);
  double total = kNegInf;
  for (double w : lv.weight) total = log_add(total, w);
  return total;
}

double log_weight_m(const CellTower& tower, CircleSubset z, double alpha, int n, int cap) {
  const int top = n + cap;
  if (z == CircleSubset::kOrigin) {
    double best = std::numeric_limits<double>::infinity();
    for (int l = n; l <= top; ++l) {
      const auto& lv = tower.level(l);
      best = std::min({best, lv.weight[lv.origin_left] - alpha * l, lv.weight[lv.origin_right] - alpha * l});
    }
    return best;
  }
  std::vector<double> cost;
  for (double w : tower.level(top).weight) cost.push_back(w - alpha * top);
  for (int l = top - 1; l >= n; --l) {
    const auto& lv = tower.level(l);
    const auto& child = tower.level(l + 1);
    std::vector<double> sum(lv.weight.size(), kNegInf);
    for (std::size_t i = 0; i < cost.size(); ++i) {
      double& s = sum[static_cast<std::size_t>(child.parent[i])];
      s = log_add(s, cost[i]);
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = std::min(sum[i], lv.weight[i] - alpha * l);
    cost = std::move(sum);
  }
  double total = kNegInf;
  for (double c : cost) total = log_add(total, c);
  return total;
}

void fill_capacity(PressureEstimate& e, const CellTower& tower, CircleSubset z, int n_max) {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> counts;
  double prev = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double v = log_lambda(tower, z, n);
    e.diagnostics.push_back(DiagnosticRow{n, v, n == 1 ? v : v - prev});
    prev = v;
    if (n >= n_max / 2) {
      xs.push_back(n);
      ys.push_back(v);
      counts.push_back(std::log(static_cast<double>(tower.level(n).weight.size())));
    }
  }
  e.metrics["stolz"] = e.diagnostics.back().slope;
  e.metrics["regression"] = least_squares_slope(xs, ys);
  // log Lambda_N lies within log(#cells) of its largest term, so the growth
  // rate of the cell count bounds the drift of every slope above.
  e.metrics["cell_growth"] = least_squares_slope(xs, counts);
}

}  // namespace

double LineDoublingModel::potential(double x) { return kPi / 2.0 + std::atan(std::abs(x)); }

double LineDoublingModel::angle(double x) { return 2.0 * std::atan(x); }

double LineDoublingModel::line_point(double theta) { return std::tan(theta / 2.0); }

double LineDoublingModel::circle_map(double theta) {
  if (theta == 0.0 || std::abs(theta) >= kPi) return theta;
  return 2.0 * std::atan(2.0 * std::tan(theta / 2.0));
}

double LineDoublingModel::circle_preimage(double theta) {
  if (theta == 0.0 || std::abs(theta) >= kPi) return theta;
  return 2.0 * std::atan(0.5 * std::tan(theta / 2.0));
}

double LineDoublingModel::extended_potential(double theta) {
  return kPi / 2.0 + std::min(std::abs(theta), kPi) / 2.0;
}

CirclePotential CirclePotential::named(const std::string& name, double c) {
  if (name == "arccot") return CirclePotential(Shape::kArccot, 0.0);
  if (name == "quadratic") return CirclePotential(Shape::kQuadratic, 0.0);
  if (name == "sine") return CirclePotential(Shape::kSine, 0.0);
  if (name == "scaled_sine") return CirclePotential(Shape::kScaledSine, 0.0);
  if (name == "zero") return CirclePotential(Shape::kConstant, 0.0);
  if (name == "constant") return CirclePotential(Shape::kConstant, c);
  throw Error(ErrorCode::kInvalidArgument, "unknown circle potential '" + name + "'");
}

double CirclePotential::operator()(double theta) const {
  const double a = std::min(std::abs(theta), kPi);
  switch (shape_) {
    case Shape::kArccot:
      return LineDoublingModel::extended_potential(theta);
    case Shape::kQuadratic:
      return kPi / 2.0 + (kPi / 2.0) * (a / kPi) * (a / kPi);
    case Shape::kSine:
      return 1.0 + std::sin(a / 2.0) * std::sin(a / 2.0);
    case Shape::kScaledSine:
      return kPi / 2.0 + (kPi / 2.0) * std::sin(a / 2.0) * std::sin(a / 2.0);
    case Shape::kConstant:
      return c_;
  }
  return c_;
}

double CirclePotential::at_infinity() const { return (*this)(kPi); }

std::string CirclePotential::name() const {
  switch (shape_) {
    case Shape::kArccot:
      return "arccot";
    case Shape::kQuadratic:
      return "quadratic";
    case Shape::kSine:
      return "sine";
    case Shape::kScaledSine:
      return "scaled_sine";
    case Shape::kConstant:
      return "constant";
  }
  return "constant";
}

std::vector<Arc> arc_cover(CoverKind kind, int arcs) {
  if (arcs < 4 || arcs % 2 != 0) throw Error(ErrorCode::kInvalidBudget, "arc count must be even and >= 4");
  const double w = 2.0 * kPi / arcs;
  std::vector<Arc> out;
  if (kind == CoverKind::kCircle) {
    for (int k = 0; k < arcs; ++k) out.push_back(Arc{-kPi + k * w, -kPi + (k + 1) * w, false, true});
    return out;
  }
  out.push_back(Arc{kPi - w, -kPi + w, true, true});
  for (int k = 1; k + 1 < arcs; ++k) out.push_back(Arc{-kPi + k * w, -kPi + (k + 1) * w, false, true});
  return out;
}

bool admissible_on_line(const Arc& arc) {
  if (!arc.wraps) {
    // Closure [lo, hi] avoids infinity iff both ends stay inside (-pi, pi).
    return arc.lo > -kPi && arc.hi < kPi;
  }
  // Complement is (hi, lo); its closure [hi, lo] avoids infinity.
  return arc.hi > -kPi && arc.lo < kPi && arc.hi < arc.lo;
}

PressureEstimate circle_pressure(const CirclePotential& phi, CoverKind kind, CircleSubset z,
                                 const CircleBudget& budget) {
  if (budget.n_max < 4) throw Error(ErrorCode::kInvalidBudget, "n_max must be >= 4");
  const CellTower tower(phi, kind, budget.arcs, budget.n_max + budget.cap_offset);
  const int n_min = budget.n_max / 2;
  std::vector<double> xs;
  for (int n = n_min; n <= budget.n_max; ++n) xs.push_back(n);
  auto log_m = [&](double alpha) {
    std::vector<double> ys;
    for (int n = n_min; n <= budget.n_max; ++n) ys.push_back(log_weight_m(tower, z, alpha, n, budget.cap_offset));
    return ys;
  };
  const double lo = std::min(phi.at_origin(), phi.at_infinity()) - 1.0;
  const double hi = std::max(phi.at_origin(), phi.at_infinity()) + 1.0;
  CriticalOptions options;
  options.tol = budget.tol;
  options.n_max = budget.n_max;
  options.cap_offset = budget.cap_offset;
  PressureEstimate e = bisect_critical(log_m, xs, lo, hi, std::max(1.0, hi - lo), options);
  e.cover_depth = budget.arcs;
  e.n_min = n_min;
  e.n_max = budget.n_max;
  e.diagnostics.clear();
  fill_capacity(e, tower, z, budget.n_max);
  e.metrics["arcs"] = budget.arcs;
  e.metrics["tolerance"] =
      (e.bracket_hi - e.bracket_lo) + std::abs(e.value - e.metrics["stolz"]) + e.metrics["cell_growth"];
  return e;
}

PressureEstimate circle_capacity(const CirclePotential& phi, CoverKind kind, CircleSubset z, int arcs,
                                 int n_max) {
  if (n_max < 8) throw Error(ErrorCode::kInvalidBudget, "n_max must be >= 8");
  const CellTower tower(phi, kind, arcs, n_max);
  PressureEstimate e;
  e.mode = EstimateMode::kCapacityUpper;
  e.cover_depth = arcs;
  e.n_min = n_max / 2;
  e.n_max = n_max;
  fill_capacity(e, tower, z, n_max);
  e.value = e.metrics["regression"];
  e.bracket_lo = std::min(e.value, e.metrics["stolz"]);
  e.bracket_hi = std::max(e.value, e.metrics["stolz"]);
  e.metrics["arcs"] = arcs;
  return e;
}

TransferCheck compactification_transfer_check(const CirclePotential& phi, const CircleBudget& budget) {
  for (const auto& arc : arc_cover(CoverKind::kLine, budget.arcs)) {
    if (arc.admissible != admissible_on_line(arc)) {
      throw Error(ErrorCode::kInvalidCover, "line cover element fails the admissibility predicate");
    }
  }
  TransferCheck t;
  t.line = circle_pressure(phi, CoverKind::kLine, CircleSubset::kWhole, budget);
  t.circle = circle_pressure(phi, CoverKind::kCircle, CircleSubset::kWhole, budget);
  t.combined_tolerance = t.line.metrics["tolerance"] + t.circle.metrics["tolerance"];
  t.agree = std::abs(t.line.value - t.circle.value) <= t.combined_tolerance;
  return t;
}

std::vector<InvariantMeasure> invariant_measures(bool on_compactification) {
  const double p0 = LineDoublingModel::extended_potential(0.0);
  std::vector<InvariantMeasure> out{InvariantMeasure{"delta_0", 0.0, 0.0, p0}};
  if (on_compactification) {
    out.push_back(InvariantMeasure{"delta_inf", kPi, 0.0, LineDoublingModel::extended_potential(kPi)});
  }
  return out;
}

std::vector<double> pushforward_mass_decay(int points, int iterations, double half_width, double atom,
                                           std::uint64_t seed) {
  if (points < 1 || iterations < 0 || !(half_width > 0.0) || atom < 0.0 || atom > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "bad push-forward parameters");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> where(-half_width, half_width);
  std::vector<double> x(static_cast<std::size_t>(points));
  for (double& v : x) v = where(rng);
  const double w = (1.0 - atom) / points;
  std::vector<double> masses;
  for (int k = 0; k <= iterations; ++k) {
    double m = atom;
    for (double& v : x) {
      if (std::abs(v) <= half_width) m += w;
      v = LineDoublingModel::map(v);
    }
    masses.push_back(m);
  }
  return masses;
}

GapCertificate gap_example(const CircleBudget& budget) {
  GapCertificate g;
  g.line_inventory = invariant_measures(false);
  g.compact_inventory = invariant_measures(true);
  auto best = [](const std::vector<InvariantMeasure>& inv) {
    double b = kNegInf;
    for (const auto& m : inv) b = std::max(b, m.entropy + m.integral);
    return b;
  };
  g.pressure_compactified = best(g.compact_inventory);
  g.sup_over_line_measures = best(g.line_inventory);
  g.gap = g.pressure_compactified - g.sup_over_line_measures;
  const CirclePotential phi = CirclePotential::arccot();
  g.estimated_pressure =
      circle_capacity(phi, CoverKind::kCircle, CircleSubset::kWhole, budget.arcs, budget.gap_n_max).metrics.at("stolz");
  g.estimated_entropy = circle_capacity(CirclePotential::constant(0.0), CoverKind::kCircle, CircleSubset::kWhole,
                                        budget.arcs, budget.gap_n_max)
                            .value;
  g.estimated_gap = g.estimated_pressure - g.sup_over_line_measures;
  return g;
}

void FiniteMetricModel::validate() const {
  const int n = size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty metric model");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(distance[i].size()) != n) throw Error(ErrorCode::kInvalidArgument, "distance matrix must be square");
    if (distance[i][i] != 0.0) throw Error(ErrorCode::kInvalidArgument, "d(x, x) must be 0");
    for (int j = 0; j < n; ++j) {
      if (i != j && !(distance[i][j] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "distinct points need d > 0");
      if (distance[i][j] != distance[j][i]) throw Error(ErrorCode::kInvalidArgument, "distance must be symmetric");
      for (int k = 0; k < n; ++k) {
        if (distance[i][k] > distance[i][j] + distance[j][k] + 1e-12) {
          throw Error(ErrorCode::kInvalidArgument, "triangle inequality violated");
        }
      }
    }
  }
  auto check_indices = [&](const std::vector<int>& set) {
    for (int p : set) {
      if (p < 0 || p >= n) throw Error(ErrorCode::kInvalidArgument, "point index out of range");
    }
  };
  for (const auto& s : compact_sets) check_indices(s);
  for (const auto& s : cover) check_indices(s);
  if (admissible.size() != cover.size()) throw Error(ErrorCode::kInvalidArgument, "one admissibility flag per element");
}

bool FiniteMetricModel::is_compact(const std::vector<int>& set) const {
  if (set.empty()) return true;
  for (const auto& k : compact_sets) {
    if (std::all_of(set.begin(), set.end(), [&](int p) { return std::find(k.begin(), k.end(), p) != k.end(); })) {
      return true;
    }
  }
  return false;
}

bool FiniteMetricModel::element_admissible(std::size_t i) const {
  const auto& e = cover[i];
  std::vector<int> complement;
  for (int p = 0; p < size(); ++p) {
    if (std::find(e.begin(), e.end(), p) == e.end()) complement.push_back(p);
  }
  return is_compact(e) || is_compact(complement);
}

double lebesgue_number(const FiniteMetricModel& model) {
  model.validate();
  const int n = model.size();
  for (std::size_t i = 0; i < model.cover.size(); ++i) {
    if (model.admissible[i] != model.element_admissible(i)) {
      throw Error(ErrorCode::kInvalidCover, "admissibility flag disagrees with the topology");
    }
    if (!model.admissible[i]) throw Error(ErrorCode::kInvalidCover, "cover element is not admissible");
  }
  const double inf = std::numeric_limits<double>::infinity();
  double delta = inf;
  for (int x = 0; x < n; ++x) {
    double best = -1.0;
    for (const auto& e : model.cover) {
      if (std::find(e.begin(), e.end(), x) == e.end()) continue;
      double reach = inf;
      for (int y = 0; y < n; ++y) {
        if (std::find(e.begin(), e.end(), y) == e.end()) reach = std::min(reach, model.distance[x][y]);
      }
      best = std::max(best, reach);
    }
    if (best < 0.0) throw Error(ErrorCode::kInvalidCover, "cover misses a point");
    delta = std::min(delta, best);
  }
  if (delta == inf) {
    double diameter = 0.0;
    for (const auto& row : model.distance) diameter = std::max(diameter, *std::max_element(row.begin(), row.end()));
    return diameter > 0.0 ? diameter : 1.0;
  }
  return delta;
}

}  // namespace cpt
