// Acceptance run: every criterion at its stated tolerance, one line each.
// Exit status is 0 iff all criteria pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cptherm/compactify.hpp"
#include "cptherm/cp_pressure.hpp"
#include "cptherm/multifractal.hpp"
#include "cptherm/thermo.hpp"
#include "oracles.hpp"

using namespace cpt;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);
constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-6;  // bisection tolerance for cover estimates

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what, double value) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s=%.3g", detail.empty() ? "" : ", ", what.c_str(), value);
    detail += buf;
    if (!ok) {
      pass = false;
      detail += "(!)";
    }
  }
};

CriticalOptions options(int n_max = 24) {
  CriticalOptions o;
  o.tol = kTol;
  o.n_max = n_max;
  return o;
}

ShiftSystem golden() { return ShiftSystem::from_rows({{1, 1}, {1, 0}}); }

struct Random {
  ShiftSystem system;
  Potential phi;
};

Random random_instance(std::mt19937_64& rng, int max_k, int depth, double density = 0.5) {
  int k = 0;
  auto adj = oracle::random_irreducible(rng, max_k, &k, density);
  ShiftSystem s(k, adj);
  return {s, Potential(s, depth, oracle::random_table(rng, oracle::ipow(k, depth)))};
}

Outcome c1() {
  Outcome o;
  ShiftSystem s = make_full_shift(2);
  Potential zero = Potential::zero(s);
  double worst = 0.0;
  auto series = log_lambda_series(s, SubsetSpec::whole(), zero, Cover(s, 1), 20);
  for (int n = 1; n <= 20; ++n) worst = std::max(worst, std::abs(series[n - 1] - n * kLog2));
  o.require(worst <= 1e-12, "|logL_N - N log2|", worst);
  CapacityPair cap = capacity_pressures(s, SubsetSpec::whole(), zero, Cover(s, 1), 30);
  o.require(std::abs(cap.lower.value - kLog2) <= 1e-6, "CP_lo-log2", cap.lower.value - kLog2);
  o.require(std::abs(cap.upper.value - kLog2) <= 1e-6, "CP_up-log2", cap.upper.value - kLog2);
  double p = critical_alpha(s, SubsetSpec::whole(), zero, Cover(s, 1), options()).value;
  o.require(std::abs(p - kLog2) <= 1e-6, "P-log2", p - kLog2);
  return o;
}

Outcome c2() {
  Outcome o;
  CapacityPair cap = capacity_pressures(golden(), SubsetSpec::whole(), Potential::zero(golden()), Cover(golden(), 1), 30);
  double err = cap.upper.value - oracle::golden_log();
  o.require(std::abs(err) <= 1e-3, "CP_up-log(golden)", err);
  return o;
}

Outcome c3() {
  Outcome o;
  ShiftSystem s = make_full_shift(2);
  Potential phi = Potential::from_symbols(s, {0.0, kLog2});
  RefinedPressure r = pressure_refined(s, SubsetSpec::whole(), phi, {1, 2, 3}, options());
  double worst = 0.0;
  for (const auto& row : r.depths) worst = std::max(worst, std::abs(row.value - kLog3));
  o.require(worst <= 1e-6, "max|P_t-log3|", worst);
  double t0 = t_value(s, phi, 0.0) - kLog2;
  double t1 = t_value(s, phi, 1.0);
  o.require(std::abs(t0) <= 1e-9, "T(0)-log2", t0);
  o.require(std::abs(t1) <= 1e-9, "T(1)", t1);
  return o;
}

Outcome c4() {
  Outcome o;
  std::mt19937_64 rng(401);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    Random inst = random_instance(rng, 6, 1 + i % 2);
    EquilibriumState eq = equilibrium_markov(inst.system, inst.phi);
    worst = std::max(worst, std::abs(std::log(eq.eigenvalue) - eq.entropy - eq.potential_integral));
  }
  o.require(worst <= 1e-9, "max Gibbs defect", worst);
  return o;
}

Outcome c5() {
  Outcome o;
  std::mt19937_64 rng(501);
  double min_residual = 1e300, max_eq = 0.0;
  for (int i = 0; i < 10; ++i) {
    Random inst = random_instance(rng, 5, 1 + i % 2);
    EquilibriumState eq = equilibrium_markov(inst.system, inst.phi);
    max_eq = std::max(max_eq, std::abs(vp_residual(inst.system, inst.phi, eq.measure)));
    for (int j = 0; j < 20; ++j)
      min_residual = std::min(min_residual, vp_residual(inst.system, inst.phi, perturb_measure(eq.measure, rng, 1.0)));
  }
  o.require(min_residual >= -1e-9, "min residual (200 measures)", min_residual);
  o.require(max_eq <= 1e-9, "residual at equilibrium", max_eq);
  return o;
}

Outcome c6() {
  Outcome o;
  ShiftSystem s = make_full_shift(2);
  Potential phi = Potential::from_symbols(s, {0.0, kLog2});
  std::vector<double> q = q_grid(-5.0, 5.0, 0.05);
  TQCurve curve = t_curve(s, phi, q);
  o.require(curve.min_second_difference >= -1e-9, "min 2nd difference", curve.min_second_difference);
  double defect = alpha_difference_defect(s, phi, q, 1e-3);
  o.require(defect <= 1e-6, "|alpha + central diff|", defect);
  double min_alpha = *std::min_element(curve.alpha.begin(), curve.alpha.end());
  o.require(min_alpha >= -1e-9, "min alpha (T'<=0)", min_alpha);
  return o;
}

Outcome c7() {
  Outcome o;
  ShiftSystem s = make_full_shift(2);
  LegendreResult leg = legendre_check(t_curve(s, Potential::from_symbols(s, {0.0, kLog2}), q_grid(-5.0, 5.0, 0.05)));
  o.require(!leg.skipped && leg.forward_defect <= 1e-4, "forward defect", leg.forward_defect);
  o.require(!leg.skipped && leg.reverse_defect <= 1e-4, "reverse defect", leg.reverse_defect);
  return o;
}

Outcome c8() {
  Outcome o;
  ShiftSystem s = make_full_shift(2);
  Potential phi = Potential::from_symbols(s, {0.0, kLog2});
  CorrelationEntropyCurve c = correlation_entropy(s, phi, {0.5, 2.0, 3.0}, 20);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.q.size(); ++i) worst = std::max(worst, std::abs(c.formula[i] - c.direct[i]));
  o.require(worst <= 1e-3, "max|formula-direct|", worst);
  double h0 = -t_value(s, phi, 0.0) / (0.0 - 1.0) - transfer_pressure(s, Potential::zero(s));
  o.require(std::abs(h0) <= 1e-9, "h(0)-h(f)", h0);
  double lim = c.limit_value - c.measure_entropy;
  o.require(std::abs(lim) <= 1e-3, "q->1 limit - h_mu", lim);
  return o;
}

Outcome c9() {
  Outcome o;
  std::mt19937_64 rng(901);
  double worst = -1e300;
  for (int i = 0; i < 100; ++i) {
    Random a = random_instance(rng, 5, 1);
    Potential psi(a.system, 1, oracle::random_table(rng, a.system.alphabet_size()));
    double gap = std::abs(transfer_pressure(a.system, a.phi) - transfer_pressure(a.system, psi));
    worst = std::max(worst, gap - sup_distance(a.system, a.phi, psi));
  }
  o.require(worst <= 1e-9, "oracle excess", worst);
  worst = -1e300;
  for (int i = 0; i < 6; ++i) {
    Random a = random_instance(rng, 3, 1, 0.7);
    Potential psi(a.system, 1, oracle::random_table(rng, a.system.alphabet_size()));
    double pa = critical_alpha(a.system, SubsetSpec::whole(), a.phi, Cover(a.system, 1), options()).value;
    double pb = critical_alpha(a.system, SubsetSpec::whole(), psi, Cover(a.system, 1), options()).value;
    worst = std::max(worst, std::abs(pa - pb) - sup_distance(a.system, a.phi, psi));
  }
  o.require(worst <= 2 * kTol, "cover excess", worst);
  return o;
}

Outcome c10() {
  Outcome o;
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    Random inst = random_instance(rng, 4, 1 + i % 2);
    for (int k : {2, 3}) {
      PowerCheck p = power_pressure_check(inst.system, inst.phi, k);
      worst = std::max(worst, std::abs(p.lhs - p.rhs));
    }
  }
  o.require(worst <= 1e-9, "max |P_f^k - kP_f|", worst);
  return o;
}

Outcome c11() {
  Outcome o;
  // slow spectral gaps need the longer budgets to settle inside 2 tol
  std::mt19937_64 rng(1101);
  double chain = -1e300, mono = -1e300, uni = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Random inst = random_instance(rng, 4, 1, 0.6);
    const ShiftSystem& s = inst.system;
    Cover cover(s, 2);
    auto w2 = s.admissible_words(2);
    auto w3 = s.admissible_words(3);
    SubsetSpec small = SubsetSpec::cylinders({w3.front()});
    SubsetSpec big = SubsetSpec::cylinders({Word{{w3.front()[0], w3.front()[1]}}});
    double ps = critical_alpha(s, small, inst.phi, cover, options(48)).value;
    double pb = critical_alpha(s, big, inst.phi, cover, options(48)).value;
    CapacityPair cs = capacity_pressures(s, small, inst.phi, cover, 96);
    CapacityPair cb = capacity_pressures(s, big, inst.phi, cover, 96);
    chain = std::max({chain, ps - cs.lower.value, cs.lower.value - cs.upper.value});
    mono = std::max({mono, ps - pb, cs.lower.value - cb.lower.value, cs.upper.value - cb.upper.value});
    double p1 = critical_alpha(s, SubsetSpec::cylinders({w2.front()}), inst.phi, cover, options(48)).value;
    double p2 = critical_alpha(s, SubsetSpec::cylinders({w2.back()}), inst.phi, cover, options(48)).value;
    double pu = critical_alpha(s, SubsetSpec::cylinders({w2.front(), w2.back()}), inst.phi, cover, options(48)).value;
    uni = std::max(uni, std::abs(pu - std::max(p1, p2)));
  }
  o.require(chain <= 2 * kTol, "chain excess", chain);
  o.require(mono <= 2 * kTol, "monotonicity excess", mono);
  o.require(uni <= 2 * kTol, "|P_union - max|", uni);
  return o;
}

Outcome c12() {
  Outcome o;
  ShiftSystem s = make_full_shift(2);
  SubsetSpec z = SubsetSpec::sub_shift({1, 1, 1, 0});
  Potential zero = Potential::zero(s);
  double p = critical_alpha(s, z, zero, Cover(s, 1), options()).value;
  CapacityPair c = capacity_pressures(s, z, zero, Cover(s, 1), 30);
  double spread = std::max({p, c.lower.value, c.upper.value}) - std::min({p, c.lower.value, c.upper.value});
  o.require(spread <= 2 * kTol, "spread of P, CP_lo, CP_up", spread);
  o.require(std::abs(p - oracle::golden_log()) <= 1e-3, "P-log(golden)", p - oracle::golden_log());
  return o;
}

Outcome c13() {
  Outcome o;
  TransferCheck t = compactification_transfer_check(CirclePotential::arccot(), CircleBudget{});
  double diff = std::abs(t.line.value - t.circle.value);
  o.require(diff <= t.combined_tolerance, "|line-circle|", diff);
  o.require(std::abs(t.line.value - kPi) <= 0.05, "line-pi", t.line.value - kPi);
  o.require(std::abs(t.circle.value - kPi) <= 0.05, "circle-pi", t.circle.value - kPi);
  return o;
}

Outcome c14() {
  Outcome o;
  GapCertificate g = gap_example();
  o.require(std::abs(g.gap - kPi / 2) <= 1e-9, "inventory gap - pi/2", g.gap - kPi / 2);
  o.require(std::abs(g.estimated_gap - kPi / 2) <= 1e-2, "estimated gap - pi/2", g.estimated_gap - kPi / 2);
  return o;
}

Outcome c15() {
  Outcome o;
  ShiftSystem s = make_full_shift(2);
  LocalEntropyResult le = local_entropy_check(s, bernoulli_measure(s, {1.0 / 3, 2.0 / 3}), 200, 2000, 1501, 0.05);
  o.require(le.fraction >= 0.9, "fraction within 0.05", le.fraction);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"C1 full 2-shift zero potential: capacity and critical pressures = log 2", 1, c1},
      {"C2 golden mean: upper capacity pressure at N_max=30", 1, c2},
      {"C3 full 2-shift phi=(0,log 2): cover pressure log 3, T(0), T(1)", 1, c3},
      {"C4 Gibbs identity on 50 random SFTs", 10, c4},
      {"C5 partial variational principle", 10, c5},
      {"C6 convexity and exact slope of T", 5, c6},
      {"C7 Legendre duality", 5, c7},
      {"C8 correlation entropies", 10, c8},
      {"C9 Lipschitz in the potential", 10, c9},
      {"C10 power corollary", 2, c10},
      {"C11 chain, monotonicity and union", 10, c11},
      {"C12 invariant sub-shift", 5, c12},
      {"C13 compactification transfer", 20, c13},
      {"C14 strict gap", 10, c14},
      {"C15 local entropy sampling", 10, c15},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %s [%s] (%.2fs of %.0fs)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                c.budget_seconds);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
