#include "cptherm/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "cptherm/compactify.hpp"
#include "cptherm/cp_pressure.hpp"
#include "cptherm/multifractal.hpp"
#include "cptherm/symbolic.hpp"
#include "cptherm/thermo.hpp"

namespace cpt {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfigError, path + ": " + what);
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) config_error(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) config_error(path + "." + key, "missing");
  return j.at(key);
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) config_error(path, "expected an integer");
  return j.get<int>();
}

double get_double(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) config_error(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) config_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_double(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> get_ints(const json& j, const std::string& path) {
  if (!j.is_array()) config_error(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_int(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<int>> get_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) config_error(path, "expected a nonempty array of rows");
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string rp = path + "[" + std::to_string(i) + "]";
    rows.push_back(get_ints(j[i], rp));
    if (rows.back().size() != j.size())
      config_error(rp, "matrix must be square (row has " + std::to_string(rows.back().size()) +
                           " entries, expected " + std::to_string(j.size()) + ")");
    for (int v : rows.back())
      if (v != 0 && v != 1) config_error(rp, "entries must be 0 or 1");
  }
  return rows;
}

std::vector<std::uint8_t> flatten(const std::vector<std::vector<int>>& rows) {
  std::vector<std::uint8_t> out;
  for (const auto& r : rows)
    for (int v : r) out.push_back(static_cast<std::uint8_t>(v));
  return out;
}

bool is_circle_name(const std::string& n) {
  return n == "arccot" || n == "quadratic" || n == "sine" || n == "scaled_sine";
}

// ---------------------------------------------------------------------------
// Resolution of a config into library objects.

ShiftSystem make_system(const SystemConfig& s) {
  Sidedness side = s.two_sided ? Sidedness::kTwoSided : Sidedness::kOneSided;
  if (s.kind == SystemConfig::Kind::kFullShift) return ShiftSystem::full_shift(s.k, side);
  return ShiftSystem::from_rows(s.matrix, side);
}

Potential make_potential(const ShiftSystem& system, const PotentialConfig& p) {
  if (p.name == "zero") return Potential::zero(system);
  if (p.name == "constant") return Potential::constant(system, p.value);
  if (!p.name.empty()) config_error("potential.name", "'" + p.name + "' is not a shift potential");
  return Potential(system, p.depth, p.table);
}

SubsetSpec make_subset(const SubsetConfig& z) {
  switch (z.kind) {
    case SubsetConfig::Kind::kWhole:
      return SubsetSpec::whole();
    case SubsetConfig::Kind::kSubShift:
      return SubsetSpec::sub_shift(flatten(z.matrix));
    case SubsetConfig::Kind::kCylinders: {
      std::vector<Word> words;
      for (const auto& w : z.words) words.push_back(Word{w});
      return SubsetSpec::cylinders(std::move(words), z.start);
    }
    case SubsetConfig::Kind::kOrigin:
      break;
  }
  config_error("subset.type", "'origin' applies to line_doubling only");
}

CirclePotential make_circle_potential(const PotentialConfig& p) {
  if (p.name.empty()) config_error("potential", "line_doubling needs a named potential");
  return CirclePotential::named(p.name, p.value);
}

CircleSubset make_circle_subset(const SubsetConfig& z) {
  if (z.kind == SubsetConfig::Kind::kWhole) return CircleSubset::kWhole;
  if (z.kind == SubsetConfig::Kind::kOrigin) return CircleSubset::kOrigin;
  config_error("subset.type", "line_doubling supports whole and origin only");
}

bool is_line(const ExperimentConfig& c) {
  return c.system.kind == SystemConfig::Kind::kLineDoubling;
}

// ---------------------------------------------------------------------------
// Checks.

CheckResult near(std::string name, double value, double reference, double tol, std::string oracle) {
  CheckResult c{std::move(name), value, reference, tol, std::move(oracle), false};
  c.pass = std::isfinite(value) && std::isfinite(reference) && std::abs(value - reference) <= tol;
  return c;
}

// value <= bound + tol
CheckResult at_most(std::string name, double value, double bound, double tol, std::string oracle) {
  CheckResult c{std::move(name), value, bound, tol, std::move(oracle), false};
  c.pass = !std::isnan(value) && !std::isnan(bound) && value <= bound + tol;
  return c;
}

// value >= bound - tol
CheckResult at_least(std::string name, double value, double bound, double tol, std::string oracle) {
  CheckResult c{std::move(name), value, bound, tol, std::move(oracle), false};
  c.pass = !std::isnan(value) && !std::isnan(bound) && value >= bound - tol;
  return c;
}

CheckResult estimate_only(std::string name, double value) {
  return CheckResult{std::move(name), value, value, 0.0, "estimate-only", std::isfinite(value)};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<int> resolve_depths(const BudgetConfig& b, int r) {
  if (b.depths.empty()) return {r};
  for (int d : b.depths)
    if (d < r) config_error("budget.depths", "cover depth " + std::to_string(d) +
                                                 " is below the potential depth " + std::to_string(r));
  return b.depths;
}

CriticalOptions critical_options(const BudgetConfig& b) {
  CriticalOptions o;
  o.tol = b.tol;
  o.n_max = b.n_max;
  o.cap_offset = b.cap_offset;
  return o;
}

CircleBudget circle_budget(const BudgetConfig& b) {
  CircleBudget c;
  c.arcs = b.arcs;
  c.cap_offset = b.cap_offset;
  return c;
}

// Classical pressure of the shift restricted to Z when Z is a whole system or
// an invariant sub-shift; NaN for cylinder unions.
double shift_oracle(const ShiftSystem& system, const Potential& phi, const SubsetSpec& z) {
  if (z.kind() == SubsetSpec::Kind::kWhole)
    return system.irreducible() ? transfer_pressure(system, phi) : transfer_pressure_any(system, phi);
  if (z.kind() == SubsetSpec::Kind::kSubShift) {
    std::vector<std::uint8_t> adj = z.sub_adjacency();
    for (std::size_t i = 0; i < adj.size(); ++i) adj[i] = adj[i] && system.adjacency()[i];
    bool any = std::any_of(adj.begin(), adj.end(), [](std::uint8_t v) { return v != 0; });
    if (!any) return -std::numeric_limits<double>::infinity();
    ShiftSystem sub(system.alphabet_size(), adj, system.sidedness());
    Potential restricted(sub, phi.depth(), phi.table(), phi.name());
    return transfer_pressure_any(sub, restricted);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Table diagnostics_table(const PressureEstimate& e) {
  Table t{"pressure_diagnostics.csv", {"N", "log_lambda", "slope"}, {}};
  for (const auto& row : e.diagnostics)
    if (std::isfinite(row.log_weight) && std::isfinite(row.slope))
      t.rows.push_back({static_cast<double>(row.n), row.log_weight, row.slope});
  return t;
}

// ---------------------------------------------------------------------------
// Tasks.

TaskReport task_pressure(const ExperimentConfig& c, int jobs) {
  TaskReport r;
  r.task = "pressure";
  const BudgetConfig& b = c.budget;
  if (is_line(c)) {
    CirclePotential phi = make_circle_potential(c.potential);
    CircleSubset z = make_circle_subset(c.subset);
    PressureEstimate e = circle_pressure(phi, CoverKind::kLine, z, circle_budget(b));
    double oracle = z == CircleSubset::kOrigin ? phi.at_origin()
                                               : std::max(phi.at_origin(), phi.at_infinity());
    r.checks.push_back(near("pressure", e.value, oracle, std::max(e.metrics["tolerance"], b.tol),
                            "max of the potential over invariant measures of the compactification"));
    r.tables.push_back(diagnostics_table(e));
    return r;
  }
  ShiftSystem system = make_system(c.system);
  Potential phi = make_potential(system, c.potential);
  SubsetSpec z = make_subset(c.subset);
  std::vector<int> depths = resolve_depths(b, phi.depth());
  RefinedPressure refined = pressure_refined(system, z, phi, depths, critical_options(b), jobs);
  const PressureEstimate& e = refined.estimate;
  for (const auto& row : refined.depths)
    r.checks.push_back(estimate_only("pressure[depth=" + std::to_string(row.depth) + "]", row.value));
  if (e.convergence_warning)
    r.notes.push_back("depth-to-depth change exceeds the oscillation bound");
  double oracle = shift_oracle(system, phi, z);
  if (e.degenerate) {
    r.notes.push_back("Z is empty; the pressure is -infinity");
    r.checks.push_back(CheckResult{"pressure", e.value, oracle, 0.0, "transfer-matrix pressure",
                                   std::isinf(oracle) && oracle < 0});
  } else if (std::isnan(oracle)) {
    r.checks.push_back(estimate_only("pressure", e.value));
  } else {
    r.checks.push_back(near("pressure", e.value, oracle, 2.0 * b.tol, "transfer-matrix pressure"));
  }
  CapacityPair cap = capacity_pressures(system, z, phi, Cover(system, depths.back()), b.n_max);
  r.tables.push_back(diagnostics_table(cap.upper));
  return r;
}

TaskReport task_capacity(const ExperimentConfig& c) {
  TaskReport r;
  r.task = "capacity";
  const BudgetConfig& b = c.budget;
  if (is_line(c)) {
    CirclePotential phi = make_circle_potential(c.potential);
    CircleSubset z = make_circle_subset(c.subset);
    PressureEstimate e = circle_capacity(phi, CoverKind::kLine, z, b.arcs, b.n_max);
    double oracle = z == CircleSubset::kOrigin ? phi.at_origin()
                                               : std::max(phi.at_origin(), phi.at_infinity());
    double tol = std::abs(e.metrics["regression"] - e.metrics["stolz"]) + e.metrics["cell_growth"] +
                 b.capacity_tol;
    r.checks.push_back(near("capacity", e.value, oracle, tol,
                            "max of the potential over invariant measures of the compactification"));
    r.tables.push_back(diagnostics_table(e));
    return r;
  }
  ShiftSystem system = make_system(c.system);
  Potential phi = make_potential(system, c.potential);
  SubsetSpec z = make_subset(c.subset);
  int depth = resolve_depths(b, phi.depth()).front();
  CapacityPair cap = capacity_pressures(system, z, phi, Cover(system, depth), b.n_max);
  double oracle = shift_oracle(system, phi, z);
  if (cap.upper.degenerate) {
    r.notes.push_back("Z is empty; capacities are -infinity");
    r.checks.push_back(CheckResult{"capacity", cap.upper.value, oracle, 0.0,
                                   "transfer-matrix pressure", true});
    return r;
  }
  r.checks.push_back(at_most("lower<=upper", cap.lower.value, cap.upper.value, 2.0 * b.tol,
                             "upper capacity pressure"));
  if (std::isnan(oracle)) {
    r.checks.push_back(estimate_only("lower_capacity", cap.lower.value));
    r.checks.push_back(estimate_only("upper_capacity", cap.upper.value));
  } else {
    r.checks.push_back(near("lower_capacity", cap.lower.value, oracle, b.capacity_tol,
                            "transfer-matrix pressure"));
    r.checks.push_back(near("upper_capacity", cap.upper.value, oracle, b.capacity_tol,
                            "transfer-matrix pressure"));
  }
  r.tables.push_back(diagnostics_table(cap.upper));
  return r;
}

std::vector<double> spectrum_grid(const BudgetConfig& b) {
  return b.q.empty() ? q_grid(-5.0, 5.0, 0.05) : b.q;
}

TaskReport task_spectrum(const ExperimentConfig& c) {
  TaskReport r;
  r.task = "spectrum";
  if (is_line(c)) config_error("system.type", "spectrum needs a shift system");
  ShiftSystem system = make_system(c.system);
  Potential phi = make_potential(system, c.potential);
  if (c.subset.kind != SubsetConfig::Kind::kWhole)
    r.notes.push_back("subset ignored: the spectrum is computed on the whole system");
  std::vector<double> q = spectrum_grid(c.budget);
  TQCurve curve = t_curve(system, phi, q);
  double h = transfer_pressure(system, Potential::zero(system));
  r.checks.push_back(near("T(0)=h", t_value(system, phi, 0.0), h, 1e-9, "topological entropy"));
  r.checks.push_back(near("T(1)=0", t_value(system, phi, 1.0), 0.0, 1e-9, "zero"));
  r.checks.push_back(at_least("convexity", curve.min_second_difference, 0.0, 1e-9,
                              "second differences nonnegative"));
  r.checks.push_back(at_most("alpha_nonincreasing", curve.alpha_increase, 0.0, 1e-9,
                             "alpha nonincreasing in q"));
  double alpha_min = *std::min_element(curve.alpha.begin(), curve.alpha.end());
  r.checks.push_back(at_least("T'<=0", alpha_min, 0.0, 1e-9, "alpha = -T' nonnegative"));
  r.checks.push_back(at_most("alpha_vs_central_difference",
                             alpha_difference_defect(system, phi, q, 1e-4), 0.0, 1e-6,
                             "central difference of T"));
  LegendreResult leg = legendre_check(curve);
  if (leg.skipped) r.notes.push_back("degenerate spectrum: Legendre check skipped");
  r.checks.push_back(at_most("legendre_defect", leg.defect(), 0.0, 1e-4, "Legendre transform of T"));
  Table t{"spectrum.csv", {"q", "T", "alpha", "E"}, {}};
  for (std::size_t i = 0; i < q.size(); ++i)
    t.rows.push_back({curve.q[i], curve.t[i], curve.alpha[i], curve.spectrum[i]});
  r.tables.push_back(std::move(t));
  return r;
}

std::vector<double> correlation_grid(const BudgetConfig& b) {
  std::vector<double> q = b.q.empty() ? std::vector<double>{0.5, 2.0, 3.0} : b.q;
  for (double v : q)
    if (v == 1.0) config_error("budget.q_grid", "must exclude q = 1 for correlation entropies");
  return q;
}

TaskReport task_correlation(const ExperimentConfig& c) {
  TaskReport r;
  r.task = "correlation";
  if (is_line(c)) config_error("system.type", "correlation needs a shift system");
  ShiftSystem system = make_system(c.system);
  Potential phi = make_potential(system, c.potential);
  std::vector<double> q = correlation_grid(c.budget);
  int n = c.budget.n > 0 ? c.budget.n : 20;
  CorrelationEntropyCurve curve = correlation_entropy(system, phi, q, n);
  const double tol = c.budget.correlation_tol;
  for (std::size_t i = 0; i < q.size(); ++i)
    r.checks.push_back(near("h(q=" + fmt(q[i]) + ")", curve.direct[i], curve.formula[i], tol,
                            "-T(q)/(q-1)"));
  double h_top = transfer_pressure(system, Potential::zero(system));
  r.checks.push_back(near("h(q=0)=h", t_value(system, phi, 0.0), h_top, 1e-9, "topological entropy"));
  r.checks.push_back(near("q->1 limit", curve.limit_value, curve.measure_entropy, tol,
                          "measure-theoretic entropy"));
  Table t{"correlation.csv", {"q", "h_formula", "h_direct"}, {}};
  for (std::size_t i = 0; i < q.size(); ++i) t.rows.push_back({q[i], curve.formula[i], curve.direct[i]});
  r.tables.push_back(std::move(t));
  return r;
}

TaskReport task_vp_check(const ExperimentConfig& c) {
  TaskReport r;
  r.task = "vp_check";
  if (is_line(c)) config_error("system.type", "vp_check needs a shift system");
  ShiftSystem system = make_system(c.system);
  Potential phi = make_potential(system, c.potential);
  EquilibriumState eq = equilibrium_markov(system, phi);
  r.checks.push_back(near("gibbs_identity", eq.entropy + eq.potential_integral, std::log(eq.eigenvalue),
                          1e-9, "log Perron eigenvalue"));
  r.checks.push_back(near("residual_at_equilibrium", vp_residual(system, phi, eq.measure), 0.0, 1e-9,
                          "zero"));
  std::mt19937_64 rng(c.seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < c.budget.samples; ++i) {
    MarkovMeasure mu = perturb_measure(eq.measure, rng, 1.0);
    worst = std::min(worst, vp_residual(system, phi, mu));
  }
  for (int a = 0; a < system.alphabet_size(); ++a)
    if (system.allowed(a, a)) worst = std::min(worst, vp_residual(system, phi, dirac_fixed_point(system, a)));
  r.checks.push_back(at_least("min_residual", worst, 0.0, 1e-9, "variational inequality"));
  return r;
}

TaskReport task_inverse_vp(const ExperimentConfig& c) {
  TaskReport r;
  r.task = "inverse_vp";
  if (is_line(c)) config_error("system.type", "inverse_vp needs a shift system");
  ShiftSystem system = make_system(c.system);
  Potential phi = make_potential(system, c.potential);
  int n = c.budget.n > 0 ? c.budget.n : 14;
  MarkovMeasure mu = c.budget.measure.empty() ? equilibrium_markov(system, phi).measure
                                              : bernoulli_measure(system, c.budget.measure);
  InverseVpProbe probe = inverse_vp_probe(system, phi, mu, n);
  r.checks.push_back(at_most("typical<=pressure", probe.value, probe.pressure, c.budget.tol,
                             "transfer-matrix pressure"));
  r.checks.push_back(at_least("typical>=free_energy", probe.value, probe.free_energy, c.budget.vp_slack,
                              "h_mu + integral of phi"));
  r.notes.push_back("typical words: " + std::to_string(probe.typical_words));
  return r;
}

TaskReport task_gap_example(const ExperimentConfig& c) {
  TaskReport r;
  r.task = "gap_example";
  GapCertificate g = gap_example(circle_budget(c.budget));
  r.checks.push_back(near("compactified_pressure", g.pressure_compactified, kPi, 1e-12,
                          "integral against the point mass at infinity"));
  r.checks.push_back(near("sup_over_line_measures", g.sup_over_line_measures, kPi / 2.0, 1e-12,
                          "potential at the origin"));
  r.checks.push_back(near("gap", g.gap, kPi / 2.0, 1e-12, "pi - pi/2"));
  r.checks.push_back(near("estimated_pressure", g.estimated_pressure, kPi, g.estimator_tolerance,
                          "invariant-measure inventory"));
  r.checks.push_back(near("estimated_gap", g.estimated_gap, kPi / 2.0, g.estimator_tolerance, "pi - pi/2"));
  r.checks.push_back(near("estimated_entropy", g.estimated_entropy, 0.0, g.estimator_tolerance,
                          "zero entropy of the compactified map"));
  std::vector<double> mass = pushforward_mass_decay(64, 60, 10.0, 0.25, c.seed);
  r.checks.push_back(near("escaping_mass", mass.back(), 0.25, 1e-9, "atom at the origin"));
  for (const auto& m : g.compact_inventory)
    r.notes.push_back("compactified inventory: " + m.name + " integral " + fmt(m.integral));
  for (const auto& m : g.line_inventory)
    r.notes.push_back("line inventory: " + m.name + " integral " + fmt(m.integral));
  return r;
}

TaskReport task_transfer_check(const ExperimentConfig& c) {
  TaskReport r;
  r.task = "transfer_check";
  if (!is_line(c)) config_error("system.type", "transfer_check needs line_doubling");
  CirclePotential phi = make_circle_potential(c.potential);
  TransferCheck t = compactification_transfer_check(phi, circle_budget(c.budget));
  double oracle = std::max(phi.at_origin(), phi.at_infinity());
  r.checks.push_back(near("line_vs_circle", t.line.value, t.circle.value, t.combined_tolerance,
                          "circle-cover estimate"));
  const char* inventory = "max of the potential over invariant measures of the compactification";
  r.checks.push_back(near("line_cover", t.line.value, oracle,
                          std::max(0.05, t.line.metrics["tolerance"]), inventory));
  r.checks.push_back(near("circle_cover", t.circle.value, oracle,
                          std::max(0.05, t.circle.metrics["tolerance"]), inventory));
  r.tables.push_back(diagnostics_table(t.line));
  return r;
}

// ---------------------------------------------------------------------------
// Property suite.

ShiftSystem random_irreducible(std::mt19937_64& rng, int max_dim) {
  std::uniform_int_distribution<int> dim(2, max_dim);
  std::bernoulli_distribution bit(0.55);
  int k = dim(rng);
  for (;;) {
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(k * k));
    for (auto& v : adj) v = bit(rng) ? 1 : 0;
    if (strongly_connected(k, adj)) return ShiftSystem(k, adj);
  }
}

Potential random_potential(const ShiftSystem& system, std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t size = 1;
  for (int i = 0; i < depth; ++i) size *= static_cast<std::size_t>(system.alphabet_size());
  std::vector<double> table(size);
  for (auto& v : table) v = u(rng);
  return Potential(system, depth, table);
}

ExperimentConfig preset(Task task, SystemConfig system, PotentialConfig potential,
                        const ExperimentConfig& base) {
  ExperimentConfig c;
  c.task = task;
  c.system = std::move(system);
  c.potential = std::move(potential);
  c.budget.tol = base.budget.tol;
  c.seed = base.seed;
  return c;
}

SystemConfig full_shift_config(int k) {
  SystemConfig s;
  s.kind = SystemConfig::Kind::kFullShift;
  s.k = k;
  return s;
}

SystemConfig golden_config() {
  SystemConfig s;
  s.kind = SystemConfig::Kind::kSft;
  s.matrix = {{1, 1}, {1, 0}};
  return s;
}

PotentialConfig table_potential(std::vector<double> table) {
  PotentialConfig p;
  p.depth = 1;
  p.table = std::move(table);
  return p;
}

PotentialConfig named_potential(std::string name) {
  PotentialConfig p;
  p.name = std::move(name);
  return p;
}

TaskReport property_gibbs(std::uint64_t seed) {
  TaskReport r;
  r.task = "property:gibbs_identity";
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    ShiftSystem system = random_irreducible(rng, 6);
    Potential phi = random_potential(system, rng, 1 + i % 2);
    EquilibriumState eq = equilibrium_markov(system, phi);
    worst = std::max(worst, std::abs(std::log(eq.eigenvalue) - eq.entropy - eq.potential_integral));
  }
  r.checks.push_back(at_most("max_gibbs_defect", worst, 0.0, 1e-9, "log Perron eigenvalue"));
  return r;
}

TaskReport property_lipschitz(std::uint64_t seed, double tol) {
  TaskReport r;
  r.task = "property:lipschitz";
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    ShiftSystem system = random_irreducible(rng, 5);
    Potential phi = random_potential(system, rng, 1);
    Potential psi = random_potential(system, rng, 1);
    double gap = std::abs(transfer_pressure(system, phi) - transfer_pressure(system, psi));
    worst = std::max(worst, gap - sup_distance(system, phi, psi));
  }
  r.checks.push_back(at_most("oracle_excess", worst, 0.0, 1e-9, "sup distance of the potentials"));
  worst = -std::numeric_limits<double>::infinity();
  CriticalOptions opts;
  opts.tol = tol;
  for (int i = 0; i < 4; ++i) {
    ShiftSystem system = random_irreducible(rng, 3);
    Potential phi = random_potential(system, rng, 1);
    Potential psi = random_potential(system, rng, 1);
    Cover cover(system, 1);
    double a = critical_alpha(system, SubsetSpec::whole(), phi, cover, opts).value;
    double b = critical_alpha(system, SubsetSpec::whole(), psi, cover, opts).value;
    worst = std::max(worst, std::abs(a - b) - sup_distance(system, phi, psi));
  }
  r.checks.push_back(at_most("cover_excess", worst, 0.0, 2.0 * tol, "sup distance of the potentials"));
  return r;
}

TaskReport property_power(std::uint64_t seed) {
  TaskReport r;
  r.task = "property:power";
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    ShiftSystem system = random_irreducible(rng, 4);
    Potential phi = random_potential(system, rng, 1 + i % 2);
    for (int k : {2, 3}) {
      PowerCheck p = power_pressure_check(system, phi, k);
      worst = std::max(worst, std::abs(p.lhs - p.rhs));
    }
  }
  r.checks.push_back(at_most("max_power_defect", worst, 0.0, 1e-9, "k times the pressure"));
  return r;
}

TaskReport property_chain(std::uint64_t seed, double tol) {
  TaskReport r;
  r.task = "property:chain";
  std::mt19937_64 rng(seed);
  ShiftSystem system = ShiftSystem::full_shift(2);
  Potential phi = random_potential(system, rng, 1);
  Cover cover(system, 2);
  CriticalOptions opts;
  opts.tol = tol;
  SubsetSpec z00 = SubsetSpec::cylinders({Word{{0, 0}}});
  SubsetSpec z0 = SubsetSpec::cylinders({Word{{0}}});
  SubsetSpec z11 = SubsetSpec::cylinders({Word{{1, 1}}});
  SubsetSpec both = SubsetSpec::cylinders({Word{{0, 0}}, Word{{1, 1}}});
  double p00 = critical_alpha(system, z00, phi, cover, opts).value;
  double p0 = critical_alpha(system, z0, phi, cover, opts).value;
  double p11 = critical_alpha(system, z11, phi, cover, opts).value;
  double pu = critical_alpha(system, both, phi, cover, opts).value;
  CapacityPair cap = capacity_pressures(system, z00, phi, cover, 30);
  r.checks.push_back(at_most("P<=CP_lower", p00, cap.lower.value, 2.0 * tol, "lower capacity"));
  r.checks.push_back(at_most("CP_lower<=CP_upper", cap.lower.value, cap.upper.value, 2.0 * tol,
                             "upper capacity"));
  r.checks.push_back(at_most("monotone", p00, p0, 2.0 * tol, "pressure of the larger set"));
  r.checks.push_back(near("union", pu, std::max(p00, p11), 2.0 * tol, "max over the pieces"));
  return r;
}

TaskReport property_invariant_subset(double tol) {
  TaskReport r;
  r.task = "property:invariant_subset";
  ShiftSystem system = ShiftSystem::full_shift(2);
  Potential phi = Potential::zero(system);
  SubsetSpec z = SubsetSpec::sub_shift({1, 1, 1, 0});
  Cover cover(system, 1);
  CriticalOptions opts;
  opts.tol = tol;
  double p = critical_alpha(system, z, phi, cover, opts).value;
  CapacityPair cap = capacity_pressures(system, z, phi, cover, 30);
  double golden = std::log((1.0 + std::sqrt(5.0)) / 2.0);
  r.checks.push_back(near("P_vs_CP_lower", p, cap.lower.value, 2.0 * tol, "lower capacity"));
  r.checks.push_back(near("P_vs_CP_upper", p, cap.upper.value, 2.0 * tol, "upper capacity"));
  r.checks.push_back(near("P_vs_golden", p, golden, 1e-3, "log golden ratio"));
  return r;
}

TaskReport property_local_entropy(std::uint64_t seed) {
  TaskReport r;
  r.task = "property:local_entropy";
  ShiftSystem system = ShiftSystem::full_shift(2);
  MarkovMeasure mu = bernoulli_measure(system, {1.0 / 3.0, 2.0 / 3.0});
  LocalEntropyResult le = local_entropy_check(system, mu, 200, 2000, seed, 0.05);
  r.checks.push_back(at_least("fraction_within_0.05", le.fraction, 0.9, 0.0, "90% of samples"));
  return r;
}

TaskReport property_lebesgue(std::uint64_t seed) {
  TaskReport r;
  r.task = "property:lebesgue";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(u(rng) * 5);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = u(rng);
    FiniteMetricModel m;
    m.distance.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.distance[i][j] = std::abs(x[i] - x[j]);
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[i] = i;
    m.compact_sets = {all};
    for (int i = 0; i < n; ++i) m.cover.push_back({i, (i + 1) % n});
    m.admissible.assign(m.cover.size(), true);
    double delta = lebesgue_number(m);
    // every open delta-ball sits inside some element
    for (int i = 0; i < n; ++i) {
      std::set<int> ball;
      for (int j = 0; j < n; ++j)
        if (m.distance[i][j] < delta) ball.insert(j);
      bool inside = false;
      for (const auto& e : m.cover)
        inside = inside || std::all_of(ball.begin(), ball.end(), [&](int p) {
                   return std::find(e.begin(), e.end(), p) != e.end();
                 });
      if (!inside || !(delta > 0.0)) ++failures;
    }
  }
  r.checks.push_back(near("ball_containment_failures", failures, 0.0, 0.0, "zero"));
  return r;
}

// ---------------------------------------------------------------------------

TaskReport dispatch(Task task, const ExperimentConfig& c, int jobs) {
  switch (task) {
    case Task::kPressure: return task_pressure(c, jobs);
    case Task::kCapacity: return task_capacity(c);
    case Task::kSpectrum: return task_spectrum(c);
    case Task::kCorrelation: return task_correlation(c);
    case Task::kVpCheck: return task_vp_check(c);
    case Task::kInverseVp: return task_inverse_vp(c);
    case Task::kGapExample: return task_gap_example(c);
    case Task::kTransferCheck: return task_transfer_check(c);
    case Task::kPropertySuite: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "property_suite is not a single task");
}

TaskReport timed(const std::string& name, const std::function<TaskReport()>& body) {
  auto start = std::chrono::steady_clock::now();
  TaskReport r;
  try {
    r = body();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw Error(e.code(), "task " + name + ": " + e.what());
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// Runs the bodies on at most `jobs` threads; results keep the input order and
// the first failure (by index) is rethrown after all workers finish.
std::vector<TaskReport> run_pool(const std::vector<std::pair<std::string, std::function<TaskReport()>>>& work,
                                 int jobs) {
  std::vector<TaskReport> out(work.size());
  std::vector<std::exception_ptr> errors(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        out[i] = timed(work[i].first, work[i].second);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, work.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<std::pair<std::string, std::function<TaskReport()>>> suite_work(const ExperimentConfig& base) {
  const double tol = base.budget.tol;
  const std::uint64_t seed = base.seed;
  std::vector<std::pair<std::string, std::function<TaskReport()>>> work;
  auto add_task = [&](Task task, ExperimentConfig c) {
    std::string name = to_string(task);
    work.emplace_back(name, [task, c] { return dispatch(task, c, 1); });
  };
  const double log2 = std::log(2.0);
  add_task(Task::kPressure, preset(Task::kPressure, full_shift_config(2), named_potential("zero"), base));
  {
    ExperimentConfig c = preset(Task::kCapacity, golden_config(), named_potential("zero"), base);
    c.budget.n_max = 30;
    add_task(Task::kCapacity, c);
  }
  add_task(Task::kPressure, preset(Task::kPressure, full_shift_config(2), table_potential({0.0, log2}), base));
  add_task(Task::kSpectrum, preset(Task::kSpectrum, full_shift_config(2), table_potential({0.0, log2}), base));
  add_task(Task::kCorrelation,
           preset(Task::kCorrelation, full_shift_config(2), table_potential({0.0, log2}), base));
  add_task(Task::kVpCheck, preset(Task::kVpCheck, golden_config(), table_potential({0.3, -0.7}), base));
  add_task(Task::kInverseVp, preset(Task::kInverseVp, full_shift_config(2), table_potential({0.0, log2}), base));
  {
    ExperimentConfig c = preset(Task::kTransferCheck, {}, named_potential("arccot"), base);
    c.system.kind = SystemConfig::Kind::kLineDoubling;
    add_task(Task::kTransferCheck, c);
  }
  add_task(Task::kGapExample, preset(Task::kGapExample, {}, {}, base));
  work.emplace_back("property:gibbs_identity", [seed] { return property_gibbs(seed + 1); });
  work.emplace_back("property:lipschitz", [seed, tol] { return property_lipschitz(seed + 2, tol); });
  work.emplace_back("property:power", [seed] { return property_power(seed + 3); });
  work.emplace_back("property:chain", [seed, tol] { return property_chain(seed + 4, tol); });
  work.emplace_back("property:invariant_subset", [tol] { return property_invariant_subset(tol); });
  work.emplace_back("property:local_entropy", [seed] { return property_local_entropy(seed + 5); });
  work.emplace_back("property:lebesgue", [seed] { return property_lebesgue(seed + 6); });
  return work;
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

ojson json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

Task parse_task(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '-', '_');
  static const std::map<std::string, Task> names = {
      {"pressure", Task::kPressure},           {"capacity", Task::kCapacity},
      {"spectrum", Task::kSpectrum},           {"correlation", Task::kCorrelation},
      {"vp_check", Task::kVpCheck},            {"inverse_vp", Task::kInverseVp},
      {"gap_example", Task::kGapExample},      {"transfer_check", Task::kTransferCheck},
      {"property_suite", Task::kPropertySuite}, {"suite", Task::kPropertySuite},
  };
  auto it = names.find(n);
  if (it == names.end()) config_error("task", "unknown task '" + name + "'");
  return it->second;
}

std::string to_string(Task task) {
  switch (task) {
    case Task::kPressure: return "pressure";
    case Task::kCapacity: return "capacity";
    case Task::kSpectrum: return "spectrum";
    case Task::kCorrelation: return "correlation";
    case Task::kVpCheck: return "vp_check";
    case Task::kInverseVp: return "inverse_vp";
    case Task::kGapExample: return "gap_example";
    case Task::kTransferCheck: return "transfer_check";
    case Task::kPropertySuite: return "property_suite";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error("config", std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) config_error("config", "expected an object");
  reject_unknown(root, "", {"system", "potential", "subset", "task", "budget", "output", "seed"});

  ExperimentConfig c;

  if (root.contains("system")) {
    const json& s = root["system"];
    if (!s.is_object()) config_error("system", "expected an object");
    reject_unknown(s, "system", {"type", "k", "matrix", "two_sided"});
    std::string type = get_string(require(s, "system", "type"), "system.type");
    if (s.contains("two_sided")) {
      if (!s["two_sided"].is_boolean()) config_error("system.two_sided", "expected a boolean");
      c.system.two_sided = s["two_sided"].get<bool>();
    }
    if (type == "full_shift") {
      c.system.kind = SystemConfig::Kind::kFullShift;
      c.system.k = get_int(require(s, "system", "k"), "system.k");
      if (c.system.k < 1) config_error("system.k", "must be positive");
    } else if (type == "sft") {
      c.system.kind = SystemConfig::Kind::kSft;
      c.system.matrix = get_matrix(require(s, "system", "matrix"), "system.matrix");
      c.system.k = static_cast<int>(c.system.matrix.size());
    } else if (type == "line_doubling") {
      c.system.kind = SystemConfig::Kind::kLineDoubling;
    } else {
      config_error("system.type", "expected full_shift, sft or line_doubling");
    }
  }

  if (root.contains("potential")) {
    const json& p = root["potential"];
    if (!p.is_object()) config_error("potential", "expected an object");
    reject_unknown(p, "potential", {"name", "value", "depth", "table", "weights"});
    if (p.contains("name")) {
      c.potential.name = get_string(p["name"], "potential.name");
      if (p.contains("value")) c.potential.value = get_double(p["value"], "potential.value");
      const std::string& n = c.potential.name;
      if (n != "zero" && n != "constant" && !is_circle_name(n))
        config_error("potential.name", "unknown potential '" + n + "'");
    } else {
      if (p.contains("table") == p.contains("weights"))
        config_error("potential", "give exactly one of name, table or weights");
      c.potential.depth = p.contains("depth") ? get_int(p["depth"], "potential.depth") : 1;
      if (c.potential.depth < 1) config_error("potential.depth", "must be positive");
      if (p.contains("table")) {
        c.potential.table = get_doubles(p["table"], "potential.table");
      } else {
        for (double w : get_doubles(p["weights"], "potential.weights")) {
          if (!(w > 0.0)) config_error("potential.weights", "weights must be positive");
          c.potential.table.push_back(std::log(w));
        }
      }
    }
  } else {
    c.potential.name = is_line(c) ? "arccot" : "zero";
  }

  if (root.contains("subset")) {
    const json& z = root["subset"];
    if (!z.is_object()) config_error("subset", "expected an object");
    reject_unknown(z, "subset", {"type", "matrix", "words", "start"});
    std::string type = get_string(require(z, "subset", "type"), "subset.type");
    if (type == "whole") {
      c.subset.kind = SubsetConfig::Kind::kWhole;
    } else if (type == "sub_shift") {
      c.subset.kind = SubsetConfig::Kind::kSubShift;
      c.subset.matrix = get_matrix(require(z, "subset", "matrix"), "subset.matrix");
    } else if (type == "cylinders") {
      c.subset.kind = SubsetConfig::Kind::kCylinders;
      const json& w = require(z, "subset", "words");
      if (!w.is_array() || w.empty()) config_error("subset.words", "expected a nonempty array of words");
      for (std::size_t i = 0; i < w.size(); ++i)
        c.subset.words.push_back(get_ints(w[i], "subset.words[" + std::to_string(i) + "]"));
      if (z.contains("start")) c.subset.start = get_int(z["start"], "subset.start");
    } else if (type == "origin") {
      c.subset.kind = SubsetConfig::Kind::kOrigin;
    } else {
      config_error("subset.type", "expected whole, sub_shift, cylinders or origin");
    }
  }

  if (root.contains("task")) c.task = parse_task(get_string(root["task"], "task"));

  if (root.contains("budget")) {
    const json& b = root["budget"];
    if (!b.is_object()) config_error("budget", "expected an object");
    reject_unknown(b, "budget", {"depths", "n_max", "tol", "cap_offset", "q_grid", "n", "samples", "arcs",
                                 "capacity_tol", "correlation_tol", "vp_slack", "measure"});
    BudgetConfig& bc = c.budget;
    auto positive_int = [&](const char* key, int& field, int minimum) {
      if (!b.contains(key)) return;
      field = get_int(b[key], std::string("budget.") + key);
      if (field < minimum)
        config_error(std::string("budget.") + key, "must be at least " + std::to_string(minimum));
    };
    auto positive_double = [&](const char* key, double& field) {
      if (!b.contains(key)) return;
      field = get_double(b[key], std::string("budget.") + key);
      if (!(field > 0.0)) config_error(std::string("budget.") + key, "must be positive");
    };
    if (b.contains("depths")) {
      bc.depths = get_ints(b["depths"], "budget.depths");
      for (int d : bc.depths)
        if (d < 1) config_error("budget.depths", "depths must be positive");
    }
    positive_int("n_max", bc.n_max, 2);
    positive_int("cap_offset", bc.cap_offset, 0);
    positive_int("n", bc.n, 1);
    positive_int("samples", bc.samples, 1);
    positive_int("arcs", bc.arcs, 4);
    positive_double("tol", bc.tol);
    positive_double("capacity_tol", bc.capacity_tol);
    positive_double("correlation_tol", bc.correlation_tol);
    positive_double("vp_slack", bc.vp_slack);
    if (b.contains("measure")) {
      bc.measure = get_doubles(b["measure"], "budget.measure");
      double sum = 0.0;
      for (double v : bc.measure) {
        if (v < 0.0) config_error("budget.measure", "probabilities must be nonnegative");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) config_error("budget.measure", "probabilities must sum to 1");
    }
    if (b.contains("q_grid")) {
      const json& q = b["q_grid"];
      if (q.is_array()) {
        bc.q = get_doubles(q, "budget.q_grid");
      } else if (q.is_object()) {
        reject_unknown(q, "budget.q_grid", {"lo", "hi", "step"});
        double lo = get_double(require(q, "budget.q_grid", "lo"), "budget.q_grid.lo");
        double hi = get_double(require(q, "budget.q_grid", "hi"), "budget.q_grid.hi");
        double step = get_double(require(q, "budget.q_grid", "step"), "budget.q_grid.step");
        if (!(step > 0.0) || !(hi > lo)) config_error("budget.q_grid", "need lo < hi and step > 0");
        bc.q = q_grid(lo, hi, step);
      } else {
        config_error("budget.q_grid", "expected an array or {lo, hi, step}");
      }
      if (bc.q.empty()) config_error("budget.q_grid", "must not be empty");
      for (std::size_t i = 1; i < bc.q.size(); ++i)
        if (!(bc.q[i] > bc.q[i - 1])) config_error("budget.q_grid", "must be strictly increasing");
    }
  }

  if (root.contains("output")) c.output = get_string(root["output"], "output");
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) config_error("seed", "expected a nonnegative integer");
    c.seed = root["seed"].get<std::uint64_t>();
  }

  // Cross-field validation against the constructed objects.
  if (c.task == Task::kCorrelation) correlation_grid(c.budget);
  if (is_line(c)) {
    if (!c.potential.name.empty() && !is_circle_name(c.potential.name) && c.potential.name != "zero" &&
        c.potential.name != "constant")
      config_error("potential.name", "not a line_doubling potential");
    if (c.potential.name.empty()) config_error("potential", "line_doubling needs a named potential");
    if (c.subset.kind != SubsetConfig::Kind::kWhole && c.subset.kind != SubsetConfig::Kind::kOrigin)
      config_error("subset.type", "line_doubling supports whole and origin only");
    return c;
  }
  if (is_circle_name(c.potential.name))
    config_error("potential.name", "'" + c.potential.name + "' needs system type line_doubling");
  std::optional<ShiftSystem> system;
  try {
    system.emplace(make_system(c.system));
  } catch (const Error& e) {
    config_error(c.system.kind == SystemConfig::Kind::kSft ? "system.matrix" : "system", e.what());
  }
  if (c.potential.name.empty()) {
    std::size_t expected = 1;
    for (int i = 0; i < c.potential.depth; ++i) expected *= static_cast<std::size_t>(system->alphabet_size());
    if (c.potential.table.size() != expected)
      config_error("potential.table", "expected " + std::to_string(expected) + " entries (k^depth), got " +
                                          std::to_string(c.potential.table.size()));
    try {
      make_potential(*system, c.potential);
    } catch (const Error& e) {
      config_error("potential", e.what());
    }
  }
  if (c.subset.kind == SubsetConfig::Kind::kOrigin)
    config_error("subset.type", "'origin' applies to line_doubling only");
  if (c.subset.kind == SubsetConfig::Kind::kSubShift &&
      static_cast<int>(c.subset.matrix.size()) != system->alphabet_size())
    config_error("subset.matrix", "size must match the alphabet");
  try {
    make_subset(c.subset).validate(*system);
  } catch (const Error& e) {
    config_error("subset", e.what());
  }
  if (!c.budget.measure.empty() && static_cast<int>(c.budget.measure.size()) != system->alphabet_size())
    config_error("budget.measure", "needs one probability per symbol");
  if (!c.budget.depths.empty()) {
    int r = c.potential.name.empty() ? c.potential.depth : 1;
    resolve_depths(c.budget, r);
  }
  return c;
}

bool TaskReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

bool RunReport::all_pass() const {
  return std::all_of(tasks.begin(), tasks.end(), [](const TaskReport& t) { return t.pass(); });
}

RunReport run(const ExperimentConfig& config, int jobs) {
  RunReport report;
  report.seed = config.seed;
  Task task = config.task.value_or(Task::kPropertySuite);
  if (task == Task::kPropertySuite) {
    report.tasks = run_pool(suite_work(config), jobs);
    return report;
  }
  if (task == Task::kCorrelation) correlation_grid(config.budget);
  std::string name = to_string(task);
  report.tasks.push_back(timed(name, [&] { return dispatch(task, config, jobs); }));
  return report;
}

void emit_tables(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());

  // Every table kind gets a file, header-only when the report has no rows.
  std::map<std::string, std::vector<std::string>> headers = {
      {"pressure_diagnostics.csv", {"N", "log_lambda", "slope"}},
      {"spectrum.csv", {"q", "T", "alpha", "E"}},
      {"correlation.csv", {"q", "h_formula", "h_direct"}},
  };
  std::map<std::string, std::vector<const Table*>> by_file;
  for (const auto& t : report.tasks)
    for (const auto& table : t.tables) {
      headers.emplace(table.file, table.header);
      by_file[table.file].push_back(&table);
    }

  auto write = [&](const std::string& name, const std::string& body) {
    fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out << body;
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  };

  for (const auto& [file, header] : headers) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const Table* table : by_file[file])
      for (const auto& row : table->rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_number(row[i]);
        os << '\n';
      }
    write(file, os.str());
  }
  write("summary.json", summary_json(report));
}

std::string summary_json(const RunReport& report) {
  ojson root;
  root["all_pass"] = report.all_pass();
  root["seed"] = report.seed;
  ojson tasks = ojson::array();
  for (const auto& t : report.tasks) {
    ojson jt;
    jt["task"] = t.task;
    jt["pass"] = t.pass();
    ojson checks = ojson::array();
    for (const auto& c : t.checks) {
      ojson jc;
      jc["name"] = c.name;
      jc["value"] = json_number(c.value);
      jc["reference"] = json_number(c.reference);
      jc["tolerance"] = json_number(c.tolerance);
      jc["oracle"] = c.oracle;
      jc["pass"] = c.pass;
      checks.push_back(std::move(jc));
    }
    jt["checks"] = std::move(checks);
    jt["notes"] = t.notes;
    tasks.push_back(std::move(jt));
  }
  root["tasks"] = std::move(tasks);
  return root.dump(2) + "\n";
}

}  // namespace cpt
