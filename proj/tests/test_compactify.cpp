#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "cptherm/compactify.hpp"

using namespace cpt;

namespace {

constexpr double kPi = std::numbers::pi;

// Largest delta, among the pairwise distances, for which every open
// delta-ball lies in some cover element.
double brute_lebesgue(const FiniteMetricModel& m) {
  const int n = m.size();
  auto works = [&](double delta) {
    for (int x = 0; x < n; ++x) {
      bool inside = false;
      for (const auto& e : m.cover) {
        bool all = true;
        for (int y = 0; y < n && all; ++y)
          if (m.distance[x][y] < delta) all = std::find(e.begin(), e.end(), y) != e.end();
        inside = inside || all;
      }
      if (!inside) return false;
    }
    return true;
  };
  std::set<double> candidates;
  for (const auto& row : m.distance)
    for (double d : row)
      if (d > 0) candidates.insert(d);
  double best = 0.0;
  for (double d : candidates)
    if (works(d)) best = d;
  return best;
}

FiniteMetricModel random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 7);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const int n = size(rng);
  std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = {coord(rng), coord(rng)};
  FiniteMetricModel m;
  m.distance.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m.distance[i][j] = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
  // compact sets: a random subset closed under nothing in particular
  std::vector<int> compact;
  for (int i = 0; i < n; ++i)
    if (coin(rng)) compact.push_back(i);
  m.compact_sets = {compact};
  // admissible elements: random subsets that are compact or co-compact
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (std::find(compact.begin(), compact.end(), i) == compact.end()) rest.push_back(i);
  std::set<int> covered;
  while (static_cast<int>(covered.size()) < n) {
    std::vector<int> e;
    if (coin(rng)) {
      for (int p : compact)
        if (coin(rng)) e.push_back(p);
    } else {
      e = rest;
      for (int p : compact)
        if (coin(rng)) e.push_back(p);
      // the complement is a subset of `compact`, hence compact
    }
    if (e.empty()) continue;
    covered.insert(e.begin(), e.end());
    m.cover.push_back(e);
  }
  m.admissible.assign(m.cover.size(), true);
  return m;
}

}  // namespace

TEST_CASE("line doubling model") {
  CHECK(LineDoublingModel::map(1.5) == 3.0);
  auto [a, b] = LineDoublingModel::preimage(-2.0, 4.0);
  CHECK(a == -1.0);
  CHECK(b == 2.0);
  CHECK(LineDoublingModel::potential(0.0) == doctest::Approx(kPi / 2));
  // arccot with range (0, pi): arccot(x) = pi/2 - atan(x)
  auto arccot = [](double x) { return kPi / 2 - std::atan(x); };
  for (double x : {-50.0, -3.0, -0.5}) CHECK(LineDoublingModel::potential(x) == doctest::Approx(arccot(x)));
  for (double x : {0.0, 0.5, 3.0, 50.0}) CHECK(LineDoublingModel::potential(x) == doctest::Approx(arccot(-x)));
  for (double x : {-1e6, -1.0, 0.0, 2.0, 1e6}) {
    double v = LineDoublingModel::potential(x);
    CHECK(v >= kPi / 2);
    CHECK(v < kPi);
  }
  CHECK(LineDoublingModel::extended_potential(kPi) == doctest::Approx(kPi));
  CHECK(LineDoublingModel::extended_potential(-kPi) == doctest::Approx(kPi));
  // continuity at infinity
  CHECK(LineDoublingModel::potential(1e9) == doctest::Approx(kPi).epsilon(1e-8));
  auto fixed = LineDoublingModel::compactified_fixed_points();
  CHECK(fixed.size() == 2);
  for (double t : fixed) CHECK(LineDoublingModel::circle_map(t) == t);
}

TEST_CASE("circle chart conjugates the doubling map") {
  for (double x : {-7.0, -1.0, -0.1, 0.3, 2.0, 11.0}) {
    double theta = LineDoublingModel::angle(x);
    CHECK(LineDoublingModel::line_point(theta) == doctest::Approx(x));
    CHECK(LineDoublingModel::circle_map(theta) == doctest::Approx(LineDoublingModel::angle(2 * x)));
    CHECK(LineDoublingModel::circle_preimage(LineDoublingModel::circle_map(theta)) == doctest::Approx(theta));
    CHECK(LineDoublingModel::extended_potential(theta) == doctest::Approx(LineDoublingModel::potential(x)));
  }
  // north-south: orbits leave 0 and approach pi
  double t = 0.01;
  for (int i = 0; i < 60; ++i) t = LineDoublingModel::circle_map(t);
  CHECK(t == doctest::Approx(kPi).epsilon(1e-9));
}

TEST_CASE("circle potentials") {
  CHECK(CirclePotential::arccot().at_origin() == doctest::Approx(kPi / 2));
  CHECK(CirclePotential::arccot().at_infinity() == doctest::Approx(kPi));
  CHECK(CirclePotential::named("sine").at_infinity() == doctest::Approx(2.0));
  CHECK(CirclePotential::named("constant", 0.4)(1.0) == 0.4);
  CHECK(CirclePotential::named("zero").name() == "constant");
  CHECK_THROWS_AS(CirclePotential::named("bogus"), Error);
  for (const char* name : {"arccot", "quadratic", "sine", "scaled_sine"}) {
    CirclePotential phi = CirclePotential::named(name);
    double prev = -1e300;
    for (double a = 0.0; a <= kPi; a += 0.01) {
      CHECK(phi(a) >= prev - 1e-15);
      CHECK(phi(a) == doctest::Approx(phi(-a)));
      prev = phi(a);
    }
  }
}

TEST_CASE("arc covers and admissibility") {
  auto circle = arc_cover(CoverKind::kCircle, 64);
  CHECK(circle.size() == 64);
  auto line = arc_cover(CoverKind::kLine, 64);
  CHECK(line.size() == 63);
  int tails = 0;
  for (const auto& a : line) {
    CHECK(a.admissible == admissible_on_line(a));
    CHECK(a.admissible);
    tails += a.wraps ? 1 : 0;
  }
  CHECK(tails == 1);
  // arcs touching infinity are not admissible for the line
  CHECK_FALSE(admissible_on_line(circle.front()));
  CHECK_FALSE(admissible_on_line(circle.back()));
  CHECK(admissible_on_line(circle[10]));
  CHECK_THROWS_AS(arc_cover(CoverKind::kLine, 3), Error);
}

TEST_CASE("property: generated line covers pass the independent predicate") {
  for (int arcs = 4; arcs <= 128; arcs += 2) {
    for (const auto& a : arc_cover(CoverKind::kLine, arcs)) CHECK(admissible_on_line(a));
    // the cover reaches every angle
    auto cover = arc_cover(CoverKind::kLine, arcs);
    for (double t = -kPi; t <= kPi; t += 0.013) {
      bool hit = false;
      for (const auto& a : cover) hit = hit || (a.wraps ? (t >= a.lo || t <= a.hi) : (t >= a.lo && t <= a.hi));
      CHECK(hit);
    }
  }
}

TEST_CASE("pressure transfer to the compactification") {
  CircleBudget budget;
  TransferCheck arccot = compactification_transfer_check(CirclePotential::arccot(), budget);
  CHECK(arccot.agree);
  CHECK(std::abs(arccot.line.value - arccot.circle.value) <= arccot.combined_tolerance);
  CHECK(std::abs(arccot.line.value - kPi) <= 0.05);
  CHECK(std::abs(arccot.circle.value - kPi) <= 0.05);
  for (const char* name : {"quadratic", "sine", "scaled_sine"}) {
    CirclePotential phi = CirclePotential::named(name);
    TransferCheck t = compactification_transfer_check(phi, budget);
    CHECK(std::abs(t.line.value - t.circle.value) <= t.combined_tolerance);
    CHECK(std::abs(t.line.value - phi.at_infinity()) <= 0.05);
  }
  TransferCheck c = compactification_transfer_check(CirclePotential::constant(0.8), budget);
  CHECK(std::abs(c.line.value - 0.8) <= std::max(0.05, c.line.metrics.at("tolerance")));
  CHECK(std::abs(c.circle.value - 0.8) <= std::max(0.05, c.circle.metrics.at("tolerance")));
  PressureEstimate origin = circle_pressure(CirclePotential::arccot(), CoverKind::kLine, CircleSubset::kOrigin, budget);
  CHECK(std::abs(origin.value - kPi / 2) <= std::max(budget.tol, origin.metrics.at("tolerance")));
}

TEST_CASE("invariant measures and the strict gap") {
  auto line = invariant_measures(false);
  REQUIRE(line.size() == 1);
  CHECK(line[0].integral == doctest::Approx(kPi / 2));
  auto circle = invariant_measures(true);
  REQUIRE(circle.size() == 2);
  CHECK(circle[1].integral == doctest::Approx(kPi));
  for (const auto& m : circle) CHECK(m.entropy == 0.0);

  GapCertificate g = gap_example();
  CHECK(std::abs(g.gap - kPi / 2) <= 1e-9);
  CHECK(std::abs(g.pressure_compactified - kPi) <= 1e-12);
  CHECK(std::abs(g.sup_over_line_measures - kPi / 2) <= 1e-12);
  CHECK(g.pressure_compactified >= g.sup_over_line_measures);
  CHECK(std::abs(g.estimated_gap - kPi / 2) <= 1e-2);
  CHECK(std::abs(g.estimated_pressure - kPi) <= 1e-2);
  CHECK(std::abs(g.estimated_entropy) <= 1e-2);
}

TEST_CASE("push-forward mass escapes everywhere except the atom") {
  auto mass = pushforward_mass_decay(200, 40, 5.0, 0.3, 99);
  CHECK(mass.front() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < mass.size(); ++i) CHECK(mass[i] <= mass[i - 1] + 1e-15);
  CHECK(mass.back() == doctest::Approx(0.3));
}

TEST_CASE("Lebesgue numbers") {
  // two points at distance 1 covered by their singletons
  FiniteMetricModel two;
  two.distance = {{0.0, 1.0}, {1.0, 0.0}};
  two.compact_sets = {{0}, {1}};
  two.cover = {{0}, {1}};
  two.admissible = {true, true};
  CHECK(lebesgue_number(two) == doctest::Approx(brute_lebesgue(two)));
  CHECK(lebesgue_number(two) == doctest::Approx(1.0));
  // a cover containing the whole space
  FiniteMetricModel whole = two;
  whole.distance = {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
  whole.compact_sets = {{0, 1, 2}};
  whole.cover = {{0, 1, 2}};
  whole.admissible = {true};
  CHECK(lebesgue_number(whole) == doctest::Approx(2.0));
  FiniteMetricModel single;
  single.distance = {{0.0}};
  single.compact_sets = {{0}};
  single.cover = {{0}};
  single.admissible = {true};
  CHECK(lebesgue_number(single) == 1.0);
  // errors
  FiniteMetricModel missing = two;
  missing.cover = {{0}};
  missing.admissible = {true};
  CHECK_THROWS_AS(lebesgue_number(missing), Error);
  FiniteMetricModel wrong_flag = two;
  wrong_flag.compact_sets = {};
  CHECK_THROWS_AS(lebesgue_number(wrong_flag), Error);
}

TEST_CASE("property: Lebesgue numbers on 1000 random admissible covers") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    FiniteMetricModel m = random_model(rng);
    for (std::size_t i = 0; i < m.cover.size(); ++i) REQUIRE(m.element_admissible(i));
    double delta = lebesgue_number(m);
    CHECK(delta > 0.0);
    bool contains_all = false;
    for (const auto& e : m.cover) contains_all = contains_all || static_cast<int>(e.size()) == m.size();
    if (!contains_all && m.size() > 1) CHECK(delta == doctest::Approx(brute_lebesgue(m)));
  }
}
