#include <doctest.h>

#include <cmath>
#include <random>

#include "cptherm/perron.hpp"
#include "cptherm/thermo.hpp"
#include "oracles.hpp"

using namespace cpt;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

ShiftSystem golden() { return ShiftSystem::from_rows({{1, 1}, {1, 0}}); }

}  // namespace

TEST_CASE("power iteration") {
  PerronData a = power_iteration(SparseMatrix::from_dense({{1, 1}, {1, 1}}));
  CHECK(a.eigenvalue == doctest::Approx(2.0).epsilon(1e-12));
  PerronData b = power_iteration(SparseMatrix::from_dense({{1, 1}, {1, 0}}));
  CHECK(b.eigenvalue == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
  PerronData c = power_iteration(SparseMatrix::from_dense({{1, 2}, {2, 1}}));
  CHECK(c.eigenvalue == doctest::Approx(3.0).epsilon(1e-12));
  double dot = 0.0;
  for (int i = 0; i < 2; ++i) {
    CHECK(c.right[i] > 0);
    CHECK(c.left[i] > 0);
    dot += c.left[i] * c.right[i];
  }
  CHECK(dot == doctest::Approx(1.0));
  // periodic: the shift by sI still converges
  PerronData p = power_iteration(SparseMatrix::from_dense({{0, 1}, {1, 0}}));
  CHECK(p.eigenvalue == doctest::Approx(1.0));
  try {
    power_iteration(SparseMatrix::from_dense({{1, 1}, {0, 1}}));
    FAIL("expected no-unique-perron");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoUniquePerron);
  }
  CHECK(spectral_radius(SparseMatrix::from_dense({{2, 1}, {0, 3}})) == doctest::Approx(3.0));
}

TEST_CASE("property: power iteration matches a dense oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    int k = 0;
    auto adj = oracle::random_irreducible(rng, 6, &k);
    oracle::Matrix m(k, std::vector<double>(k, 0.0));
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (adj[a * k + b]) m[a][b] = u(rng);
    SparseMatrix sm = SparseMatrix::from_dense(m);
    PerronData d = power_iteration(sm);
    CHECK(d.eigenvalue == doctest::Approx(oracle::perron(m)).epsilon(1e-10));
    std::vector<double> mv = sm.multiply(d.right);
    for (int i = 0; i < k; ++i) CHECK(std::abs(mv[i] - d.eigenvalue * d.right[i]) <= 1e-10 * d.eigenvalue);
  }
}

TEST_CASE("transfer pressure oracles") {
  ShiftSystem s = make_full_shift(2);
  CHECK(transfer_pressure(s, Potential::zero(s)) == doctest::Approx(kLog2).epsilon(1e-13));
  CHECK(transfer_pressure(s, Potential::from_symbols(s, {0.0, kLog2})) == doctest::Approx(kLog3).epsilon(1e-13));
  CHECK(transfer_pressure(golden(), Potential::zero(golden())) ==
        doctest::Approx(oracle::golden_log()).epsilon(1e-13));
  ShiftSystem reducible(2, {1, 1, 0, 1});
  CHECK_THROWS_AS(transfer_pressure(reducible, Potential::zero(reducible)), Error);
  CHECK(transfer_pressure_any(reducible, Potential::from_symbols(reducible, {0.3, 0.7})) ==
        doctest::Approx(0.7));
}

TEST_CASE("property: transfer pressure matches dense oracles for depth 1 and 2") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    int k = 0;
    auto adj = oracle::random_irreducible(rng, 5, &k);
    ShiftSystem s(k, adj);
    auto t1 = oracle::random_table(rng, k);
    CHECK(transfer_pressure(s, Potential(s, 1, t1)) ==
          doctest::Approx(oracle::pressure_depth1(k, adj, t1)).epsilon(1e-10));
    auto t2 = oracle::random_table(rng, k * k);
    CHECK(transfer_pressure(s, Potential(s, 2, t2)) ==
          doctest::Approx(oracle::pressure_depth2(k, adj, t2)).epsilon(1e-10));
  }
}

TEST_CASE("block recoding") {
  ShiftSystem s = make_full_shift(2);
  Potential phi1 = Potential::from_symbols(s, {0.0, kLog2});
  RecodedSystem id = block_recode(s, phi1);
  CHECK(id.system.alphabet_size() == 2);
  CHECK(id.potential.table() == phi1.table());

  Potential phi2(s, 2, {0.1, 0.2, 0.3, 0.4});
  RecodedSystem rec = block_recode(s, phi2);
  CHECK(rec.system.alphabet_size() == 4);
  for (int n = 1; n <= 10; ++n) CHECK(rec.system.word_count(n) == s.word_count(n + 1));

  RecodedSystem g = block_recode(golden(), Potential(golden(), 2, {0, 0, 0, 0}));
  CHECK(g.system.alphabet_size() == 3);
  CHECK(g.blocks.size() == 3);
}

TEST_CASE("property: pressure invariant under block recoding") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    int k = 0;
    auto adj = oracle::random_irreducible(rng, 4, &k);
    ShiftSystem s(k, adj);
    int r = 2 + trial % 2;
    Potential phi(s, r, oracle::random_table(rng, oracle::ipow(k, r)));
    RecodedSystem rec = block_recode(s, phi);
    CHECK(std::abs(transfer_pressure(rec.system, rec.potential) - transfer_pressure(s, phi)) <= 1e-9);
    Potential zero = Potential::zero(s);
    RecodedSystem rz = block_recode(s, Potential(s, r, std::vector<double>(oracle::ipow(k, r), 0.0)));
    CHECK(std::abs(transfer_pressure(rz.system, rz.potential) - transfer_pressure(s, zero)) <= 1e-9);
  }
}

TEST_CASE("equilibrium states") {
  ShiftSystem s = make_full_shift(2);
  EquilibriumState uniform = equilibrium_markov(s, Potential::zero(s));
  CHECK(uniform.entropy == doctest::Approx(kLog2).epsilon(1e-12));
  for (double p : uniform.measure.stationary) CHECK(p == doctest::Approx(0.5));

  EquilibriumState eq = equilibrium_markov(s, Potential::from_symbols(s, {0.0, kLog2}));
  CHECK(eq.measure.stationary[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(eq.measure.stationary[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(eq.entropy == doctest::Approx(kLog3 - 2.0 / 3 * kLog2).epsilon(1e-12));
  CHECK(eq.potential_integral == doctest::Approx(2.0 / 3 * kLog2).epsilon(1e-12));
  CHECK(std::log(eq.eigenvalue) == doctest::Approx(kLog3).epsilon(1e-12));

  // Parry measure of the golden mean shift
  EquilibriumState parry = equilibrium_markov(golden(), Potential::zero(golden()));
  const double g = (1 + std::sqrt(5.0)) / 2;
  CHECK(parry.entropy == doctest::Approx(std::log(g)).epsilon(1e-12));
  CHECK(parry.measure.stationary[0] == doctest::Approx(g * g / (1 + g * g)).epsilon(1e-10));
  const BlockGraph& bg = parry.measure.graph;
  for (std::size_t i = 0; i < bg.successors[0].size(); ++i)
    if (bg.successors[0][i] == 1) CHECK(parry.measure.transitions[0][i] == doctest::Approx(1 / (g * g)));
}

TEST_CASE("property: Gibbs identity and stochasticity on random SFTs") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    int k = 0;
    auto adj = oracle::random_irreducible(rng, 6, &k);
    ShiftSystem s(k, adj);
    int r = 1 + trial % 2;
    Potential phi(s, r, oracle::random_table(rng, oracle::ipow(k, r)));
    EquilibriumState eq = equilibrium_markov(s, phi);
    CHECK(std::abs(std::log(eq.eigenvalue) - eq.entropy - eq.potential_integral) <= 1e-9);
    CHECK(eq.entropy >= 0.0);
    CHECK(stationarity_defect(eq.measure) <= 1e-12);
    for (const auto& row : eq.measure.transitions) {
      double sum = 0.0;
      for (double p : row) sum += p;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("variational residuals") {
  ShiftSystem s = make_full_shift(2);
  Potential phi = Potential::from_symbols(s, {0.0, kLog2});
  CHECK(std::abs(vp_residual(s, phi, equilibrium_markov(s, phi).measure)) <= 1e-9);
  CHECK(vp_residual(s, phi, bernoulli_measure(s, {0.5, 0.5})) ==
        doctest::Approx(kLog3 - 1.5 * kLog2).epsilon(1e-12));
  CHECK(vp_residual(s, phi, dirac_fixed_point(s, 1)) == doctest::Approx(kLog3 - kLog2).epsilon(1e-12));
  CHECK_THROWS_AS(dirac_fixed_point(golden(), 1), Error);
}

TEST_CASE("property: partial variational principle on perturbed measures") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    int k = 0;
    auto adj = oracle::random_irreducible(rng, 4, &k);
    ShiftSystem s(k, adj);
    int r = 1 + trial % 2;
    Potential phi(s, r, oracle::random_table(rng, oracle::ipow(k, r)));
    EquilibriumState eq = equilibrium_markov(s, phi);
    for (int i = 0; i < 10; ++i) {
      MarkovMeasure mu = perturb_measure(eq.measure, rng, 1.0);
      CHECK(stationarity_defect(mu) <= 1e-10);
      CHECK(vp_residual(s, phi, mu) >= -1e-9);
    }
  }
}

TEST_CASE("measure lifting keeps entropy and integrals") {
  ShiftSystem s = golden();
  Potential phi = Potential::from_symbols(s, {0.4, -0.2});
  EquilibriumState eq = equilibrium_markov(s, phi);
  MarkovMeasure lifted = lift_measure(s, eq.measure, 3);
  CHECK(measure_entropy(lifted) == doctest::Approx(eq.entropy).epsilon(1e-12));
  CHECK(measure_integral(s, phi, lifted) == doctest::Approx(eq.potential_integral).epsilon(1e-12));
}

TEST_CASE("inverse variational probe") {
  ShiftSystem s = make_full_shift(2);
  Potential zero = Potential::zero(s);
  InverseVpProbe uniform = inverse_vp_probe(s, zero, bernoulli_measure(s, {0.5, 0.5}), 12);
  CHECK(uniform.value == doctest::Approx(kLog2).epsilon(0.05 / kLog2));
  CHECK(uniform.value <= uniform.pressure + 1e-9);

  InverseVpProbe skew = inverse_vp_probe(s, zero, bernoulli_measure(s, {0.25, 0.75}), 16);
  const double h = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  CHECK(std::abs(skew.value - h) <= 0.08);
  CHECK(skew.value >= skew.free_energy - 0.08);
  CHECK(skew.value <= skew.pressure + 1e-9);

  // oracle for the typical-set size: binomial count with |ones/n - 3/4| < 1/sqrt(16)
  std::size_t count = 0;
  for (int ones = 0; ones <= 16; ++ones)
    if (std::abs(ones / 16.0 - 0.75) < 0.25) count += static_cast<std::size_t>(std::round(std::tgamma(17.0) / (std::tgamma(ones + 1.0) * std::tgamma(17.0 - ones))));
  CHECK(skew.typical_words == count);
}

TEST_CASE("power systems") {
  ShiftSystem s = make_full_shift(2);
  PowerCheck one = power_pressure_check(s, Potential::zero(s), 1);
  CHECK(one.lhs == doctest::Approx(one.rhs));
  PowerCheck three = power_pressure_check(s, Potential::zero(s), 3);
  CHECK(three.lhs == doctest::Approx(3 * kLog2).epsilon(1e-12));
  PowerCheck two = power_pressure_check(s, Potential::from_symbols(s, {0.0, kLog2}), 2);
  CHECK(two.lhs == doctest::Approx(2 * kLog3).epsilon(1e-12));
  CHECK(two.rhs == doctest::Approx(2 * kLog3).epsilon(1e-12));
}

TEST_CASE("property: power corollary on random SFTs") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    int k = 0;
    auto adj = oracle::random_irreducible(rng, 4, &k);
    ShiftSystem s(k, adj);
    int r = 1 + trial % 2;
    Potential phi(s, r, oracle::random_table(rng, oracle::ipow(k, r)));
    for (int p : {2, 3}) {
      PowerCheck c = power_pressure_check(s, phi, p);
      CHECK(std::abs(c.lhs - c.rhs) <= 1e-9);
    }
  }
}
