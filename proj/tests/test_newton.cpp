#include <doctest.h>

#include <cmath>

#include "dualrdm/error.hpp"
#include "dualrdm/fci.hpp"
#include "dualrdm/newton_dual.hpp"

using namespace dualrdm;

namespace {

const double kHubbard = 2.0 - 2.0 * std::sqrt(2.0);

void check_decreasing(const NewtonTrace& tr) {
  for (std::size_t i = 1; i < tr.iterations.size(); ++i) CHECK(tr.iterations[i].mu < tr.iterations[i - 1].mu);
}

}  // namespace

TEST_CASE("config validation") {
  NewtonConfig c;
  CHECK_NOTHROW(c.validate());
  c.damping = 0.0;
  CHECK_THROWS_AS(c.validate(), DataError);
  c.damping = 1.0;
  c.epsilon = 0.0;
  CHECK_THROWS_AS(c.validate(), DataError);
  c.epsilon = 0.05;
  c.max_outer = 0;
  CHECK_THROWS_AS(c.validate(), DataError);
}

TEST_CASE("default mu0") {
  const ReducedHamiltonian k = build_reduced_hamiltonian(spinify(hubbard_dimer(1.0, 4.0)));
  CHECK(default_mu0(k, *k.aufbau_energy) >= kHubbard / 2.0);
  NewtonConfig c;
  CHECK(initial_mu(k, c) == default_mu0(k, *k.aufbau_energy));
  c.mu0 = 3.5;
  CHECK(initial_mu(k, c) == 3.5);

  // Noninteracting: the Aufbau determinant is exact, so mu0 = mu*.
  IntegralSet ints = IntegralSet::zeros(3, 2);
  ints.h_core.diagonal() << -1.0, 0.2, 0.5;
  const SpinOrbitalIntegrals s = spinify(ints);
  const ReducedHamiltonian k0 = build_reduced_hamiltonian(s);
  CHECK(default_mu0(k0, *k0.aufbau_energy) == doctest::Approx(solve_fci(s).state.energy / 2.0));
}

TEST_CASE("Hubbard dimer") {
  const ReducedHamiltonian k = build_reduced_hamiltonian(spinify(hubbard_dimer(1.0, 4.0)));
  const NewtonTrace tr = solve_dual(k, NewtonConfig{});
  CHECK(tr.energy >= kHubbard - 1e-4);
  CHECK(tr.energy <= kHubbard + 1e-6);
  CHECK(tr.iterations.size() <= 6);
  CHECK(tr.iterations.front().mu == doctest::Approx(default_mu0(k, *k.aufbau_energy)));
  CHECK(tr.confirmed);
  check_decreasing(tr);
}

TEST_CASE("N=2 random system equals FCI") {
  for (std::uint64_t seed : {7u, 8u}) {
    const SpinOrbitalIntegrals ints = spinify(random_two_body(seed, seed == 7 ? 6 : 4, 2));
    const NewtonTrace tr = solve_dual(build_reduced_hamiltonian(ints), NewtonConfig{});
    CHECK(std::abs(tr.energy - solve_fci(ints).state.energy) <= 1e-6);
    CHECK(tr.iterations.size() <= 6);
    check_decreasing(tr);
  }
}

TEST_CASE("N=3 lower bound, monotone mu, trace bookkeeping") {
  const SpinOrbitalIntegrals ints = spinify(random_two_body(21, 6, 3));
  const NewtonTrace tr = solve_dual(build_reduced_hamiltonian(ints), NewtonConfig{});
  CHECK(tr.energy <= solve_fci(ints).state.energy + 1e-6);
  CHECK(tr.iterations.size() <= 6);
  check_decreasing(tr);
  CHECK_FALSE(tr.iterations.front().slope.has_value());
  int total = 0;
  for (const auto& it : tr.iterations) total += it.inner_iterations;
  CHECK(tr.total_inner_iterations >= total);
  CHECK(tr.energy == doctest::Approx(6.0 * tr.mu_star + 0.0));
  CHECK(tr.probe_above_delta.has_value());
  CHECK(*tr.probe_above_delta > 0.0);
}

TEST_CASE("mu0 below mu* is rejected") {
  const ReducedHamiltonian k = build_reduced_hamiltonian(spinify(hubbard_dimer(1.0, 4.0)));
  NewtonConfig c;
  c.mu0 = -5.0;
  try {
    solve_dual(k, c);
    FAIL("expected an invalid bracket");
  } catch (const NewtonError& e) {
    CHECK(e.kind() == NewtonError::Kind::InvalidBracket);
    CHECK(std::string(e.what()).find("supply larger mu0") != std::string::npos);
    CHECK(e.trace().iterations.size() == 1);
  }
}

TEST_CASE("outer iteration limit") {
  const ReducedHamiltonian k = build_reduced_hamiltonian(spinify(random_two_body(22, 6, 3)));
  NewtonConfig c;
  c.max_outer = 1;
  c.epsilon = 1e-12;
  c.mu0 = *k.aufbau_energy / 6.0 + 5.0;
  try {
    solve_dual(k, c);
    FAIL("expected non-convergence");
  } catch (const NewtonError& e) {
    CHECK(e.kind() == NewtonError::Kind::NotConverged);
    CHECK(e.trace().iterations.size() == 2);
  }
}

TEST_CASE("located zero is invariant under inner product scaling") {
  const ReducedHamiltonian k = build_reduced_hamiltonian(spinify(random_two_body(23, 6, 3)));
  NewtonConfig a, b;
  b.projection.inner_scale = 9.0;
  const NewtonTrace ta = solve_dual(k, a);
  const NewtonTrace tb = solve_dual(k, b);
  CHECK(tb.mu_star == doctest::Approx(ta.mu_star).epsilon(1e-5));
  CHECK(tb.iterations.front().delta == doctest::Approx(3.0 * ta.iterations.front().delta).epsilon(1e-6));

  const ReducedHamiltonian h = build_reduced_hamiltonian(spinify(hubbard_dimer(1.0, 4.0)));
  CHECK(solve_dual(h, b).mu_star == doctest::Approx(solve_dual(h, a).mu_star).epsilon(1e-10));
}

TEST_CASE("confirmation probe on an exact case") {
  const ReducedHamiltonian k = build_reduced_hamiltonian(spinify(random_two_body(24, 6, 2)));
  const NewtonTrace tr = solve_dual(k, NewtonConfig{});
  REQUIRE(tr.probe_above_delta.has_value());
  REQUIRE(tr.probe_below_delta.has_value());
  CHECK(*tr.probe_above_delta > 0.0);
  CHECK(*tr.probe_below_delta <= 1e-9);
  CHECK(tr.confirmed);

  NewtonConfig off;
  off.confirm = false;
  const NewtonTrace t2 = solve_dual(k, off);
  CHECK_FALSE(t2.probe_above_delta.has_value());
  CHECK(t2.mu_star == tr.mu_star);
}

TEST_CASE("delta curve") {
  const ReducedHamiltonian k = build_reduced_hamiltonian(spinify(hubbard_dimer(1.0, 4.0)));
  const double mu_star = kHubbard / 2.0;
  std::vector<double> below;
  for (int i = 0; i < 5; ++i) below.push_back(mu_star - 1.0 + 0.2 * i);
  for (const CurvePoint& p : sample_delta_curve(k, below)) {
    CHECK(p.delta == 0.0);
    CHECK_FALSE(p.error.has_value());
  }

  std::vector<double> grid;
  for (int i = 0; i < 21; ++i) grid.push_back(mu_star - 0.5 + 0.05 * i);
  const auto one = sample_delta_curve(k, grid, {}, 1);
  const auto many = sample_delta_curve(k, grid, {}, 4);
  REQUIRE(one.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(one[i].mu == grid[i]);
    CHECK(one[i].delta == many[i].delta);
    if (grid[i] < mu_star) CHECK(one[i].delta == 0.0);
    if (grid[i] > mu_star + 1e-9) CHECK(one[i].delta > 0.0);
    if (i > 0) CHECK(one[i].delta >= one[i - 1].delta - 1e-8);
    if (i > 0 && i + 1 < grid.size()) CHECK(one[i].delta <= 0.5 * (one[i - 1].delta + one[i + 1].delta) + 1e-8);
  }

  const auto bad = sample_delta_curve(k, {0.0, std::nan("")});
  CHECK_FALSE(bad[0].error.has_value());
  CHECK(bad[1].error.has_value());
}
