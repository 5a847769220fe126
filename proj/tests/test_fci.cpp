#include <doctest.h>

#include <algorithm>
#include <bit>
#include <tuple>
#include <cmath>

#include "dualrdm/error.hpp"
#include "dualrdm/fci.hpp"
#include "dualrdm/random.hpp"
#include "dualrdm/representability.hpp"

using namespace dualrdm;

namespace {

Vector random_state(Rng& rng, std::size_t dim) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return v.normalized();
}

// Diagonal one-body Hamiltonian, no interaction.
SpinOrbitalIntegrals noninteracting(int n_spatial, int n_electrons) {
  IntegralSet ints = IntegralSet::zeros(n_spatial, n_electrons);
  for (int p = 0; p < n_spatial; ++p) ints.h_core(p, p) = 0.3 * p - 0.5 + 0.01 * p * p;
  ints.e_core = 1.25;
  return spinify(ints);
}

}  // namespace

TEST_CASE("determinant counts") {
  CHECK(enumerate_basis(BasisSpec::make(4, 2)).size() == 6);
  CHECK(enumerate_basis(BasisSpec::make(6, 3)).size() == 20);
  CHECK(enumerate_basis(BasisSpec::make(10, 4)).size() == 210);
  CHECK_THROWS_AS(enumerate_basis(BasisSpec::make(10, 4), 100), DataError);
}

TEST_CASE("determinants are distinct, have N bits and are found again") {
  const DeterminantBasis dets = enumerate_basis(BasisSpec::make(8, 3));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    CHECK(std::popcount(dets[i]) == 3);
    CHECK(dets.find(dets[i]) == static_cast<long>(i));
  }
  CHECK(dets.find(0b11ULL) == -1);
  CHECK(dets[0] == 0b111ULL);
}

TEST_CASE("creation and annihilation signs") {
  Determinant d = 0b1011;  // orbitals 0, 1, 3
  CHECK(annihilate(d, 3) == 1);  // two occupied below: +1
  CHECK(d == 0b0011);
  CHECK(annihilate(d, 2) == 0);
  CHECK(create(d, 2) == 1);
  CHECK(d == 0b0111);
  CHECK(create(d, 1) == 0);
  Determinant e = 0b0111;
  CHECK(annihilate(e, 1) == -1);
}

TEST_CASE("noninteracting diagonal system") {
  const SpinOrbitalIntegrals ints = noninteracting(4, 3);
  const DeterminantBasis dets = enumerate_basis(ints.basis);
  const Matrix h = hamiltonian_matrix(dets, ints);
  CHECK((h - Matrix(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    double e = ints.e_core;
    for (int p = 0; p < 8; ++p)
      if (dets[i] >> p & 1) e += ints.one_body(p, p);
    CHECK(h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == doctest::Approx(e).epsilon(1e-14));
  }
  // Sum of the three lowest spin-orbital energies: -0.5, -0.5, -0.19.
  const double exact = 1.25 - 0.5 - 0.5 - 0.19;
  CHECK(solve_fci(ints).state.energy == doctest::Approx(exact).epsilon(1e-13));
  CHECK(aufbau_diagonal(ints) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("Hamiltonian matrix is exactly symmetric; sparse matches dense") {
  const SpinOrbitalIntegrals ints = spinify(random_two_body(3, 8, 4));
  const DeterminantBasis dets = enumerate_basis(ints.basis);
  const Matrix h = hamiltonian_matrix(dets, ints);
  CHECK(h == h.transpose());
  const SparseMatrix s = hamiltonian_sparse(dets, ints);
  CHECK((Matrix(s) - h).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("Hubbard dimer Hamiltonian") {
  const SpinOrbitalIntegrals ints = spinify(hubbard_dimer(1.0, 4.0));
  const DeterminantBasis dets = enumerate_basis(ints.basis);
  const Matrix h = hamiltonian_matrix(dets, ints);
  CHECK(h.rows() == 6);
  const WaveFunction gs = ground_state(h);
  CHECK(std::abs(gs.energy - (4.0 - std::sqrt(32.0)) / 2.0) <= 1e-10);
  CHECK(gs.coefficients.norm() == doctest::Approx(1.0));
}

TEST_CASE("ground_state of a diagonal matrix is a unit vector") {
  const Matrix d = Eigen::Vector4d(3.0, -1.0, 2.0, 0.5).asDiagonal();
  const WaveFunction w = ground_state(d);
  CHECK(w.energy == -1.0);
  CHECK(std::abs(w.coefficients(1)) == doctest::Approx(1.0));
  CHECK(w.coefficients.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("Lanczos agrees with the dense solver") {
  const SpinOrbitalIntegrals ints = spinify(random_two_body(12, 6, 3));
  const DeterminantBasis dets = enumerate_basis(ints.basis);
  const WaveFunction dense = ground_state(hamiltonian_matrix(dets, ints));
  const WaveFunction lanczos = ground_state_lanczos(hamiltonian_sparse(dets, ints));
  CHECK(std::abs(dense.energy - lanczos.energy) <= 1e-9);
  // The N=3 ground level is a spin doublet, so compare residuals, not vectors.
  const SparseMatrix h = hamiltonian_sparse(dets, ints);
  CHECK((h * lanczos.coefficients - lanczos.energy * lanczos.coefficients).norm() <= 1e-9);

  const SpinOrbitalIntegrals big = spinify(random_two_body(13, 12, 5));
  const DeterminantBasis bdets = enumerate_basis(big.basis);
  REQUIRE(bdets.size() > 700);
  const WaveFunction bd = ground_state(hamiltonian_matrix(bdets, big));
  const WaveFunction bl = ground_state_lanczos(hamiltonian_sparse(bdets, big));
  CHECK(std::abs(bd.energy - bl.energy) <= 1e-9);
}

TEST_CASE("solve_fci takes the iterative path above the dense threshold") {
  const SpinOrbitalIntegrals ints = spinify(random_two_body(14, 14, 5));
  const FciResult fci = solve_fci(ints);
  REQUIRE(static_cast<Eigen::Index>(fci.basis.size()) > kDenseEigenThreshold);
  const SparseMatrix h = hamiltonian_sparse(fci.basis, ints);
  const Vector& c = fci.state.coefficients;
  CHECK((h * c - fci.state.energy * c).norm() <= 1e-8);
  CHECK(expectation(fci.basis, ints, c) == doctest::Approx(fci.state.energy).epsilon(1e-12));
}

TEST_CASE("2-RDM of a single determinant") {
  const DeterminantBasis dets = enumerate_basis(BasisSpec::make(4, 2));
  Vector c = Vector::Zero(6);
  c(dets.find(0b0011)) = 1.0;
  const TwoBodyOperator g = contract_2rdm(dets, c);
  Matrix expected = Matrix::Zero(6, 6);
  expected(0, 0) = 2.0;  // N(N-1) times the projector on pair (0,1)
  CHECK((g.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-15);
  const OneBodyOperator gamma = contract_to_1rdm(g, 2);
  CHECK((gamma.matrix() - Matrix(Eigen::Vector4d(1, 1, 0, 0).asDiagonal())).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("2-RDM postconditions on oracle states") {
  for (const auto& [seed, r, n] : {std::tuple{1, 6, 3}, {2, 8, 4}, {3, 8, 2}}) {
    const SpinOrbitalIntegrals ints = spinify(random_two_body(static_cast<std::uint64_t>(seed), r, n));
    const ReducedHamiltonian k = build_reduced_hamiltonian(ints);
    const FciResult fci = solve_fci(ints);
    const TwoBodyOperator g = contract_2rdm(fci.basis, fci.state.coefficients);
    CHECK(std::abs(tensor_trace(g) - n * (n - 1)) <= 1e-10);
    CHECK(min_eigenvalue(g) >= -1e-10);
    CHECK(std::abs(inner(k.k_matrix, g) + k.e_core - fci.state.energy) <= 1e-10);
    CHECK(aufbau_diagonal(ints) >= fci.state.energy - 1e-12);
    const Matrix h = hamiltonian_matrix(fci.basis, ints);
    CHECK(h.diagonal().minCoeff() >= fci.state.energy - 1e-12);
  }
}

TEST_CASE("2-RDM is quadratic in the state") {
  Rng rng(41);
  const DeterminantBasis dets = enumerate_basis(BasisSpec::make(6, 3));
  const Vector a = random_state(rng, dets.size());
  const Vector b = random_state(rng, dets.size());
  const double alpha = 0.6, beta = -1.3;
  // Gamma(alpha a + beta b) (unnormalized) = alpha^2 G(a) + beta^2 G(b) + alpha beta (G(a+b) - G(a) - G(b)).
  auto raw = [&](const Vector& v) { return v.squaredNorm() * contract_2rdm(dets, v).matrix(); };
  const Matrix lhs = raw(alpha * a + beta * b);
  const Matrix ga = raw(a), gb = raw(b), gab = raw(a + b);
  const Matrix rhs = alpha * alpha * ga + beta * beta * gb + alpha * beta * (gab - ga - gb);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("energy chain on random states") {
  Rng rng(43);
  const SpinOrbitalIntegrals ints = spinify(random_two_body(44, 6, 3));
  const ReducedHamiltonian k = build_reduced_hamiltonian(ints);
  const DeterminantBasis dets = enumerate_basis(ints.basis);
  for (int t = 0; t < 100; ++t) {
    const Vector v = random_state(rng, dets.size());
    const double direct = expectation(dets, ints, v);
    CHECK(std::abs(direct - inner(k.k_matrix, contract_2rdm(dets, v)) - k.e_core) <= 1e-10);
  }
}

TEST_CASE("aufbau diagonal bounds the Hubbard dimer") {
  const SpinOrbitalIntegrals ints = spinify(hubbard_dimer(1.0, 4.0));
  CHECK(aufbau_diagonal(ints) >= solve_fci(ints).state.energy);
}
