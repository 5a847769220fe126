#include "dualrdm/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dualrdm/fci.hpp"
#include "dualrdm/projection.hpp"
#include "dualrdm/representability.hpp"

namespace dualrdm {

namespace {

SuiteResult make(std::string name, double worst, double tol, std::string detail) {
  return SuiteResult{std::move(name), worst <= tol, worst, tol, std::move(detail)};
}

std::string describe(const char* what, int count) {
  std::ostringstream os;
  os << count << ' ' << what;
  return os.str();
}

}  // namespace

Matrix random_symmetric(Rng& rng, Eigen::Index dim) {
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.normal();
  return m;
}

SuiteResult check_adjoint_identities(std::uint64_t seed, int pairs, int r, bool corrupt) {
  Rng rng(seed);
  const int n = 3;
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const TwoBodyOperator gamma(r, random_symmetric(rng, r * (r - 1) / 2));
    const TwoBodyOperator bq(r, random_symmetric(rng, r * (r - 1) / 2));
    const GSpaceOperator bg(r, random_symmetric(rng, r * r));

    TwoBodyOperator q_adj = adjoint_Q(bq, n);
    if (corrupt) q_adj.matrix()(0, 0) += 1e-3;
    const double lhs_q = inner(apply_Q(gamma, n), bq);
    const double rhs_q = inner(gamma, q_adj);
    worst = std::max(worst, std::abs(lhs_q - rhs_q) / (norm(gamma) * norm(bq)));

    const double lhs_g = inner(apply_G(gamma, n), bg);
    const double rhs_g = inner(gamma, adjoint_G(bg, n));
    worst = std::max(worst, std::abs(lhs_g - rhs_g) / (norm(gamma) * norm(bg)));
  }
  return make("adjoint", worst, 1e-11, describe("random (Gamma, B) pairs for Q and G", pairs));
}

SuiteResult check_gradient(std::uint64_t seed, int points) {
  Rng rng(seed);
  const double h = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    const int r = 6;
    const int n = 2 + t % 2;
    const ReducedHamiltonian k =
        build_reduced_hamiltonian(spinify(random_two_body(seed + 1000 + static_cast<std::uint64_t>(t), r, n)));
    const double mu = rng.uniform(-2.0, 1.0);
    DualCertificate c = DualCertificate::zero(r);
    c.c_p = 0.3 * random_symmetric(rng, c.c_p.rows());
    c.c_q = 0.3 * random_symmetric(rng, c.c_q.rows());
    c.c_g = 0.3 * random_symmetric(rng, c.c_g.rows());
    DualCertificate dir = DualCertificate::zero(r);
    dir.c_p = random_symmetric(rng, c.c_p.rows());
    dir.c_q = random_symmetric(rng, c.c_q.rows());
    dir.c_g = random_symmetric(rng, c.c_g.rows());

    const ObjectiveGradient og = objective_and_gradient(k, mu, c);
    const double analytic = og.gradient.c_p.cwiseProduct(dir.c_p).sum() +
                            og.gradient.c_q.cwiseProduct(dir.c_q).sum() +
                            og.gradient.c_g.cwiseProduct(dir.c_g).sum();
    auto shifted = [&](double s) {
      DualCertificate x = c;
      x.c_p += s * dir.c_p;
      x.c_q += s * dir.c_q;
      x.c_g += s * dir.c_g;
      return objective_and_gradient(k, mu, x).value;
    };
    const double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-12));
  }
  return make("gradient", worst, 1e-6, describe("seeded points, central differences h=1e-5", points));
}

SuiteResult check_necessity(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  int states = 0;
  struct Sys {
    int r, n;
  };
  for (const Sys s : {Sys{4, 2}, Sys{6, 2}, Sys{6, 3}, Sys{8, 3}, Sys{8, 4}}) {
    const SpinOrbitalIntegrals ints = spinify(random_two_body(rng.next(), s.r, s.n));
    const FciResult fci = solve_fci(ints);
    std::vector<Vector> vecs{fci.state.coefficients};
    for (int i = 0; i < 3; ++i) {
      Vector v(static_cast<Eigen::Index>(fci.basis.size()));
      for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.normal();
      vecs.push_back(v.normalized());
    }
    for (const Vector& v : vecs) {
      const TwoBodyOperator g = contract_2rdm(fci.basis, v);
      const double scale = std::max(1.0, norm(g));
      worst = std::max(worst, -min_eigenvalue(apply_P(g)) / scale);
      worst = std::max(worst, -min_eigenvalue(apply_Q(g, s.n)) / scale);
      worst = std::max(worst, -min_eigenvalue(apply_G(g, s.n)) / scale);
      ++states;
    }
  }
  return make("necessity", worst, 1e-8, describe("oracle states, min eigenvalue of P/Q/G", states));
}

SuiteResult check_energy_chain(std::uint64_t seed, int states) {
  Rng rng(seed);
  const SpinOrbitalIntegrals ints = spinify(random_two_body(seed ^ 0x5eedULL, 6, 3));
  const ReducedHamiltonian k = build_reduced_hamiltonian(ints);
  const DeterminantBasis dets = enumerate_basis(ints.basis);
  double worst = 0.0;
  for (int t = 0; t < states; ++t) {
    Vector v(static_cast<Eigen::Index>(dets.size()));
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.normal();
    v.normalize();
    const double direct = expectation(dets, ints, v);
    const double reduced = inner(k.k_matrix, contract_2rdm(dets, v)) + k.e_core;
    worst = std::max(worst, std::abs(direct - reduced) / std::max(1.0, std::abs(direct)));
  }
  return make("energy-chain", worst, 1e-10, describe("random normalized states, r=6 N=3", states));
}

std::vector<SuiteResult> run_checks(const CheckOptions& opts) {
  return {
      check_adjoint_identities(opts.seed, 100, 6, opts.corrupt_adjoint),
      check_gradient(opts.seed + 1),
      check_necessity(opts.seed + 2),
      check_energy_chain(opts.seed + 3),
  };
}

}  // namespace dualrdm
