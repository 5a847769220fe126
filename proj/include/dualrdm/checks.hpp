#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dualrdm/pairspace.hpp"
#include "dualrdm/random.hpp"

namespace dualrdm {

/// Outcome of one invariant suite.
struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst observed violation measure
  double tolerance = 0.0;  // pass threshold on `worst`
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 20070101;
  /// Test hook: perturbs the Q adjoint inside the adjoint suite so that the
  /// suite must fail.
  bool corrupt_adjoint = false;
};

/// Adjoint identities <L(G),B> = <G,L*(B)> for Q and G over seeded pairs.
SuiteResult check_adjoint_identities(std::uint64_t seed, int pairs = 100, int r = 6, bool corrupt = false);
/// Objective gradient against central finite differences (step 1e-5).
SuiteResult check_gradient(std::uint64_t seed, int points = 20);
/// P, Q, G positivity on 2-RDMs of oracle ground states and random states.
SuiteResult check_necessity(std::uint64_t seed);
/// <Psi|H|Psi> = inner(K_N, Gamma_Psi) + e_core on random states (r=6, N=3).
SuiteResult check_energy_chain(std::uint64_t seed, int states = 100);

/// Runs every suite in a fixed order.
std::vector<SuiteResult> run_checks(const CheckOptions& opts);

/// Seeded symmetric matrix with N(0,1) entries.
Matrix random_symmetric(Rng& rng, Eigen::Index dim);

}  // namespace dualrdm
