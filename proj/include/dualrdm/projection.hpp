#pragma once

#include <optional>
#include <vector>

#include "dualrdm/error.hpp"
#include "dualrdm/hamiltonians.hpp"
#include "dualrdm/representability.hpp"

namespace dualrdm {

/// Symmetric factors C_l with B_l = C_l^2; blocks for inactive conditions stay zero.
struct DualCertificate {
  Matrix c_p;  // d_A x d_A
  Matrix c_q;  // d_A x d_A
  Matrix c_g;  // d_G x d_G

  static DualCertificate zero(int r);
  int r() const;
  /// B_l = C_l^2 for every block.
  DualBlocks squares() const;
};

struct ProjectionOptions {
  /// Max-norm gradient tolerance; defaults to 1e-7 * max(1, ||K_N||).
  std::optional<double> gradient_tolerance;
  int max_iterations = 20000;
  int memory = 3;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  /// Distances below this are reported as exactly zero.
  double distance_floor = 1e-9;
  /// Multiplies the pair-space (and G-space) inner product. Rescales delta
  /// and delta' by sqrt(scale); the zero of delta does not move.
  double inner_scale = 1.0;
  std::vector<Condition> conditions = default_conditions();
};

struct ProjectionResult {
  TwoBodyOperator a_mu;   // projection of K_N - mu onto the polar cone
  TwoBodyOperator residual;  // K_N - mu - a_mu
  double distance = 0.0;
  double derivative = 0.0;
  DualCertificate certificate;
  int inner_iterations = 0;
  double gradient_norm = 0.0;  // max-norm
  /// True when the result came from the closed-form P-only projection.
  bool exact = false;
};

/// Projection did not reach its gradient tolerance; `best()` is the last iterate.
class ProjectionNotConverged : public NonConvergenceError {
 public:
  ProjectionNotConverged(const std::string& what, ProjectionResult best)
      : NonConvergenceError(what), best_(std::move(best)) {}
  const ProjectionResult& best() const { return best_; }

 private:
  ProjectionResult best_;
};

/// K_N - mu*I - sum_l L_l^*(C_l^2).
TwoBodyOperator residual(const ReducedHamiltonian& k, double mu, const DualCertificate& cert,
                         const std::vector<Condition>& conditions = default_conditions());

struct ObjectiveGradient {
  double value = 0.0;         // J = scale/2 * ||R||^2
  DualCertificate gradient;   // dJ/dC_l = -scale * (L_l(R) C_l + C_l L_l(R))
};

ObjectiveGradient objective_and_gradient(const ReducedHamiltonian& k, double mu, const DualCertificate& cert,
                                         const ProjectionOptions& opts = {});

/// Default gradient tolerance for a Hamiltonian.
double default_gradient_tolerance(const ReducedHamiltonian& k);

/// Projects K_N - mu onto the polar cone of the active conditions by L-BFGS
/// over the factors C_l.
///
/// Whenever K_N - mu is PSD, or more generally whenever the P-only
/// projection already satisfies the optimality conditions of the full cone
/// (L_l(R) <= 0 for every active l), the closed-form P-only answer is
/// returned with zero iterations. Otherwise the minimization starts from
/// `warm` if given, else from a seeded full-rank certificate.
///
/// Throws ProjectionNotConverged (carrying the best iterate) when the
/// iteration limit or a line-search failure stops the minimizer above
/// tolerance, and NumericalError on non-finite values.
ProjectionResult project(const ReducedHamiltonian& k, double mu, const DualCertificate* warm = nullptr,
                         const ProjectionOptions& opts = {});

}  // namespace dualrdm
