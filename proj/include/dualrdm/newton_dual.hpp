#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dualrdm/projection.hpp"

namespace dualrdm {

struct NewtonConfig {
  std::optional<double> mu0;
  double damping = 0.8;   // fraction a of the Newton step for n >= 1
  double epsilon = 0.05;  // slope test p^n <= (1+epsilon) delta'(mu^n)
  int max_outer = 50;
  /// Re-project just above and below the extrapolated zero.
  bool confirm = true;
  ProjectionOptions projection;

  /// Throws DataError unless 0 < damping <= 1, epsilon > 0, max_outer >= 1.
  void validate() const;
};

struct NewtonIteration {
  double mu = 0.0;
  double delta = 0.0;
  double derivative = 0.0;
  std::optional<double> slope;  // interpolation slope p^n (absent for n = 0)
  int inner_iterations = 0;
};

struct NewtonTrace {
  std::vector<NewtonIteration> iterations;
  double mu_star = 0.0;
  double energy = 0.0;  // N(N-1) mu_star + e_core
  DualCertificate certificate;
  /// How the loop ended: "extrapolated" (slope test fired) or "landed"
  /// (a Newton step reached delta = 0).
  std::string termination;
  int total_inner_iterations = 0;
  /// Confirmation probe results, when enabled.
  std::optional<double> probe_above_delta;
  std::optional<double> probe_below_delta;
  bool confirmed = false;
};

/// Error carrying the trace accumulated up to the failure.
class NewtonError : public Error {
 public:
  enum class Kind { InvalidBracket, NotConverged, Projection, Numerical };
  NewtonError(Kind kind, const std::string& what, NewtonTrace trace)
      : Error(what), kind_(kind), trace_(std::move(trace)) {}
  Kind kind() const { return kind_; }
  const NewtonTrace& trace() const { return trace_; }

 private:
  Kind kind_;
  NewtonTrace trace_;
};

/// (aufbau_energy - e_core) / (N(N-1)); an upper bound on mu*_app.
double default_mu0(const ReducedHamiltonian& k, double aufbau_energy);
/// Uses cfg.mu0 if set, else default_mu0 with k.aufbau_energy.
double initial_mu(const ReducedHamiltonian& k, const NewtonConfig& cfg);

/// Damped Newton iteration on delta(mu) with interpolation-slope stopping:
///   mu^1 = mu^0 - delta/delta' (full step), then for n >= 1 project with
///   warm start, p^n = (d^{n-1}-d^n)/(mu^{n-1}-mu^n); stop and extrapolate
///   mu* = mu^n - d^n/delta'(mu^n) once p^n <= (1+eps) delta'(mu^n),
///   otherwise mu^{n+1} = mu^n - a d^n/delta'(mu^n).
NewtonTrace solve_dual(const ReducedHamiltonian& k, const NewtonConfig& cfg);

struct CurvePoint {
  double mu = 0.0;
  double delta = 0.0;
  double derivative = 0.0;
  int inner_iterations = 0;
  std::optional<std::string> error;
};

/// Independent cold-start projections on each grid value, evaluated on up to
/// `threads` workers (0: DUALRDM_THREADS or hardware concurrency). Output
/// order follows the grid. A failed point keeps its best-so-far values and
/// records the error.
std::vector<CurvePoint> sample_delta_curve(const ReducedHamiltonian& k, const std::vector<double>& mu_grid,
                                           const ProjectionOptions& opts = {}, unsigned threads = 0);

/// Worker count from DUALRDM_THREADS, else hardware concurrency (>= 1).
unsigned default_thread_count();

}  // namespace dualrdm
