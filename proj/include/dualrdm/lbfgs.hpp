#pragma once

#include <functional>

#include "dualrdm/pairspace.hpp"

namespace dualrdm {

/// f(x) returning the value and writing the gradient into the second argument.
using ObjectiveFn = std::function<double(const Vector& x, Vector& grad)>;

struct LbfgsOptions {
  int memory = 3;
  int max_iterations = 20000;
  /// Stop when max_i |grad_i| <= gradient_tolerance.
  double gradient_tolerance = 1e-7;
  double wolfe_c1 = 1e-4;  // sufficient decrease
  double wolfe_c2 = 0.9;   // curvature
  int max_line_search = 40;
};

enum class LbfgsStatus { Converged, MaxIterations, LineSearchFailed, NonFinite };

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  double gradient_norm = 0.0;  // max-norm
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::Converged;
};

/// Limited-memory BFGS (two-loop recursion) with a strong-Wolfe line search.
/// Accepted steps never increase f by more than its rounding error
/// (1e-12 relative), where the derivative conditions decide acceptance.
LbfgsResult minimize_lbfgs(const ObjectiveFn& f, Vector x0, const LbfgsOptions& opts);

}  // namespace dualrdm
