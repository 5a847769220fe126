#include "dualrdm/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace dualrdm {

namespace {

struct Trial {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;  // grad . direction
  Vector x;
  Vector grad;
};

// Minimizer of the cubic matching values and slopes at a and b; falls back to
// bisection when the cubic has no usable minimizer.
double cubic_step(const Trial& a, const Trial& b) {
  const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
  const double rad = d1 * d1 - a.slope * b.slope;
  if (!(rad >= 0.0)) return 0.5 * (a.alpha + b.alpha);
  const double d2 = std::copysign(std::sqrt(rad), b.alpha - a.alpha);
  const double denom = b.slope - a.slope + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a.alpha + b.alpha);
  const double t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
  return std::isfinite(t) ? t : 0.5 * (a.alpha + b.alpha);
}

class LineSearch {
 public:
  LineSearch(const ObjectiveFn& f, const Vector& x, double f0, double slope0, const Vector& dir,
             const LbfgsOptions& opts)
      : f_(f), x_(x), f0_(f0), slope0_(slope0), dir_(dir), opts_(opts), noise_(1e-12 * std::abs(f0)) {}

  // Returns true and fills `out` on success. A step satisfying only the
  // sufficient-decrease condition is accepted when the bracket collapses.
  bool run(double alpha0, Trial& out) {
    Trial prev;
    prev.alpha = 0.0;
    prev.value = f0_;
    prev.slope = slope0_;
    double alpha = alpha0;
    for (int i = 0; i < opts_.max_line_search; ++i) {
      Trial cur = eval(alpha);
      if (!std::isfinite(cur.value)) {
        alpha = 0.5 * (prev.alpha + alpha);
        continue;
      }
      if (approximate_wolfe(cur)) {
        out = std::move(cur);
        return true;
      }
      if (cur.value > f0_ + opts_.wolfe_c1 * alpha * slope0_ || (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur, out);
      }
      if (std::abs(cur.slope) <= -opts_.wolfe_c2 * slope0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, out);
      prev = std::move(cur);
      alpha *= 4.0;
    }
    return false;
  }

 private:
  Trial eval(double alpha) {
    Trial t;
    t.alpha = alpha;
    t.x = x_ + alpha * dir_;
    t.grad.resize(t.x.size());
    t.value = f_(t.x, t.grad);
    t.slope = t.grad.dot(dir_);
    return t;
  }

  bool zoom(Trial lo, Trial hi, Trial& out) {
    for (int i = 0; i < opts_.max_line_search; ++i) {
      const double width = std::abs(hi.alpha - lo.alpha);
      if (width <= 1e-14 * std::max(1.0, std::abs(lo.alpha))) break;
      const double left = std::min(lo.alpha, hi.alpha) + 0.1 * width;
      const double right = std::max(lo.alpha, hi.alpha) - 0.1 * width;
      const double alpha = std::clamp(cubic_step(lo, hi), left, right);
      Trial cur = eval(alpha);
      if (std::isfinite(cur.value) && approximate_wolfe(cur)) {
        out = std::move(cur);
        return true;
      }
      if (!std::isfinite(cur.value) || cur.value > f0_ + opts_.wolfe_c1 * alpha * slope0_ || cur.value >= lo.value) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -opts_.wolfe_c2 * slope0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    if (lo.alpha > 0.0 && lo.value < f0_) {
      out = std::move(lo);
      return true;
    }
    return false;
  }

  // Near the minimum the decrease in f drops below its rounding error; the
  // slope is still accurate there, so accept on the derivative conditions.
  bool approximate_wolfe(const Trial& t) const {
    return std::abs(t.value - f0_) <= noise_ && t.slope <= (2.0 * opts_.wolfe_c1 - 1.0) * slope0_ &&
           std::abs(t.slope) <= -opts_.wolfe_c2 * slope0_;
  }

  const ObjectiveFn& f_;
  const Vector& x_;
  double f0_;
  double slope0_;
  const Vector& dir_;
  const LbfgsOptions& opts_;
  double noise_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const ObjectiveFn& f, Vector x0, const LbfgsOptions& opts) {
  LbfgsResult res;
  res.x = std::move(x0);
  Vector g(res.x.size());
  res.value = f(res.x, g);
  if (!std::isfinite(res.value)) {
    res.status = LbfgsStatus::NonFinite;
    return res;
  }
  res.gradient_norm = res.x.size() ? g.cwiseAbs().maxCoeff() : 0.0;

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  Vector dir(res.x.size());
  std::vector<double> alpha_buf;

  while (true) {
    if (res.gradient_norm <= opts.gradient_tolerance) {
      res.status = LbfgsStatus::Converged;
      return res;
    }
    if (res.iterations >= opts.max_iterations) {
      res.status = LbfgsStatus::MaxIterations;
      return res;
    }

    // Two-loop recursion.
    dir = -g;
    const std::size_t m = s_hist.size();
    alpha_buf.assign(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
      alpha_buf[i] = rho_hist[i] * s_hist[i].dot(dir);
      dir -= alpha_buf[i] * y_hist[i];
    }
    if (m > 0) dir *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(dir);
      dir += (alpha_buf[i] - beta) * s_hist[i];
    }
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }
    const double alpha0 = s_hist.empty() ? std::min(1.0, 1.0 / std::max(g.norm(), 1e-300)) : 1.0;

    Trial step;
    LineSearch ls(f, res.x, res.value, slope, dir, opts);
    bool ok = ls.run(alpha0, step);
    if (!ok && !s_hist.empty()) {
      // Retry once along steepest descent with a fresh memory.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g;
      slope = -g.squaredNorm();
      LineSearch sd(f, res.x, res.value, slope, dir, opts);
      ok = sd.run(std::min(1.0, 1.0 / std::max(g.norm(), 1e-300)), step);
    }
    if (!ok) {
      res.status = LbfgsStatus::LineSearchFailed;
      return res;
    }

    Vector s = step.x - res.x;
    Vector y = step.grad - g;
    const double sy = s.dot(y);
    res.x = std::move(step.x);
    g = std::move(step.grad);
    res.value = step.value;
    res.gradient_norm = g.cwiseAbs().maxCoeff();
    ++res.iterations;
    if (sy > std::numeric_limits<double>::epsilon() * y.squaredNorm()) {
      if (static_cast<int>(s_hist.size()) == opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      rho_hist.push_back(1.0 / sy);
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
    }
  }
}

}  // namespace dualrdm
