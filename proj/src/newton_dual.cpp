#include "dualrdm/newton_dual.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace dualrdm {

void NewtonConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) throw DataError("damping must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw DataError("epsilon must be positive");
  if (max_outer < 1) throw DataError("max_outer must be at least 1");
  if (mu0 && !std::isfinite(*mu0)) throw DataError("mu0 must be finite");
}

double default_mu0(const ReducedHamiltonian& k, double aufbau_energy) {
  const double pairs = static_cast<double>(k.basis.n_electrons) * (k.basis.n_electrons - 1);
  return (aufbau_energy - k.e_core) / pairs;
}

double initial_mu(const ReducedHamiltonian& k, const NewtonConfig& cfg) {
  if (cfg.mu0) return *cfg.mu0;
  if (!k.aufbau_energy) throw DataError("no mu0 given and no Aufbau energy available");
  return default_mu0(k, *k.aufbau_energy);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

NewtonTrace solve_dual(const ReducedHamiltonian& k, const NewtonConfig& cfg) {
  cfg.validate();
  NewtonTrace trace;
  const double pairs = static_cast<double>(k.basis.n_electrons) * (k.basis.n_electrons - 1);

  auto step = [&](double mu, const DualCertificate* warm) {
    try {
      ProjectionResult res = project(k, mu, warm, cfg.projection);
      trace.total_inner_iterations += res.inner_iterations;
      return res;
    } catch (const ProjectionNotConverged& e) {
      trace.total_inner_iterations += e.best().inner_iterations;
      trace.certificate = e.best().certificate;
      throw NewtonError(NewtonError::Kind::Projection, e.what(), trace);
    } catch (const NumericalError& e) {
      throw NewtonError(NewtonError::Kind::Numerical, e.what(), trace);
    }
  };
  auto record = [&](double mu, const ProjectionResult& res, std::optional<double> slope) {
    trace.iterations.push_back(NewtonIteration{mu, res.distance, res.derivative, slope, res.inner_iterations});
    trace.certificate = res.certificate;
  };

  double mu_prev = initial_mu(k, cfg);
  ProjectionResult prev = step(mu_prev, nullptr);
  record(mu_prev, prev, std::nullopt);
  if (prev.distance == 0.0) {
    throw NewtonError(NewtonError::Kind::InvalidBracket,
                      "initial value below mu* (delta(mu0) = 0 at mu0 = " + fmt(mu_prev) + "), supply larger mu0",
                      trace);
  }
  if (!(prev.derivative > 0.0)) {
    throw NewtonError(NewtonError::Kind::Numerical, "non-positive derivative at mu0 = " + fmt(mu_prev), trace);
  }

  double mu = mu_prev - prev.distance / prev.derivative;
  bool done = false;
  for (int n = 1; n <= cfg.max_outer && !done; ++n) {
    ProjectionResult cur = step(mu, &prev.certificate);
    if (cur.distance == 0.0) {
      // A Newton step from the right of a convex function never passes its
      // zero, so mu is the zero itself.
      record(mu, cur, std::nullopt);
      trace.mu_star = mu;
      trace.termination = "landed";
      done = true;
      break;
    }
    const double slope = (prev.distance - cur.distance) / (mu_prev - mu);
    record(mu, cur, slope);
    if (!(cur.derivative > 0.0)) {
      throw NewtonError(NewtonError::Kind::Numerical, "non-positive derivative at mu = " + fmt(mu), trace);
    }
    if (slope <= (1.0 + cfg.epsilon) * cur.derivative) {
      trace.mu_star = mu - cur.distance / cur.derivative;
      trace.termination = "extrapolated";
      done = true;
      break;
    }
    mu_prev = mu;
    mu = mu - cfg.damping * cur.distance / cur.derivative;
    prev = std::move(cur);
  }
  if (!done) {
    throw NewtonError(NewtonError::Kind::NotConverged,
                      "Newton iteration did not meet the slope test within " + std::to_string(cfg.max_outer) +
                          " outer iterations",
                      trace);
  }
  trace.energy = pairs * trace.mu_star + k.e_core;

  if (cfg.confirm) {
    const double scale = std::abs(trace.mu_star) > 0.0 ? std::abs(trace.mu_star) : 1.0;
    try {
      const DualCertificate warm = trace.certificate;
      const ProjectionResult above = project(k, trace.mu_star + 1e-6 * scale, &warm, cfg.projection);
      trace.probe_above_delta = above.distance;
      trace.total_inner_iterations += above.inner_iterations;
    } catch (const ProjectionNotConverged& e) {
      trace.probe_above_delta = e.best().distance;
    }
    try {
      const DualCertificate warm = trace.certificate;
      const ProjectionResult below = project(k, trace.mu_star - 1e-4 * scale, &warm, cfg.projection);
      trace.probe_below_delta = below.distance;
      trace.total_inner_iterations += below.inner_iterations;
    } catch (const ProjectionNotConverged& e) {
      trace.probe_below_delta = e.best().distance;
    }
    trace.confirmed = *trace.probe_above_delta > 0.0 && *trace.probe_below_delta <= cfg.projection.distance_floor;
  }
  return trace;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("DUALRDM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<CurvePoint> sample_delta_curve(const ReducedHamiltonian& k, const std::vector<double>& mu_grid,
                                           const ProjectionOptions& opts, unsigned threads) {
  std::vector<CurvePoint> out(mu_grid.size());
  auto eval = [&](std::size_t i) {
    CurvePoint& pt = out[i];
    pt.mu = mu_grid[i];
    try {
      if (!std::isfinite(pt.mu)) throw DataError("non-finite grid value");
      const ProjectionResult res = project(k, pt.mu, nullptr, opts);
      pt.delta = res.distance;
      pt.derivative = res.derivative;
      pt.inner_iterations = res.inner_iterations;
    } catch (const ProjectionNotConverged& e) {
      pt.delta = e.best().distance;
      pt.derivative = e.best().derivative;
      pt.inner_iterations = e.best().inner_iterations;
      pt.error = e.what();
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
  };

  const unsigned workers =
      std::min<unsigned>(threads ? threads : default_thread_count(), static_cast<unsigned>(mu_grid.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < mu_grid.size(); ++i) eval(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < mu_grid.size(); i = next++) eval(i);
    });
  }
  pool.clear();
  return out;
}

}  // namespace dualrdm
