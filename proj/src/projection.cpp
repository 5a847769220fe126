#include "dualrdm/projection.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include "dualrdm/lbfgs.hpp"

namespace dualrdm {

namespace {

bool has(const std::vector<Condition>& cs, Condition c) { return std::find(cs.begin(), cs.end(), c) != cs.end(); }

struct Eig {
  Vector values;
  Matrix vectors;
};

Eig eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed during projection");
  return {es.eigenvalues(), es.eigenvectors()};
}

// V f(lambda) V^T
template <typename F>
Matrix spectral(const Eig& e, F&& f) {
  Vector d = e.values.unaryExpr(f);
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

// Evaluates J and its gradient on a packed factor vector.
class Objective {
 public:
  Objective(const ReducedHamiltonian& k, double mu, const ProjectionOptions& opts)
      : r_(k.basis.n_spin_orbitals),
        n_(k.basis.n_electrons),
        scale_(opts.inner_scale),
        use_p_(has(opts.conditions, Condition::P)),
        use_q_(has(opts.conditions, Condition::Q)),
        use_g_(has(opts.conditions, Condition::G)),
        da_(k.k_matrix.dim()),
        dg_(r_ * r_),
        target_(k.k_matrix.matrix()) {
    target_.diagonal().array() -= mu;
  }

  Eigen::Index size() const {
    return (use_p_ ? da_ * da_ : 0) + (use_q_ ? da_ * da_ : 0) + (use_g_ ? dg_ * dg_ : 0);
  }

  Vector pack(const DualCertificate& c) const {
    Vector x(size());
    Eigen::Index o = 0;
    auto put = [&](const Matrix& m) {
      x.segment(o, m.size()) = Eigen::Map<const Vector>(m.data(), m.size());
      o += m.size();
    };
    if (use_p_) put(c.c_p);
    if (use_q_) put(c.c_q);
    if (use_g_) put(c.c_g);
    return x;
  }

  DualCertificate unpack(const Vector& x) const {
    DualCertificate c = DualCertificate::zero(r_);
    Eigen::Index o = 0;
    auto get = [&](Matrix& m) {
      m = Eigen::Map<const Matrix>(x.data() + o, m.rows(), m.cols());
      o += m.size();
    };
    if (use_p_) get(c.c_p);
    if (use_q_) get(c.c_q);
    if (use_g_) get(c.c_g);
    return c;
  }

  // Lift of the squared factors.
  Matrix lift(const DualCertificate& c) const {
    Matrix a = Matrix::Zero(da_, da_);
    if (use_p_) a += c.c_p * c.c_p;
    if (use_q_) a += adjoint_Q(TwoBodyOperator(r_, c.c_q * c.c_q), n_).matrix();
    if (use_g_) a += adjoint_G(GSpaceOperator(r_, c.c_g * c.c_g), n_).matrix();
    return a;
  }

  double operator()(const Vector& x, Vector& grad) const {
    Eigen::Index o = 0;
    auto map = [&](Eigen::Index d) {
      Eigen::Map<const Matrix> m(x.data() + o, d, d);
      o += d * d;
      return m;
    };
    Matrix a = Matrix::Zero(da_, da_);
    const Eigen::Map<const Matrix> cp = use_p_ ? map(da_) : Eigen::Map<const Matrix>(nullptr, 0, 0);
    const Eigen::Map<const Matrix> cq = use_q_ ? map(da_) : Eigen::Map<const Matrix>(nullptr, 0, 0);
    const Eigen::Map<const Matrix> cg = use_g_ ? map(dg_) : Eigen::Map<const Matrix>(nullptr, 0, 0);
    if (use_p_) a.noalias() += cp * cp;
    if (use_q_) a += adjoint_Q(TwoBodyOperator(r_, cq * cq), n_).matrix();
    if (use_g_) a += adjoint_G(GSpaceOperator(r_, cg * cg), n_).matrix();
    const Matrix res = target_ - a;
    const double value = 0.5 * scale_ * res.squaredNorm();

    o = 0;
    auto put_grad = [&](const Matrix& lr, const Eigen::Map<const Matrix>& c) {
      const Eigen::Index d = c.rows();
      Matrix m = lr * c;
      Eigen::Map<Matrix>(grad.data() + o, d, d) = -scale_ * (m + m.transpose());
      o += d * d;
    };
    if (use_p_) put_grad(res, cp);
    if (use_q_) put_grad(apply_Q(TwoBodyOperator(r_, res), n_).matrix(), cq);
    if (use_g_) put_grad(apply_G(TwoBodyOperator(r_, res), n_).matrix(), cg);
    return value;
  }

  const Matrix& target() const { return target_; }
  int r() const { return r_; }
  int n() const { return n_; }
  bool use_p() const { return use_p_; }
  bool use_q() const { return use_q_; }
  bool use_g() const { return use_g_; }
  double scale() const { return scale_; }

 private:
  int r_;
  int n_;
  double scale_;
  bool use_p_, use_q_, use_g_;
  Eigen::Index da_, dg_;
  Matrix target_;
};

ProjectionResult finish(const Objective& obj, DualCertificate cert, int iterations, double grad_norm,
                        const ProjectionOptions& opts, bool exact) {
  const int r = obj.r();
  Matrix a = obj.lift(cert);
  Matrix res = obj.target() - a;
  symmetrize(a);
  symmetrize(res);
  ProjectionResult out{TwoBodyOperator(r, std::move(a)), TwoBodyOperator(r, std::move(res)), 0.0, 0.0,
                       std::move(cert), iterations, grad_norm, exact};
  const double dist = std::sqrt(obj.scale()) * out.residual.matrix().norm();
  if (!std::isfinite(dist)) throw NumericalError("non-finite distance in projection");
  if (dist > opts.distance_floor) {
    out.distance = dist;
    out.derivative = -obj.scale() * out.residual.matrix().trace() / dist;
  }
  return out;
}

}  // namespace

DualCertificate DualCertificate::zero(int r) {
  const int da = r * (r - 1) / 2;
  return DualCertificate{Matrix::Zero(da, da), Matrix::Zero(da, da), Matrix::Zero(r * r, r * r)};
}

int DualCertificate::r() const {
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(c_g.rows()))));
}

DualBlocks DualCertificate::squares() const {
  const int rr = r();
  return DualBlocks{TwoBodyOperator(rr, c_p * c_p), TwoBodyOperator(rr, c_q * c_q), GSpaceOperator(rr, c_g * c_g)};
}

TwoBodyOperator residual(const ReducedHamiltonian& k, double mu, const DualCertificate& cert,
                         const std::vector<Condition>& conditions) {
  TwoBodyOperator out = k.k_matrix - mu * TwoBodyOperator::identity(k.basis.n_spin_orbitals);
  out -= lift_dual(cert.squares(), k.basis.n_electrons, conditions);
  return out;
}

ObjectiveGradient objective_and_gradient(const ReducedHamiltonian& k, double mu, const DualCertificate& cert,
                                         const ProjectionOptions& opts) {
  const Objective obj(k, mu, opts);
  const Vector x = obj.pack(cert);
  Vector g(x.size());
  const double value = obj(x, g);
  return ObjectiveGradient{value, obj.unpack(g)};
}

double default_gradient_tolerance(const ReducedHamiltonian& k) {
  return 1e-7 * std::max(1.0, k.k_matrix.matrix().norm());
}

ProjectionResult project(const ReducedHamiltonian& k, double mu, const DualCertificate* warm,
                         const ProjectionOptions& opts) {
  if (!std::isfinite(mu)) throw NumericalError("projection called with non-finite mu");
  const Objective obj(k, mu, opts);
  const int r = obj.r();
  const int n = obj.n();

  // Closed-form P-only projection: positive part of K - mu.
  DualCertificate cert = DualCertificate::zero(r);
  if (warm && (warm->c_p.rows() != cert.c_p.rows() || warm->c_q.rows() != cert.c_q.rows() ||
               warm->c_g.rows() != cert.c_g.rows())) {
    throw DataError("warm-start certificate has the wrong dimensions");
  }
  const Eig target_eig = eig(obj.target());
  const double spectrum_scale = std::max(1.0, target_eig.values.cwiseAbs().maxCoeff());
  if (obj.use_p()) {
    cert.c_p = spectral(target_eig, [](double l) { return std::sqrt(std::max(l, 0.0)); });
    const Matrix r0 = spectral(target_eig, [](double l) { return std::min(l, 0.0); });
    if (r0.norm() == 0.0) return finish(obj, std::move(cert), 0, 0.0, opts, true);

    // Optimal for the full cone iff L_l(R0) <= 0 for every active l.
    const double kkt_tol = 1e-10 * spectrum_scale;
    const TwoBodyOperator r0_op(r, r0);
    Matrix lq, lg;
    bool optimal = true;
    if (obj.use_q()) {
      lq = apply_Q(r0_op, n).matrix();
      optimal = optimal && eig(lq).values.maxCoeff() <= kkt_tol;
    }
    if (obj.use_g()) {
      lg = apply_G(r0_op, n).matrix();
      optimal = optimal && eig(lg).values.maxCoeff() <= kkt_tol;
    }
    if (optimal) return finish(obj, std::move(cert), 0, 0.0, opts, true);

    if (warm && warm->c_p.isZero(0.0) && warm->c_q.isZero(0.0) && warm->c_g.isZero(0.0)) warm = nullptr;
    if (!warm) {
      // One projected-gradient step in B-space with exact line search, then
      // lift every factor to full rank so no block starts at a stationary
      // point of the factorized objective.
      Matrix pq = Matrix::Zero(obj.use_q() ? lq.rows() : 0, obj.use_q() ? lq.cols() : 0);
      Matrix pg = Matrix::Zero(obj.use_g() ? lg.rows() : 0, obj.use_g() ? lg.cols() : 0);
      Matrix w = Matrix::Zero(r0.rows(), r0.cols());
      if (obj.use_q()) {
        pq = spectral(eig(lq), [](double l) { return std::max(l, 0.0); });
        w += adjoint_Q(TwoBodyOperator(r, pq), n).matrix();
      }
      if (obj.use_g()) {
        pg = spectral(eig(lg), [](double l) { return std::max(l, 0.0); });
        w += adjoint_G(GSpaceOperator(r, pg), n).matrix();
      }
      const double ww = w.squaredNorm();
      // <R0, W> = sum of squared positive eigenvalues of L_l(R0) > 0.
      const double alpha = ww > 0.0 ? std::max(0.0, r0.cwiseProduct(w).sum()) / ww : 0.0;
      const double floor_sq = 1e-4 * spectrum_scale / std::max<Eigen::Index>(1, r0.rows());
      auto root = [&](const Matrix& b) {
        return spectral(eig(b), [&](double l) { return std::sqrt(std::max(l, 0.0) + floor_sq); });
      };
      cert.c_p = spectral(target_eig, [&](double l) { return std::sqrt(std::max(l, 0.0) + floor_sq); });
      if (obj.use_q()) cert.c_q = root(alpha * pq);
      if (obj.use_g()) cert.c_g = root(alpha * pg);
    }
  }
  if (warm) {
    cert = *warm;
  } else if (!obj.use_p()) {
    const double floor_sq = 1e-4 * spectrum_scale / std::max<Eigen::Index>(1, obj.target().rows());
    cert.c_q = std::sqrt(floor_sq) * Matrix::Identity(cert.c_q.rows(), cert.c_q.cols());
    cert.c_g = std::sqrt(floor_sq) * Matrix::Identity(cert.c_g.rows(), cert.c_g.cols());
  }

  LbfgsOptions lo;
  lo.memory = opts.memory;
  lo.gradient_tolerance = opts.gradient_tolerance.value_or(default_gradient_tolerance(k));
  lo.wolfe_c1 = opts.wolfe_c1;
  lo.wolfe_c2 = opts.wolfe_c2;

  // A stationary point of the factorized objective is the projection only if
  // every L_l(R) is negative semidefinite. A rank-deficient factor can stall
  // at a saddle where some L_l(R) keeps a positive eigenvalue; the factor is
  // then extended along that eigenvector and the minimization resumes.
  const double escape_tol = 100.0 * lo.gradient_tolerance;
  constexpr int kMaxEscapes = 8;
  int iterations = 0;
  LbfgsResult run;
  for (int round = 0;; ++round) {
    lo.max_iterations = std::max(0, opts.max_iterations - iterations);
    run = minimize_lbfgs([&](const Vector& x, Vector& g) { return obj(x, g); }, obj.pack(cert), lo);
    iterations += run.iterations;
    if (run.status == LbfgsStatus::NonFinite) throw NumericalError("non-finite objective in projection");
    cert = obj.unpack(run.x);
    symmetrize(cert.c_p);
    symmetrize(cert.c_q);
    symmetrize(cert.c_g);
    if (run.status != LbfgsStatus::Converged || round == kMaxEscapes) break;

    Matrix res = obj.target() - obj.lift(cert);
    symmetrize(res);
    const TwoBodyOperator res_op(r, std::move(res));
    bool escaped = false;
    // lift maps a unit rank-one block v v^T back to pair space.
    auto escape = [&](const Matrix& l_of_r, Matrix& c, auto&& lift) {
      const Eig e = eig(l_of_r);
      const Eigen::Index top = e.values.size() - 1;
      if (!(e.values(top) > escape_tol)) return;
      const Vector v = e.vectors.col(top);
      const Matrix vv = v * v.transpose();
      const double t = e.values(top) / std::max(lift(vv).squaredNorm(), 1e-300);
      c += std::sqrt(t) * vv;
      escaped = true;
    };
    if (obj.use_p()) escape(res_op.matrix(), cert.c_p, [](const Matrix& vv) { return vv; });
    if (obj.use_q()) {
      escape(apply_Q(res_op, n).matrix(), cert.c_q,
             [&](const Matrix& vv) { return adjoint_Q(TwoBodyOperator(r, vv), n).matrix(); });
    }
    if (obj.use_g()) {
      escape(apply_G(res_op, n).matrix(), cert.c_g,
             [&](const Matrix& vv) { return adjoint_G(GSpaceOperator(r, vv), n).matrix(); });
    }
    if (!escaped) break;
  }

  ProjectionResult result = finish(obj, std::move(cert), iterations, run.gradient_norm, opts, false);
  if (run.status != LbfgsStatus::Converged) {
    const std::string why = run.status == LbfgsStatus::MaxIterations ? "iteration limit" : "line-search failure";
    std::ostringstream msg;
    msg << std::setprecision(6) << "projection stopped by " << why << " at mu=" << mu << " (gradient "
        << run.gradient_norm << " > tolerance " << lo.gradient_tolerance << ")";
    throw ProjectionNotConverged(msg.str(),
                                 std::move(result));
  }
  return result;
}

}  // namespace dualrdm
