#include "dualrdm/fci.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "dualrdm/error.hpp"

namespace dualrdm {

namespace {

Determinant bit(int p) { return Determinant{1} << p; }

std::vector<int> occupied(Determinant d) {
  std::vector<int> occ;
  while (d) {
    occ.push_back(std::countr_zero(d));
    d &= d - 1;
  }
  return occ;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

void fix_sign(Vector& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
}

}  // namespace

DeterminantBasis::DeterminantBasis(BasisSpec basis, std::vector<Determinant> dets)
    : basis_(basis), dets_(std::move(dets)) {
  index_.reserve(dets_.size());
  for (std::size_t i = 0; i < dets_.size(); ++i) index_.emplace(dets_[i], static_cast<long>(i));
}

long DeterminantBasis::find(Determinant det) const {
  const auto it = index_.find(det);
  return it == index_.end() ? -1 : it->second;
}

DeterminantBasis enumerate_basis(const BasisSpec& basis, std::size_t cap) {
  const int r = basis.n_spin_orbitals;
  const int n = basis.n_electrons;
  if (r > 64) throw DataError("determinant bitmasks support at most 64 spin orbitals");
  const double count = binomial(r, n);
  if (count > static_cast<double>(cap)) {
    throw DataError("determinant space binomial(" + std::to_string(r) + "," + std::to_string(n) + ") = " +
                    std::to_string(static_cast<long long>(count)) + " exceeds cap " + std::to_string(cap) +
                    "; use a smaller system");
  }
  std::vector<Determinant> dets;
  dets.reserve(static_cast<std::size_t>(count));
  std::vector<int> occ(static_cast<std::size_t>(n));
  std::iota(occ.begin(), occ.end(), 0);
  while (true) {
    Determinant d = 0;
    for (int p : occ) d |= bit(p);
    dets.push_back(d);
    int i = n - 1;
    while (i >= 0 && occ[static_cast<std::size_t>(i)] == r - n + i) --i;
    if (i < 0) break;
    ++occ[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) occ[static_cast<std::size_t>(j)] = occ[static_cast<std::size_t>(j - 1)] + 1;
  }
  return DeterminantBasis(basis, std::move(dets));
}

int annihilate(Determinant& det, int p) {
  if (!(det & bit(p))) return 0;
  const int below = std::popcount(det & (bit(p) - 1));
  det ^= bit(p);
  return (below & 1) ? -1 : 1;
}

int create(Determinant& det, int p) {
  if (det & bit(p)) return 0;
  const int below = std::popcount(det & (bit(p) - 1));
  det |= bit(p);
  return (below & 1) ? -1 : 1;
}

double slater_condon(Determinant bra, Determinant ket, const SpinOrbitalIntegrals& ints) {
  const Determinant diff = bra ^ ket;
  const int level = std::popcount(diff) / 2;
  const Matrix& h = ints.one_body;
  if (level == 0) {
    const auto occ = occupied(ket);
    double e = ints.e_core;
    for (int i : occ) e += h(i, i);
    for (std::size_t a = 0; a < occ.size(); ++a)
      for (std::size_t b = a + 1; b < occ.size(); ++b) e += ints.v(occ[a], occ[b], occ[a], occ[b]);
    return e;
  }
  if (level == 1) {
    const int i = std::countr_zero(ket & diff);  // removed from ket
    const int a = std::countr_zero(bra & diff);  // added in bra
    Determinant d = ket;
    int sign = annihilate(d, i);
    sign *= create(d, a);
    double e = h(a, i);
    for (int k : occupied(ket & bra)) e += ints.v(a, k, i, k);
    return sign * e;
  }
  if (level == 2) {
    const auto holes = occupied(ket & diff);
    const auto parts = occupied(bra & diff);
    const int i = holes[0], j = holes[1], a = parts[0], b = parts[1];
    // a+_a a+_b a_j a_i |ket>
    Determinant d = ket;
    int sign = annihilate(d, i);
    sign *= annihilate(d, j);
    sign *= create(d, b);
    sign *= create(d, a);
    return sign * ints.v(a, b, i, j);
  }
  return 0.0;
}

namespace {

// Calls emit(row, col, value) for every nonzero <dets[row]|H|dets[col]>, col
// ranging over singles and doubles of dets[row] plus the diagonal.
template <typename Emit>
void for_each_element(const DeterminantBasis& dets, const SpinOrbitalIntegrals& ints, Emit&& emit) {
  const int r = dets.basis().n_spin_orbitals;
  for (std::size_t row = 0; row < dets.size(); ++row) {
    const Determinant ket = dets[row];
    emit(row, row, slater_condon(ket, ket, ints));
    const auto occ = occupied(ket);
    std::vector<int> virt;
    for (int p = 0; p < r; ++p)
      if (!(ket & bit(p))) virt.push_back(p);
    for (int i : occ)
      for (int a : virt) {
        const Determinant d = (ket ^ bit(i)) | bit(a);
        const long col = dets.find(d);
        if (col < 0) continue;
        const double v = slater_condon(d, ket, ints);
        if (v != 0.0) emit(row, static_cast<std::size_t>(col), v);
      }
    for (std::size_t x = 0; x < occ.size(); ++x)
      for (std::size_t y = x + 1; y < occ.size(); ++y)
        for (std::size_t u = 0; u < virt.size(); ++u)
          for (std::size_t w = u + 1; w < virt.size(); ++w) {
            const Determinant d = (ket ^ bit(occ[x]) ^ bit(occ[y])) | bit(virt[u]) | bit(virt[w]);
            const long col = dets.find(d);
            if (col < 0) continue;
            const double v = slater_condon(d, ket, ints);
            if (v != 0.0) emit(row, static_cast<std::size_t>(col), v);
          }
  }
}

}  // namespace

Matrix hamiltonian_matrix(const DeterminantBasis& dets, const SpinOrbitalIntegrals& ints) {
  const auto n = static_cast<Eigen::Index>(dets.size());
  Matrix h = Matrix::Zero(n, n);
  for_each_element(dets, ints, [&](std::size_t i, std::size_t j, double v) {
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
  });
  return h;
}

SparseMatrix hamiltonian_sparse(const DeterminantBasis& dets, const SpinOrbitalIntegrals& ints) {
  std::vector<Eigen::Triplet<double>> trips;
  for_each_element(dets, ints, [&](std::size_t i, std::size_t j, double v) {
    trips.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
  });
  const auto n = static_cast<Eigen::Index>(dets.size());
  SparseMatrix h(n, n);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

WaveFunction ground_state(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw NonConvergenceError("dense CI eigensolver did not converge");
  WaveFunction wf{es.eigenvectors().col(0), es.eigenvalues()(0)};
  fix_sign(wf.coefficients);
  return wf;
}

WaveFunction ground_state_lanczos(const SparseMatrix& h, const LanczosOptions& opts) {
  const Eigen::Index n = h.rows();
  if (n == 0) throw DataError("empty Hamiltonian");
  const int m = static_cast<int>(std::min<Eigen::Index>(opts.krylov_dim, n));

  // Start on the lowest diagonal entry, slightly mixed with a fixed ramp so
  // that no symmetry sector is excluded.
  Vector x = Vector::Zero(n);
  {
    Eigen::Index imin = 0;
    Vector diag = h.diagonal();
    diag.minCoeff(&imin);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = 1e-3 * std::sin(1.0 + static_cast<double>(i));
    x(imin) += 1.0;
    x.normalize();
  }

  Matrix basis(n, m);
  double theta = 0.0;
  double resid = 0.0;
  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    Vector alpha = Vector::Zero(m), beta = Vector::Zero(m);
    basis.col(0) = x;
    int k = 0;
    for (; k < m; ++k) {
      Vector w = h * basis.col(k);
      alpha(k) = basis.col(k).dot(w);
      // Full reorthogonalization, applied twice.
      for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
      const double b = w.norm();
      if (k + 1 == m || b < 1e-14) {
        beta(k) = b;
        ++k;
        break;
      }
      beta(k) = b;
      basis.col(k + 1) = w / b;
    }
    Matrix t = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha(i);
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    theta = es.eigenvalues()(0);
    x = basis.leftCols(k) * es.eigenvectors().col(0);
    x.normalize();
    resid = (h * x - theta * x).norm();
    if (resid <= opts.tolerance) {
      fix_sign(x);
      return WaveFunction{x, theta};
    }
  }
  throw NonConvergenceError("Lanczos did not converge after " + std::to_string(opts.max_restarts) +
                            " restarts (residual " + std::to_string(resid) + ")");
}

FciResult solve_fci(const SpinOrbitalIntegrals& ints, std::size_t cap) {
  DeterminantBasis dets = enumerate_basis(ints.basis, cap);
  WaveFunction wf = static_cast<Eigen::Index>(dets.size()) <= kDenseEigenThreshold
                        ? ground_state(hamiltonian_matrix(dets, ints))
                        : ground_state_lanczos(hamiltonian_sparse(dets, ints));
  return FciResult{std::move(dets), std::move(wf)};
}

double expectation(const DeterminantBasis& dets, const SpinOrbitalIntegrals& ints, const Vector& c) {
  double e = 0.0;
  for_each_element(dets, ints, [&](std::size_t i, std::size_t j, double v) {
    e += c(static_cast<Eigen::Index>(i)) * v * c(static_cast<Eigen::Index>(j));
  });
  return e / c.squaredNorm();
}

TwoBodyOperator contract_2rdm(const DeterminantBasis& dets, const Vector& c) {
  const int r = dets.basis().n_spin_orbitals;
  const PairTable pt(r);
  Matrix g = Matrix::Zero(pt.dim(), pt.dim());
  for (std::size_t col = 0; col < dets.size(); ++col) {
    const double cj = c(static_cast<Eigen::Index>(col));
    if (cj == 0.0) continue;
    const Determinant ket = dets[col];
    const auto occ = occupied(ket);
    for (std::size_t x = 0; x < occ.size(); ++x)
      for (std::size_t y = x + 1; y < occ.size(); ++y) {
        // a_s a_r |ket>, r < s
        const int rr = occ[x], ss = occ[y];
        Determinant d = ket;
        int s1 = annihilate(d, rr);
        s1 *= annihilate(d, ss);
        const int q_rs = pt.index(rr, ss);
        for (int p = 0; p < r; ++p) {
          if (d & bit(p)) continue;
          for (int q = p + 1; q < r; ++q) {
            if (d & bit(q)) continue;
            // a+_p a+_q
            Determinant e = d;
            int s2 = create(e, q);
            s2 *= create(e, p);
            const long row = dets.find(e);
            if (row < 0) continue;
            g(pt.index(p, q), q_rs) += 2.0 * s1 * s2 * c(row) * cj;
          }
        }
      }
  }
  g /= c.squaredNorm();
  symmetrize(g);
  return TwoBodyOperator(r, std::move(g));
}

double aufbau_diagonal(const SpinOrbitalIntegrals& ints) {
  const int r = ints.basis.n_spin_orbitals;
  std::vector<int> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ints.one_body(a, a) < ints.one_body(b, b); });
  Determinant d = 0;
  for (int i = 0; i < ints.basis.n_electrons; ++i) d |= bit(order[static_cast<std::size_t>(i)]);
  return slater_condon(d, d, ints);
}

}  // namespace dualrdm
