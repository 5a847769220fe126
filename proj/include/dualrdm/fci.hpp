#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "dualrdm/hamiltonians.hpp"
#include "dualrdm/pairspace.hpp"

namespace dualrdm {

using Determinant = std::uint64_t;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr std::size_t kDefaultDeterminantCap = 50000;
inline constexpr Eigen::Index kDenseEigenThreshold = 2000;

/// All N-electron determinants over r spin orbitals as occupation bitmasks,
/// ordered lexicographically by their sorted occupied-orbital lists.
class DeterminantBasis {
 public:
  DeterminantBasis(BasisSpec basis, std::vector<Determinant> dets);

  const BasisSpec& basis() const { return basis_; }
  std::size_t size() const { return dets_.size(); }
  const std::vector<Determinant>& determinants() const { return dets_; }
  Determinant operator[](std::size_t i) const { return dets_[i]; }
  /// Position of det, or -1 if absent.
  long find(Determinant det) const;

 private:
  BasisSpec basis_;
  std::vector<Determinant> dets_;
  std::unordered_map<Determinant, long> index_;
};

/// Throws DataError if binomial(r, N) exceeds cap or r > 64.
DeterminantBasis enumerate_basis(const BasisSpec& basis, std::size_t cap = kDefaultDeterminantCap);

/// Sign and result of applying a_p (annihilate) / a_p^dagger (create).
/// Returns 0 if the operation annihilates the determinant.
int annihilate(Determinant& det, int p);
int create(Determinant& det, int p);

/// Dense CI matrix from Slater-Condon rules.
Matrix hamiltonian_matrix(const DeterminantBasis& dets, const SpinOrbitalIntegrals& ints);
/// Same matrix in sparse row-major storage.
SparseMatrix hamiltonian_sparse(const DeterminantBasis& dets, const SpinOrbitalIntegrals& ints);

/// Slater-Condon matrix element <bra|H|ket>.
double slater_condon(Determinant bra, Determinant ket, const SpinOrbitalIntegrals& ints);

struct WaveFunction {
  Vector coefficients;
  double energy = 0.0;
};

struct LanczosOptions {
  int krylov_dim = 60;
  int max_restarts = 500;
  double tolerance = 1e-10;  // on ||H x - theta x||
};

/// Lowest eigenpair by dense symmetric solve. The coefficient vector is
/// sign-fixed so that its largest-magnitude entry is positive.
WaveFunction ground_state(const Matrix& h);
/// Lowest eigenpair by explicitly restarted Lanczos with full
/// reorthogonalization (matrix-vector products only).
WaveFunction ground_state_lanczos(const SparseMatrix& h, const LanczosOptions& opts = {});

/// Full CI: dense solve up to kDenseEigenThreshold determinants, Lanczos above.
struct FciResult {
  DeterminantBasis basis;
  WaveFunction state;
};
FciResult solve_fci(const SpinOrbitalIntegrals& ints, std::size_t cap = kDefaultDeterminantCap);

/// <psi|H|psi> for a coefficient vector over dets.
double expectation(const DeterminantBasis& dets, const SpinOrbitalIntegrals& ints, const Vector& c);

/// Two-body RDM of a pure state, Gamma = N(N-1) tr_{3..N} |psi><psi|, as a
/// pair-basis operator: entry [(pq),(rs)] = 2 <psi| a+_p a+_q a_s a_r |psi>.
TwoBodyOperator contract_2rdm(const DeterminantBasis& dets, const Vector& c);

/// Diagonal Hamiltonian element of the determinant occupying the N spin
/// orbitals with smallest h_ii (ties broken by index), including e_core.
double aufbau_diagonal(const SpinOrbitalIntegrals& ints);

}  // namespace dualrdm
