#pragma once

// Operators on the one-body space h, the antisymmetric pair space h^h and the
// tensor pair space h(x)h.
//
// Conventions used throughout the library:
//  * r spin orbitals, N electrons.
//  * A TwoBodyOperator is stored as its matrix on the orthonormal pair basis
//    |ij> = (e_i(x)e_j - e_j(x)e_i)/sqrt(2), i < j, enumerated
//    lexicographically. Its antisymmetric tensor components are
//    T(i,j,k,l) = <e_i(x)e_j| A |e_k(x)e_l>, so the pair entry
//    M[(ij),(kl)] equals 2 T(i,j,k,l).
//  * With that basis the full tensor trace sum_{ij} T(i,j,i,j) equals the
//    matrix trace, and the tensor Frobenius product equals the matrix
//    Frobenius product. The convention factor is therefore 1.
//  * A GSpaceOperator lives on h(x)h with basis index (i,j) -> i*r + j.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dualrdm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tensor-convention factor relating pair-matrix traces/products to full
/// tensor sums. Fixed by the orthonormal pair basis.
inline constexpr double kConventionFactor = 1.0;

struct BasisSpec {
  int n_spin_orbitals = 0;  // r
  int n_electrons = 0;      // N

  /// Validated constructor; requires 2 <= N <= r.
  static BasisSpec make(int n_spin_orbitals, int n_electrons);

  int pair_dim() const { return n_spin_orbitals * (n_spin_orbitals - 1) / 2; }
  int tensor_dim() const { return n_spin_orbitals * n_spin_orbitals; }

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

/// Index of the pair (i, j), i < j, in the lexicographic enumeration of h^h.
int pair_index(int i, int j, int r);

/// Inverse of pair_index.
std::pair<int, int> pair_from_index(int index, int r);

/// Precomputed pair bookkeeping for one orbital count; used by hot loops.
class PairTable {
 public:
  explicit PairTable(int r);

  int r() const { return r_; }
  int dim() const { return static_cast<int>(pairs_.size()); }

  /// Pair index of the unordered pair {i, j}; -1 when i == j.
  int index(int i, int j) const { return lookup_[static_cast<std::size_t>(i * r_ + j)]; }
  /// +1 for i < j, -1 for i > j, 0 for i == j.
  double sign(int i, int j) const { return i < j ? 1.0 : (i > j ? -1.0 : 0.0); }
  const std::pair<int, int>& pair(int p) const { return pairs_[static_cast<std::size_t>(p)]; }

 private:
  int r_;
  std::vector<int> lookup_;
  std::vector<std::pair<int, int>> pairs_;
};

/// Real symmetric r x r matrix.
class OneBodyOperator {
 public:
  OneBodyOperator() = default;
  explicit OneBodyOperator(Matrix entries);

  static OneBodyOperator zero(int r) { return OneBodyOperator(Matrix::Zero(r, r)); }

  int r() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

/// Self-adjoint operator on h^h (see the file comment for the convention).
class TwoBodyOperator {
 public:
  TwoBodyOperator() = default;
  /// Takes ownership of a d_A x d_A matrix. Symmetry is not checked here;
  /// use from_matrix for untrusted input.
  TwoBodyOperator(int r, Matrix entries);

  static TwoBodyOperator zero(int r);
  static TwoBodyOperator identity(int r);
  /// Checked constructor: dimension must match r and the matrix must be
  /// symmetric to 1e-12 (relative to its largest entry).
  static TwoBodyOperator from_matrix(int r, const Matrix& entries);
  /// Builds from full tensor components T(i,j,k,l) stored row-major in an
  /// r^4 array. Only the i<j, k<l block is read.
  static TwoBodyOperator from_tensor(int r, std::span<const double> tensor);

  int r() const { return r_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }

  /// Tensor component T(i,j,k,l) (antisymmetric in i<->j and in k<->l).
  double component(int i, int j, int k, int l) const;
  /// All r^4 tensor components, row-major.
  std::vector<double> to_tensor() const;

  TwoBodyOperator& operator+=(const TwoBodyOperator& o);
  TwoBodyOperator& operator-=(const TwoBodyOperator& o);
  TwoBodyOperator& operator*=(double s);
  friend TwoBodyOperator operator+(TwoBodyOperator a, const TwoBodyOperator& b) { return a += b; }
  friend TwoBodyOperator operator-(TwoBodyOperator a, const TwoBodyOperator& b) { return a -= b; }
  friend TwoBodyOperator operator*(double s, TwoBodyOperator a) { return a *= s; }

 private:
  int r_ = 0;
  Matrix m_;
};

/// Self-adjoint operator on h(x)h, basis index (i,j) -> i*r + j.
class GSpaceOperator {
 public:
  GSpaceOperator() = default;
  GSpaceOperator(int r, Matrix entries);

  static GSpaceOperator zero(int r);

  int r() const { return r_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  double operator()(int i1, int i2, int j1, int j2) const { return m_(i1 * r_ + i2, j1 * r_ + j2); }

 private:
  int r_ = 0;
  Matrix m_;
};

/// Frobenius product on the pair matrix (times kConventionFactor).
double inner(const TwoBodyOperator& a, const TwoBodyOperator& b);
double inner(const GSpaceOperator& a, const GSpaceOperator& b);
double norm(const TwoBodyOperator& a);
double norm(const GSpaceOperator& a);

/// Full tensor trace sum_{ij} T(i,j,i,j).
double tensor_trace(const TwoBodyOperator& a);

/// Smallest eigenvalue of a symmetric matrix.
///
/// Uses a dense symmetric QR solve, which is accurate to roughly
/// 1e-15 * ||A||, well inside the 1e-10 contract. Throws NumericalError if the
/// solver does not converge.
double min_eigenvalue(const Matrix& a);
double min_eigenvalue(const TwoBodyOperator& a);
double min_eigenvalue(const GSpaceOperator& a);

/// Symmetric part (A + A^T)/2, in place.
void symmetrize(Matrix& a);

}  // namespace dualrdm
