#include "dualrdm/pairspace.hpp"

#include <cmath>
#include <string>

#include "dualrdm/error.hpp"

namespace dualrdm {

BasisSpec BasisSpec::make(int n_spin_orbitals, int n_electrons) {
  if (n_electrons < 2 || n_electrons > n_spin_orbitals) {
    throw DataError("basis requires 2 <= N <= r, got N=" + std::to_string(n_electrons) +
                    ", r=" + std::to_string(n_spin_orbitals));
  }
  return BasisSpec{n_spin_orbitals, n_electrons};
}

int pair_index(int i, int j, int r) {
  if (i < 0 || j >= r || i >= j) {
    throw IndexError("invalid pair (" + std::to_string(i) + "," + std::to_string(j) +
                     ") for r=" + std::to_string(r));
  }
  // Pairs with first index < i: sum_{a<i} (r-1-a).
  return i * (2 * r - i - 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_from_index(int index, int r) {
  if (index < 0 || index >= r * (r - 1) / 2) {
    throw IndexError("pair index " + std::to_string(index) + " out of range for r=" + std::to_string(r));
  }
  int i = 0;
  int row = r - 1;
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + index};
}

PairTable::PairTable(int r) : r_(r), lookup_(static_cast<std::size_t>(r * r), -1) {
  pairs_.reserve(static_cast<std::size_t>(r * (r - 1) / 2));
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      const int p = static_cast<int>(pairs_.size());
      pairs_.emplace_back(i, j);
      lookup_[static_cast<std::size_t>(i * r + j)] = p;
      lookup_[static_cast<std::size_t>(j * r + i)] = p;
    }
  }
}

OneBodyOperator::OneBodyOperator(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) throw DataError("one-body operator must be square");
}

TwoBodyOperator::TwoBodyOperator(int r, Matrix entries) : r_(r), m_(std::move(entries)) {
  const Eigen::Index d = r * (r - 1) / 2;
  if (m_.rows() != d || m_.cols() != d) {
    throw DataError("two-body matrix has shape " + std::to_string(m_.rows()) + "x" +
                    std::to_string(m_.cols()) + ", expected " + std::to_string(d));
  }
}

TwoBodyOperator TwoBodyOperator::zero(int r) {
  const int d = r * (r - 1) / 2;
  return TwoBodyOperator(r, Matrix::Zero(d, d));
}

TwoBodyOperator TwoBodyOperator::identity(int r) {
  const int d = r * (r - 1) / 2;
  return TwoBodyOperator(r, Matrix::Identity(d, d));
}

TwoBodyOperator TwoBodyOperator::from_matrix(int r, const Matrix& entries) {
  TwoBodyOperator op(r, entries);
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DataError("two-body matrix is not symmetric");
  }
  return op;
}

TwoBodyOperator TwoBodyOperator::from_tensor(int r, std::span<const double> tensor) {
  const std::size_t ur = static_cast<std::size_t>(r);
  if (tensor.size() != ur * ur * ur * ur) throw DataError("tensor must have r^4 entries");
  const PairTable pt(r);
  Matrix m(pt.dim(), pt.dim());
  for (int p = 0; p < pt.dim(); ++p) {
    const auto [i, j] = pt.pair(p);
    for (int q = 0; q < pt.dim(); ++q) {
      const auto [k, l] = pt.pair(q);
      m(p, q) = 2.0 * tensor[((static_cast<std::size_t>(i) * ur + j) * ur + k) * ur + l];
    }
  }
  return TwoBodyOperator(r, std::move(m));
}

double TwoBodyOperator::component(int i, int j, int k, int l) const {
  if (i == j || k == l) return 0.0;
  const double s = (i < j ? 1.0 : -1.0) * (k < l ? 1.0 : -1.0);
  const int p = i < j ? pair_index(i, j, r_) : pair_index(j, i, r_);
  const int q = k < l ? pair_index(k, l, r_) : pair_index(l, k, r_);
  return 0.5 * s * m_(p, q);
}

std::vector<double> TwoBodyOperator::to_tensor() const {
  const std::size_t ur = static_cast<std::size_t>(r_);
  std::vector<double> t(ur * ur * ur * ur, 0.0);
  const PairTable pt(r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < r_; ++j) {
      const int p = pt.index(i, j);
      if (p < 0) continue;
      for (int k = 0; k < r_; ++k)
        for (int l = 0; l < r_; ++l) {
          const int q = pt.index(k, l);
          if (q < 0) continue;
          t[((static_cast<std::size_t>(i) * ur + j) * ur + k) * ur + l] =
              0.5 * pt.sign(i, j) * pt.sign(k, l) * m_(p, q);
        }
    }
  return t;
}

TwoBodyOperator& TwoBodyOperator::operator+=(const TwoBodyOperator& o) {
  if (o.r_ != r_) throw DataError("two-body operator dimension mismatch");
  m_ += o.m_;
  return *this;
}

TwoBodyOperator& TwoBodyOperator::operator-=(const TwoBodyOperator& o) {
  if (o.r_ != r_) throw DataError("two-body operator dimension mismatch");
  m_ -= o.m_;
  return *this;
}

TwoBodyOperator& TwoBodyOperator::operator*=(double s) {
  m_ *= s;
  return *this;
}

GSpaceOperator::GSpaceOperator(int r, Matrix entries) : r_(r), m_(std::move(entries)) {
  if (m_.rows() != r * r || m_.cols() != r * r) throw DataError("G-space matrix must be r^2 x r^2");
}

GSpaceOperator GSpaceOperator::zero(int r) { return GSpaceOperator(r, Matrix::Zero(r * r, r * r)); }

double inner(const TwoBodyOperator& a, const TwoBodyOperator& b) {
  if (a.r() != b.r()) throw DataError("inner: dimension mismatch");
  return kConventionFactor * a.matrix().cwiseProduct(b.matrix()).sum();
}

double inner(const GSpaceOperator& a, const GSpaceOperator& b) {
  if (a.r() != b.r()) throw DataError("inner: dimension mismatch");
  return a.matrix().cwiseProduct(b.matrix()).sum();
}

double norm(const TwoBodyOperator& a) { return std::sqrt(inner(a, a)); }
double norm(const GSpaceOperator& a) { return std::sqrt(inner(a, a)); }

double tensor_trace(const TwoBodyOperator& a) { return kConventionFactor * a.matrix().trace(); }

double min_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) throw DataError("min_eigenvalue of an empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge (dimension " + std::to_string(a.rows()) + ")");
  }
  return es.eigenvalues()(0);
}

double min_eigenvalue(const TwoBodyOperator& a) { return min_eigenvalue(a.matrix()); }
double min_eigenvalue(const GSpaceOperator& a) { return min_eigenvalue(a.matrix()); }

void symmetrize(Matrix& a) {
  a = 0.5 * (a + a.transpose()).eval();
}

}  // namespace dualrdm
