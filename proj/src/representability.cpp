#include "dualrdm/representability.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>

#include "dualrdm/error.hpp"

namespace dualrdm {

namespace {

void require_electrons(int n) {
  if (n < 2) throw DataError("representability maps require N >= 2");
}

// Tensor component T(a,b,c,d) read from a pair matrix.
double tensor(const PairTable& pt, const Matrix& m, int a, int b, int c, int d) {
  const int p = pt.index(a, b);
  const int q = pt.index(c, d);
  if (p < 0 || q < 0) return 0.0;
  return 0.5 * pt.sign(a, b) * pt.sign(c, d) * m(p, q);
}

Matrix one_rdm(const PairTable& pt, const Matrix& m, int n_electrons) {
  const int r = pt.r();
  Matrix g = Matrix::Zero(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      double s = 0.0;
      for (int k = 0; k < r; ++k) s += tensor(pt, m, i, k, j, k);
      g(i, j) = s / (n_electrons - 1);
    }
  return g;
}

// Shared kernel of the Q map and its adjoint (the map is self-adjoint under
// the Frobenius product).
Matrix q_kernel(const PairTable& pt, const Matrix& m, int n_electrons) {
  const Matrix g = one_rdm(pt, m, n_electrons);
  const double trace_term = 2.0 * m.trace() / (static_cast<double>(n_electrons) * (n_electrons - 1));
  Matrix out = m;
  for (int p = 0; p < pt.dim(); ++p) {
    const auto [i1, i2] = pt.pair(p);
    for (int q = 0; q < pt.dim(); ++q) {
      const auto [j1, j2] = pt.pair(q);
      double v = 0.0;
      if (i1 == j1) v -= g(i2, j2);
      if (i2 == j2) v -= g(i1, j1);
      if (i1 == j2) v += g(i2, j1);
      if (i2 == j1) v += g(i1, j2);
      out(p, q) += 2.0 * v;
    }
    out(p, p) += trace_term;
  }
  symmetrize(out);
  return out;
}

}  // namespace

std::vector<Condition> default_conditions() { return {Condition::P, Condition::Q, Condition::G}; }

std::vector<Condition> parse_conditions(const std::string& text) {
  std::vector<Condition> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
    if (tok.empty()) continue;
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0])));
    Condition cond;
    if (tok.size() == 1 && c == 'P') cond = Condition::P;
    else if (tok.size() == 1 && c == 'Q') cond = Condition::Q;
    else if (tok.size() == 1 && c == 'G') cond = Condition::G;
    else throw DataError("unknown condition '" + tok + "' (supported: P, Q, G)");
    if (std::find(out.begin(), out.end(), cond) == out.end()) out.push_back(cond);
  }
  if (out.empty()) throw DataError("empty condition set");
  return out;
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::P: return "P";
    case Condition::Q: return "Q";
    case Condition::G: return "G";
  }
  return "?";
}

OneBodyOperator contract_to_1rdm(const TwoBodyOperator& gamma2, int n_electrons) {
  require_electrons(n_electrons);
  const PairTable pt(gamma2.r());
  return OneBodyOperator(one_rdm(pt, gamma2.matrix(), n_electrons));
}

TwoBodyOperator apply_P(const TwoBodyOperator& gamma2) { return gamma2; }

TwoBodyOperator apply_Q(const TwoBodyOperator& gamma2, int n_electrons) {
  require_electrons(n_electrons);
  const PairTable pt(gamma2.r());
  return TwoBodyOperator(gamma2.r(), q_kernel(pt, gamma2.matrix(), n_electrons));
}

GSpaceOperator apply_G(const TwoBodyOperator& gamma2, int n_electrons) {
  require_electrons(n_electrons);
  const int r = gamma2.r();
  const PairTable pt(r);
  const Matrix& m = gamma2.matrix();
  const Matrix g = one_rdm(pt, m, n_electrons);
  Matrix out(r * r, r * r);
  for (int i1 = 0; i1 < r; ++i1)
    for (int i2 = 0; i2 < r; ++i2)
      for (int j1 = 0; j1 < r; ++j1)
        for (int j2 = 0; j2 < r; ++j2) {
          double v = -tensor(pt, m, i1, j2, j1, i2);
          if (i1 == j1) v += g(i2, j2);
          out(i1 * r + i2, j1 * r + j2) = v;
        }
  symmetrize(out);
  return GSpaceOperator(r, std::move(out));
}

TwoBodyOperator adjoint_P(const TwoBodyOperator& b) { return b; }

TwoBodyOperator adjoint_Q(const TwoBodyOperator& b, int n_electrons) {
  require_electrons(n_electrons);
  const PairTable pt(b.r());
  return TwoBodyOperator(b.r(), q_kernel(pt, b.matrix(), n_electrons));
}

TwoBodyOperator adjoint_G(const GSpaceOperator& b, int n_electrons) {
  require_electrons(n_electrons);
  const int r = b.r();
  const PairTable pt(r);
  const Matrix& g = b.matrix();
  // <L_G(Gamma), B> = sum_T Gamma(a,b,c,d) X(a,b,c,d) with
  //   X(a,b,c,d) = -B[(a,d),(c,b)] + d_{bd} eta_{ac}/(N-1),
  //   eta_{ac}   = sum_k B[(k,a),(k,c)].
  // The adjoint is the antisymmetric part of X in pair form.
  Matrix eta = Matrix::Zero(r, r);
  for (int a = 0; a < r; ++a)
    for (int c = 0; c < r; ++c)
      for (int k = 0; k < r; ++k) eta(a, c) += g(k * r + a, k * r + c);
  eta /= (n_electrons - 1);
  auto x = [&](int a, int bb, int c, int d) {
    double v = -g(a * r + d, c * r + bb);
    if (bb == d) v += eta(a, c);
    return v;
  };
  Matrix out(pt.dim(), pt.dim());
  for (int p = 0; p < pt.dim(); ++p) {
    const auto [a, bb] = pt.pair(p);
    for (int q = 0; q < pt.dim(); ++q) {
      const auto [c, d] = pt.pair(q);
      out(p, q) = 0.5 * (x(a, bb, c, d) - x(bb, a, c, d) - x(a, bb, d, c) + x(bb, a, d, c));
    }
  }
  symmetrize(out);
  return TwoBodyOperator(r, std::move(out));
}

TwoBodyOperator lift_dual(const DualBlocks& blocks, int n_electrons, const std::vector<Condition>& conditions) {
  TwoBodyOperator out = TwoBodyOperator::zero(blocks.b_p.r());
  for (Condition c : conditions) {
    switch (c) {
      case Condition::P: out += adjoint_P(blocks.b_p); break;
      case Condition::Q: out += adjoint_Q(blocks.b_q, n_electrons); break;
      case Condition::G: out += adjoint_G(blocks.b_g, n_electrons); break;
    }
  }
  return out;
}

}  // namespace dualrdm
