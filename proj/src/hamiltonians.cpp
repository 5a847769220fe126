#include "dualrdm/hamiltonians.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>

#include "dualrdm/error.hpp"
#include "dualrdm/fci.hpp"
#include "dualrdm/random.hpp"

namespace dualrdm {

namespace {

std::array<std::array<int, 4>, 8> eri_images(int p, int q, int r, int s) {
  return {{{p, q, r, s}, {q, p, r, s}, {p, q, s, r}, {q, p, s, r},
           {r, s, p, q}, {s, r, p, q}, {r, s, q, p}, {s, r, q, p}}};
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::optional<int> header_int(const std::string& header, const std::string& key) {
  const std::regex re("(^|[^A-Z0-9_])" + key + "\\s*=\\s*([-+]?\\d+)");
  std::smatch m;
  if (std::regex_search(header, m, re)) return std::stoi(m[2].str());
  return std::nullopt;
}

bool header_done(const std::string& line) {
  const std::string u = upper(line);
  if (u.find("&END") != std::string::npos || u.find("$END") != std::string::npos) return true;
  const auto first = u.find_first_not_of(" \t\r");
  const auto last = u.find_last_not_of(" \t\r");
  return first != std::string::npos && (u[first] == '/' || u[last] == '/');
}

double parse_value(std::string token, int line) {
  std::replace(token.begin(), token.end(), 'D', 'E');
  std::replace(token.begin(), token.end(), 'd', 'e');
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("non-numeric value '" + token + "'", line);
  }
}

int parse_index(const std::string& token, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("non-integer index '" + token + "'", line);
  }
}

}  // namespace

IntegralSet IntegralSet::zeros(int n_spatial, int n_electrons) {
  IntegralSet s;
  s.n_spatial = n_spatial;
  s.n_electrons = n_electrons;
  s.h_core = Matrix::Zero(n_spatial, n_spatial);
  const auto n = static_cast<std::size_t>(n_spatial);
  s.eri.assign(n * n * n * n, 0.0);
  return s;
}

void IntegralSet::set_eri_symmetric(int p, int q, int r, int s, double value) {
  for (const auto& [a, b, c, d] : eri_images(p, q, r, s)) eri_at(a, b, c, d) = value;
}

void IntegralSet::check_symmetry(double tol) const {
  const int n = n_spatial;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (std::abs(h_core(p, q) - h_core(q, p)) > tol) throw DataError("h_core is not symmetric");
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = eri_at(p, q, r, s);
          for (const auto& [a, b, c, d] : eri_images(p, q, r, s)) {
            if (std::abs(eri_at(a, b, c, d) - v) > tol) {
              throw DataError("two-electron integrals violate 8-fold permutational symmetry");
            }
          }
        }
}

IntegralSet load_fcidump(std::istream& in) {
  std::string header;
  std::string line;
  int line_no = 0;
  bool in_header = false;
  bool closed = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!in_header) {
      if (upper(line).find("&FCI") == std::string::npos) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("expected '&FCI' namelist header", line_no);
      }
      in_header = true;
    }
    header += upper(line) + " ";
    if (header_done(line)) {
      closed = true;
      break;
    }
  }
  if (!in_header) throw ParseError("empty FCIDUMP: no '&FCI' header");
  if (!closed) throw ParseError("unterminated FCIDUMP namelist header", line_no);

  const auto norb = header_int(header, "NORB");
  const auto nelec = header_int(header, "NELEC");
  if (!norb) throw ParseError("FCIDUMP header is missing NORB");
  if (!nelec) throw ParseError("FCIDUMP header is missing NELEC");
  if (*norb <= 0) throw ParseError("NORB must be positive");
  if (*nelec <= 0) throw ParseError("NELEC must be positive");

  IntegralSet ints = IntegralSet::zeros(*norb, *nelec);
  const int n = *norb;
  const auto nn = static_cast<std::size_t>(n);
  std::vector<char> eri_seen(nn * nn * nn * nn, 0);
  std::vector<char> h_seen(nn * nn, 0);
  bool core_seen = false;
  constexpr double kDuplicateTol = 1e-10;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 5) throw ParseError("expected 'value p q r s'", line_no);
    const double v = parse_value(tok[0], line_no);
    const int p = parse_index(tok[1], line_no);
    const int q = parse_index(tok[2], line_no);
    const int r = parse_index(tok[3], line_no);
    const int s = parse_index(tok[4], line_no);
    for (int idx : {p, q, r, s}) {
      if (idx < 0 || idx > n) throw ParseError("orbital index out of range 0.." + std::to_string(n), line_no);
    }
    if (p == 0 && q == 0 && r == 0 && s == 0) {
      if (core_seen && std::abs(ints.e_core - v) > kDuplicateTol) {
        throw DataError("conflicting core energy entries (line " + std::to_string(line_no) + ")");
      }
      ints.e_core = v;
      core_seen = true;
    } else if (p != 0 && q != 0 && r == 0 && s == 0) {
      const int a = p - 1, b = q - 1;
      for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
        const auto off = static_cast<std::size_t>(x) * nn + static_cast<std::size_t>(y);
        if (h_seen[off] && std::abs(ints.h_core(x, y) - v) > kDuplicateTol) {
          throw DataError("conflicting one-body entries for h(" + std::to_string(p) + "," + std::to_string(q) +
                          ") (line " + std::to_string(line_no) + ")");
        }
        h_seen[off] = 1;
        ints.h_core(x, y) = v;
      }
    } else if (p != 0 && q != 0 && r != 0 && s != 0) {
      for (const auto& [a, b, c, d] : eri_images(p - 1, q - 1, r - 1, s - 1)) {
        const auto off = ((static_cast<std::size_t>(a) * nn + b) * nn + c) * nn + d;
        if (eri_seen[off] && std::abs(ints.eri[off] - v) > kDuplicateTol) {
          throw DataError("symmetry-violating duplicate two-electron entry (" + std::to_string(p) + " " +
                          std::to_string(q) + "|" + std::to_string(r) + " " + std::to_string(s) + ") (line " +
                          std::to_string(line_no) + ")");
        }
        eri_seen[off] = 1;
        ints.eri[off] = v;
      }
    } else {
      throw ParseError("invalid index pattern " + tok[1] + " " + tok[2] + " " + tok[3] + " " + tok[4], line_no);
    }
  }
  ints.check_symmetry(1e-12);
  return ints;
}

IntegralSet load_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open FCIDUMP file '" + path.string() + "'");
  return load_fcidump(in);
}

void write_fcidump(std::ostream& out, const IntegralSet& ints) {
  const int n = ints.n_spatial;
  out << "&FCI NORB=" << n << ",NELEC=" << ints.n_electrons << ",MS2=0,\n ORBSYM=";
  for (int i = 0; i < n; ++i) out << "1,";
  out << "\n ISYM=1,\n&END\n";
  out << std::setprecision(17) << std::scientific;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s <= r; ++s) {
          if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
          const double v = ints.eri_at(p, q, r, s);
          if (v != 0.0) out << v << ' ' << p + 1 << ' ' << q + 1 << ' ' << r + 1 << ' ' << s + 1 << '\n';
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      if (ints.h_core(p, q) != 0.0) out << ints.h_core(p, q) << ' ' << p + 1 << ' ' << q + 1 << " 0 0\n";
  out << ints.e_core << " 0 0 0 0\n";
}

SpinOrbitalIntegrals spinify(const IntegralSet& ints) {
  const int n = ints.n_spatial;
  const int r = 2 * n;
  SpinOrbitalIntegrals out;
  out.basis = BasisSpec::make(r, ints.n_electrons);
  out.e_core = ints.e_core;
  out.one_body = Matrix::Zero(r, r);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int s = 0; s < 2; ++s) out.one_body(2 * p + s, 2 * q + s) = ints.h_core(p, q);

  // <ij|kl> = (ik|jl) when spin(i)=spin(k) and spin(j)=spin(l).
  auto coulomb = [&](int i, int j, int k, int l) {
    if ((i & 1) != (k & 1) || (j & 1) != (l & 1)) return 0.0;
    return ints.eri_at(i >> 1, k >> 1, j >> 1, l >> 1);
  };
  const auto ur = static_cast<std::size_t>(r);
  out.antisym.assign(ur * ur * ur * ur, 0.0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l)
          out.antisym[((static_cast<std::size_t>(i) * ur + j) * ur + k) * ur + l] =
              coulomb(i, j, k, l) - coulomb(i, j, l, k);
  return out;
}

ReducedHamiltonian build_reduced_hamiltonian(const SpinOrbitalIntegrals& ints) {
  const int r = ints.basis.n_spin_orbitals;
  const int nel = ints.basis.n_electrons;
  if (nel < 2) throw DataError("reduced Hamiltonian requires N >= 2");
  const PairTable pt(r);
  const Matrix& h = ints.one_body;
  const double w1 = 1.0 / (2.0 * (nel - 1));
  Matrix k(pt.dim(), pt.dim());
  for (int p = 0; p < pt.dim(); ++p) {
    const auto [i, j] = pt.pair(p);
    for (int q = 0; q < pt.dim(); ++q) {
      const auto [a, b] = pt.pair(q);
      double one = 0.0;
      if (j == b) one += h(i, a);
      if (i == a) one += h(j, b);
      if (j == a) one -= h(i, b);
      if (i == b) one -= h(j, a);
      k(p, q) = w1 * one + 0.5 * ints.v(i, j, a, b);
    }
  }
  symmetrize(k);
  if (!k.allFinite()) throw NumericalError("reduced Hamiltonian has non-finite entries");
  ReducedHamiltonian out{TwoBodyOperator(r, std::move(k)), ints.basis, ints.e_core, std::nullopt};
  out.aufbau_energy = aufbau_diagonal(ints);
  return out;
}

IntegralSet hubbard_dimer(double t, double u) {
  if (!(t > 0.0)) throw DataError("hubbard_dimer requires t > 0");
  if (!(u >= 0.0)) throw DataError("hubbard_dimer requires U >= 0");
  IntegralSet ints = IntegralSet::zeros(2, 2);
  ints.h_core(0, 1) = ints.h_core(1, 0) = -t;
  ints.eri_at(0, 0, 0, 0) = u;
  ints.eri_at(1, 1, 1, 1) = u;
  return ints;
}

IntegralSet random_two_body(std::uint64_t seed, int r, int n_electrons, double scale) {
  if (r % 2 != 0) throw DataError("random_two_body requires an even spin-orbital count");
  BasisSpec::make(r, n_electrons);
  const int n = r / 2;
  IntegralSet ints = IntegralSet::zeros(n, n_electrons);
  Rng rng(seed);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) {
      const double v = scale * rng.uniform(-1.0, 1.0);
      ints.h_core(p, q) = ints.h_core(q, p) = v;
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= a; ++b) {
          if (p * (p + 1) / 2 + q < a * (a + 1) / 2 + b) continue;
          ints.set_eri_symmetric(p, q, a, b, scale * rng.uniform(-1.0, 1.0));
        }
  return ints;
}

}  // namespace dualrdm
