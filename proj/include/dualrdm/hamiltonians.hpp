#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dualrdm/pairspace.hpp"

namespace dualrdm {

/// Spatial-orbital integrals: h_pq, chemists' (pq|rs), scalar core energy.
struct IntegralSet {
  int n_spatial = 0;
  int n_electrons = 0;
  Matrix h_core;             // n x n, symmetric
  std::vector<double> eri;   // n^4, (pq|rs) at ((p*n+q)*n+r)*n+s, 8-fold symmetric
  double e_core = 0.0;

  /// All-zero integrals for n spatial orbitals.
  static IntegralSet zeros(int n_spatial, int n_electrons);

  double& eri_at(int p, int q, int r, int s) { return eri[eri_offset(p, q, r, s)]; }
  double eri_at(int p, int q, int r, int s) const { return eri[eri_offset(p, q, r, s)]; }

  /// Writes value to (pq|rs) and its seven permutation images.
  void set_eri_symmetric(int p, int q, int r, int s, double value);

  /// Throws DataError unless h is symmetric and (pq|rs) has 8-fold symmetry to tol.
  void check_symmetry(double tol = 1e-12) const;

 private:
  std::size_t eri_offset(int p, int q, int r, int s) const {
    const auto n = static_cast<std::size_t>(n_spatial);
    return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
  }
};

/// Parse FCIDUMP text. Header keys NORB and NELEC are required; MS2, ORBSYM,
/// ISYM and anything else in the namelist are ignored.
IntegralSet load_fcidump(std::istream& in);
IntegralSet load_fcidump(const std::filesystem::path& path);

/// Write FCIDUMP text (unique (pq|rs) with p>=q, r>=s, pq>=rs; h with p>=q).
void write_fcidump(std::ostream& out, const IntegralSet& ints);

/// Spin-orbital integrals. Spin orbital 2p is p-alpha, 2p+1 is p-beta.
struct SpinOrbitalIntegrals {
  BasisSpec basis;
  Matrix one_body;                // r x r
  std::vector<double> antisym;    // r^4, <ij||kl> at ((i*r+j)*r+k)*r+l
  double e_core = 0.0;

  double v(int i, int j, int k, int l) const {
    const auto r = static_cast<std::size_t>(basis.n_spin_orbitals);
    return antisym[((static_cast<std::size_t>(i) * r + j) * r + k) * r + l];
  }
};

SpinOrbitalIntegrals spinify(const IntegralSet& ints);

/// The reduced two-body Hamiltonian K_N on h^h.
struct ReducedHamiltonian {
  TwoBodyOperator k_matrix;
  BasisSpec basis;
  double e_core = 0.0;
  /// Diagonal energy of the Aufbau determinant (includes e_core), when known.
  std::optional<double> aufbau_energy;
};

/// K_N = (h_1 + h_2)/(2(N-1)) + V/2 restricted to h^h. Pair entries:
///   K[(ij),(kl)] = (h_ik d_jl + d_ik h_jl - h_il d_jk - d_il h_jk)/(2(N-1))
///                + <ij||kl>/2
/// so that inner(K_N, Gamma_Psi) + e_core = <Psi|H|Psi> for every N-electron
/// state Psi. Also fills aufbau_energy.
ReducedHamiltonian build_reduced_hamiltonian(const SpinOrbitalIntegrals& ints);

/// Two-site Hubbard model at half filling: 2 spatial sites, N = 2,
/// hopping -t between sites, on-site repulsion U.
IntegralSet hubbard_dimer(double t, double u);

/// Seeded random integrals for property tests.
///
/// r is the spin-orbital count (must be even; r/2 spatial orbitals). h_pq and
/// (pq|rs) are drawn uniformly from [-scale, scale] with Rng (mt19937_64, top
/// 53 bits), visiting unique index tuples in lexicographic order, so the
/// output is bit-identical across platforms for a given seed.
IntegralSet random_two_body(std::uint64_t seed, int r, int n_electrons, double scale = 1.0);

}  // namespace dualrdm
