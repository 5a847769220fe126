#pragma once

#include <vector>

#include "dualrdm/pairspace.hpp"

namespace dualrdm {

/// Linear N-representability conditions L(Gamma) >= 0.
enum class Condition { P, Q, G };

/// Default condition set {P, Q, G}.
std::vector<Condition> default_conditions();
/// Parses "P,Q,G"-style lists (case-insensitive). Throws DataError.
std::vector<Condition> parse_conditions(const std::string& text);
std::string to_string(Condition c);

/// gamma_ij = 1/(N-1) sum_k Gamma(i,k,j,k).
OneBodyOperator contract_to_1rdm(const TwoBodyOperator& gamma2, int n_electrons);

/// P map: the identity.
TwoBodyOperator apply_P(const TwoBodyOperator& gamma2);

/// Q map (hole-hole):
///   Q(i1,i2,j1,j2) = G(i1,i2,j1,j2) - d_{i1j1} g_{i2j2} - d_{i2j2} g_{i1j1}
///                  + d_{i1j2} g_{i2j1} + d_{i2j1} g_{i1j2}
///                  + (d_{i1j1} d_{i2j2} - d_{i1j2} d_{i2j1}) tr(G)/(N(N-1))
/// Homogeneous in Gamma.
TwoBodyOperator apply_Q(const TwoBodyOperator& gamma2, int n_electrons);

/// G map (particle-hole): G(i1,i2,j1,j2) = -Gamma(i1,j2,j1,i2) + d_{i1j1} g_{i2j2}.
GSpaceOperator apply_G(const TwoBodyOperator& gamma2, int n_electrons);

TwoBodyOperator adjoint_P(const TwoBodyOperator& b);
TwoBodyOperator adjoint_Q(const TwoBodyOperator& b, int n_electrons);
TwoBodyOperator adjoint_G(const GSpaceOperator& b, int n_electrons);

/// Dual blocks B_l, one per condition; only the ones named in `conditions`
/// contribute to the lift.
struct DualBlocks {
  TwoBodyOperator b_p;
  TwoBodyOperator b_q;
  GSpaceOperator b_g;
};

/// sum_l L_l^*(B_l) over the listed conditions.
TwoBodyOperator lift_dual(const DualBlocks& blocks, int n_electrons,
                          const std::vector<Condition>& conditions = default_conditions());

}  // namespace dualrdm
