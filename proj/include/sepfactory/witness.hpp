#pragma once

#include <cstdint>
#include <optional>

#include "sepfactory/bipartite.hpp"

namespace sepfactory {

/// A decomposable witness W = (|phi><phi|)^{T_side} built from the most
/// negative eigenvector phi of rho^{T_side}.
struct WitnessReport {
  BipartiteOperator w;
  Side side = Side::B;
  double value_on_target = 0;  // Tr(W rho) = <phi| rho^{T_side} |phi>
  double pairing_min = 0;      // filled by product_pairing_min
  std::size_t samples = 0;
};

/// Tries T_B first, then T_A. Empty when both partial transposes are PSD within tol.
std::optional<WitnessReport> npt_witness(const BipartiteOperator& rho, double tol = kDefaultPptTol);

/// min over random pure products of <u (x) v| W |u (x) v>. Returns +inf for samples = 0.
double product_pairing_min(const BipartiteOperator& w, std::size_t samples, std::uint64_t seed);

}  // namespace sepfactory
