#include "sepfactory/witness.hpp"

#include <algorithm>
#include <limits>

#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"
#include "sepfactory/rng.hpp"

namespace sepfactory {

std::optional<WitnessReport> npt_witness(const BipartiteOperator& rho, double tol) {
  for (Side side : {Side::B, Side::A}) {
    const auto spec = hermitian_eig(partial_transpose(rho, side).matrix());
    const Index last = spec.values.size() - 1;
    if (spec.values(last) >= -tol) continue;
    const cvec phi = spec.vectors.col(last);
    const BipartiteOperator projector(rho.dim_a(), rho.dim_b(), phi * phi.adjoint());
    WitnessReport report{partial_transpose(projector, side), side, spec.values(last), 0.0, 0};
    return report;
  }
  return std::nullopt;
}

double product_pairing_min(const BipartiteOperator& w, std::size_t samples, std::uint64_t seed) {
  if (hermiticity_defect(w.matrix()) > 1e-12 * std::max(1.0, w.matrix().norm()))
    throw Error(ErrorCode::NotHermitian, "product_pairing_min: witness is not Hermitian");
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < samples; ++n) {
    const cvec psi = kron(rng.unit_vector(w.dim_a()), rng.unit_vector(w.dim_b()));
    best = std::min(best, psi.dot(w.matrix() * psi).real());
  }
  return best;
}

}  // namespace sepfactory
