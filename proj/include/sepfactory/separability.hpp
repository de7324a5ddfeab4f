#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sepfactory/bipartite.hpp"
#include "sepfactory/cholesky.hpp"
#include "sepfactory/types.hpp"

namespace sepfactory {

/// Row k of the operator matrix: X_k and the S_kj for j > k.
struct RowComponent {
  Index k = 0;
  cmat x;
  std::vector<cmat> s_row;  // s_row[m] is S_{k, k+1+m}
  double weight = 0;        // p_k = Tr(C_k^dagger C_k)
};

/// C_k: the operator matrix with every row but k zeroed.
cmat row_operator(const RowComponent& row, Index dim_a);

/// rho * Tr(X^dagger X) = sum_k C_k^dagger C_k. Rows with p_k <= 1e-14 Tr are dropped.
std::vector<RowComponent> row_split(const CholeskyCertificate& cert);

struct JointDiagOptions {
  double tol = kDefaultCommutatorTol;
  int max_retries = 5;
  std::uint64_t seed = 0;
};

struct JointEigenbasis {
  cmat v;              // unitary, column w is e_w
  cmat table;          // table(i, w) = <e_w| S_i |e_w>
  double residual = 0; // max conjugation residual and max ||[S_i, S_j]||_F
  double scale = 1;    // max(1, max_i ||S_i||_op^2)
  int attempts = 0;
};

/// Mixing coefficients, uniform in [1, 2], used by attempt `attempt`.
std::vector<double> joint_diag_coefficients(std::uint64_t seed, int attempt, std::size_t count);

/// Common eigenbasis of a commuting family of normal matrices.
///
/// Each member is split into Hermitian parts (S + S^dagger)/2 and
/// (S - S^dagger)/2i; a random positive combination of all parts is
/// diagonalized, and any eigenspace that stays degenerate is split further
/// by the parts taken one at a time. The result is verified and the mix is
/// redrawn up to max_retries times.
JointEigenbasis joint_diagonalize(std::span<const cmat> family, Index dim, const JointDiagOptions& options = {});

struct ProductTerm {
  double weight = 0;
  cvec a;  // unit vector in C^dimA
  cvec b;  // unit vector in C^dimB
};

struct ProductEnsemble {
  Index dim_a = 0;
  Index dim_b = 0;
  std::vector<ProductTerm> terms;
};

struct EnsembleOptions {
  double tol = kDefaultCommutatorTol;
  double prune_tol = 1e-12;
  std::uint64_t seed = 0;
  int max_retries = 5;
};

/// Explicit pure-product decomposition of the state assembled from a
/// semi-SSPPT certificate. Terms are ordered by row, then by joint
/// eigenvector.
ProductEnsemble extract_ensemble(const CholeskyCertificate& cert, const EnsembleOptions& options = {});

BipartiteOperator reconstruct(const ProductEnsemble& ensemble);

struct DouglasSolution {
  cmat g;
  double residual = 0;  // ||A_root G - B||_F
  double op_norm = 0;   // ||G||_op
};

/// G = pinv(A_root) B; Unsolvable when ran(B) is not inside ran(A_root).
DouglasSolution douglas_solve(const cmat& a_root, const cmat& b, double rank_tol = 1e-10);

struct QubitPathwayOptions {
  double tol = kDefaultCommutatorTol;
  double rank_tol = 1e-10;
  std::uint64_t seed = 0;
};

struct QubitPathwayResult {
  CholeskyCertificate cert;  // in the basis recorded in cert.basis
  ProductEnsemble ensemble;  // in the basis of the input state
};

/// Two-block construction: with rho_11 >= rho_22, S_12 = T S^dagger where
/// sqrt(rho_22) = sqrt(rho_11) S and rho_12 = sqrt(rho_11) T sqrt(rho_22),
/// X_1 = sqrt(rho_11), X_2 = [rho_22 - sqrt(rho_11) S_12^dagger S_12 sqrt(rho_11)]^(1/2).
///
/// Tries rho_11 >= rho_22, then the reversed row order, then (if dimB = 2)
/// the same with the subsystems exchanged. The normality of S_12 is checked,
/// not assumed.
QubitPathwayResult qubit_pathway(const BipartiteOperator& rho, const QubitPathwayOptions& options = {});

}  // namespace sepfactory
