#pragma once

#include <map>
#include <utility>
#include <vector>

#include "sepfactory/bipartite.hpp"
#include "sepfactory/types.hpp"

namespace sepfactory {

/// How the certificate's basis relates to the state it was derived from.
struct BasisConvention {
  bool swap_subsystems = false;  // certificate rows index subsystem B
  bool reverse_rows = false;     // row basis of the row subsystem is reversed
};

/// The Cholesky operators of an upper-triangular operator matrix X whose
/// row k reads (0, ..., 0, X_k, S_{k,k+1} X_k, ..., S_{k,n} X_k).
///
/// Indices are 0-based here. S_kk is the identity and never stored; a missing
/// off-diagonal S_ij is the zero operator.
struct CholeskyCertificate {
  Index dim_a = 0;
  Index dim_b = 0;
  std::vector<cmat> x;
  std::map<std::pair<Index, Index>, cmat> s;
  std::vector<double> row_norms;  // p_k = Tr(C_k^dagger C_k)
  BasisConvention basis;

  /// S_ij for i <= j (identity on the diagonal, zero when absent).
  cmat coefficient(Index i, Index j) const;

  /// The full (dimA*dimB)-square operator matrix X.
  cmat operator_matrix() const;

  /// Recompute row_norms from x and s.
  void refresh_row_norms();

  /// Tr(X^dagger X) straight from the fields.
  double hilbert_schmidt_mass() const;
};

inline constexpr double kDefaultCommutatorTol = 1e-8;
inline constexpr double kConsistencyTol = 1e-8;

struct AssembledState {
  BipartiteOperator rho;
  double norm = 0;  // Tr(X^dagger X)
};

AssembledState assemble_state(const CholeskyCertificate& cert);

/// Upper block-triangular U with U^dagger U = rho, via qr_upper(psd_sqrt(rho)).
BlockGrid block_cholesky(const BipartiteOperator& rho, double tol = 1e-10);

struct ExtractOptions {
  double rank_tol = 1e-10;
  // Tikhonov-regularized solve instead of the pseudoinverse; disables the
  // RangeMismatch check. Exploratory use only.
  bool ridge = false;
  double ridge_eps = 1e-12;
};

/// X_i = U_ii, S_ij = U_ij pinv(U_ii). Throws RangeMismatch when S_ij U_ii
/// fails to reproduce U_ij within 1e-8 * max(1, ||U||_F).
CholeskyCertificate extract_operators(const BlockGrid& u, const ExtractOptions& options = {});

struct RowResidual {
  Index row = 0;
  double normality = 0;     // max_i ||[S_ki, S_ki^dagger]||_F
  double cross = 0;         // max_{i<j} ||[S_ki, S_kj^dagger]||_F
  double scale = 1;         // max(1, max_i ||S_ki||_op^2)
  Index worst_i = -1;       // offender of the larger residual (0-based)
  Index worst_j = -1;
  bool ok = true;
};

struct SemiSspptReport {
  std::vector<RowResidual> rows;
  bool verdict = true;
  double tol = kDefaultCommutatorTol;

  /// Largest residual across all rows, unscaled.
  double worst_residual() const;
};

/// Checks [S_ki, S_kj^dagger] = 0 for every row k and k < i <= j. Never throws.
SemiSspptReport verify_semi_ssppt(const CholeskyCertificate& cert, double tol = kDefaultCommutatorTol);

/// Two-row criterion: X_1 full rank and Y^dagger Y = rho^{T_A}, where Y swaps
/// S_12 for its adjoint; when both hold, returns whether S_12 is normal.
/// Throws PreconditionFailed when cert does not reproduce rho.
bool check_corollary1(const CholeskyCertificate& cert, const BipartiteOperator& rho, double tol = kDefaultCommutatorTol,
                      double rank_tol = 1e-10);

}  // namespace sepfactory
