#pragma once

#include <vector>

#include "sepfactory/types.hpp"

namespace sepfactory {

enum class Side { A, B };

/// An operator on C^dimA (x) C^dimB stored in the A-major basis:
/// the product vector |i>|j> sits at index i * dimB + j.
class BipartiteOperator {
 public:
  BipartiteOperator() = default;
  BipartiteOperator(Index dim_a, Index dim_b, cmat matrix);

  static BipartiteOperator zero(Index dim_a, Index dim_b);

  Index dim_a() const { return dim_a_; }
  Index dim_b() const { return dim_b_; }
  Index dim() const { return dim_a_ * dim_b_; }
  const cmat& matrix() const { return matrix_; }

  /// Block B_kl of the A-side decomposition (a dimB x dimB view).
  auto block(Index k, Index l) const { return matrix_.block(k * dim_b_, l * dim_b_, dim_b_, dim_b_); }

  cplx trace() const { return matrix_.trace(); }

 private:
  Index dim_a_ = 0;
  Index dim_b_ = 0;
  cmat matrix_;
};

/// Row-major grid of equally sized square blocks.
struct BlockGrid {
  Index size = 0;        // grid is size x size
  Index block_dim = 0;   // each block is block_dim x block_dim
  std::vector<cmat> cells;

  cmat& operator()(Index k, Index l) { return cells[static_cast<std::size_t>(k * size + l)]; }
  const cmat& operator()(Index k, Index l) const { return cells[static_cast<std::size_t>(k * size + l)]; }
};

/// side = A: the dimA x dimA grid of dimB x dimB blocks B_kl.
/// side = B: the dimB x dimB grid of dimA x dimA blocks A_kl.
BlockGrid blocks(const BipartiteOperator& rho, Side side);
BipartiteOperator from_blocks(const BlockGrid& grid, Side side);

/// Carve a square matrix into a grid of block_dim x block_dim cells.
BlockGrid carve(const cmat& m, Index block_dim);
cmat join(const BlockGrid& grid);

BipartiteOperator kron(const cmat& a, const cmat& b);
cvec kron(const cvec& a, const cvec& b);

BipartiteOperator partial_transpose(const BipartiteOperator& rho, Side side);
cmat partial_trace(const BipartiteOperator& rho, Side side);

/// Exchange the tensor factors: result lives on C^dimB (x) C^dimA.
BipartiteOperator swap_subsystems(const BipartiteOperator& rho);

/// Conjugate by a local unitary u_a (x) u_b.
BipartiteOperator local_conjugate(const BipartiteOperator& rho, const cmat& u_a, const cmat& u_b);

inline constexpr double kDefaultPptTol = 1e-9;

struct PptResult {
  bool ppt = false;
  double min_eig_ta = 0;
  double min_eig_tb = 0;
};

PptResult is_ppt(const BipartiteOperator& rho, double tol = kDefaultPptTol);

/// Normalized compression (P (x) Q) rho (P (x) Q) / Tr onto the leading kA and
/// kB basis vectors, returned as a kA (x) kB operator.
BipartiteOperator truncate(const BipartiteOperator& rho, Index k_a, Index k_b);

/// Zero-pad a kA (x) kB operator back into dimA (x) dimB.
BipartiteOperator embed(const BipartiteOperator& small, Index dim_a, Index dim_b);

enum class Verdict { ValidState, NotNormalized, NotPsd, NotHermitian };

const char* to_string(Verdict v);

struct StateCheck {
  bool is_hermitian = false;
  double min_eigenvalue = 0;
  cplx trace{0, 0};
  Verdict verdict = Verdict::NotHermitian;
};

/// Never throws on mathematically invalid input; reports instead.
StateCheck check_state(const BipartiteOperator& rho, double tol = 1e-10);

}  // namespace sepfactory
