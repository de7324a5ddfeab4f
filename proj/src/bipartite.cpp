#include "sepfactory/bipartite.hpp"

#include <algorithm>
#include <string>

#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"

namespace sepfactory {

BipartiteOperator::BipartiteOperator(Index dim_a, Index dim_b, cmat matrix)
    : dim_a_(dim_a), dim_b_(dim_b), matrix_(std::move(matrix)) {
  if (dim_a < 1 || dim_b < 1)
    throw Error(ErrorCode::DimensionMismatch, "subsystem dimensions must be >= 1");
  if (matrix_.rows() != dim_a * dim_b || matrix_.cols() != dim_a * dim_b)
    throw Error(ErrorCode::DimensionMismatch,
                "matrix is " + std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()) +
                    ", expected side " + std::to_string(dim_a * dim_b));
  if (!matrix_.allFinite()) throw Error(ErrorCode::NonFinite, "bipartite operator has non-finite entries");
}

BipartiteOperator BipartiteOperator::zero(Index dim_a, Index dim_b) {
  return {dim_a, dim_b, cmat::Zero(dim_a * dim_b, dim_a * dim_b)};
}

BlockGrid carve(const cmat& m, Index block_dim) {
  if (block_dim < 1 || m.rows() != m.cols() || m.rows() % block_dim != 0)
    throw Error(ErrorCode::DimensionMismatch, "carve: matrix side is not a multiple of the block size");
  BlockGrid grid;
  grid.size = m.rows() / block_dim;
  grid.block_dim = block_dim;
  grid.cells.reserve(static_cast<std::size_t>(grid.size * grid.size));
  for (Index k = 0; k < grid.size; ++k)
    for (Index l = 0; l < grid.size; ++l)
      grid.cells.emplace_back(m.block(k * block_dim, l * block_dim, block_dim, block_dim));
  return grid;
}

cmat join(const BlockGrid& grid) {
  const Index n = grid.size * grid.block_dim;
  cmat m(n, n);
  for (Index k = 0; k < grid.size; ++k)
    for (Index l = 0; l < grid.size; ++l)
      m.block(k * grid.block_dim, l * grid.block_dim, grid.block_dim, grid.block_dim) = grid(k, l);
  return m;
}

BlockGrid blocks(const BipartiteOperator& rho, Side side) {
  if (side == Side::A) return carve(rho.matrix(), rho.dim_b());

  const Index da = rho.dim_a();
  const Index db = rho.dim_b();
  const cmat& m = rho.matrix();
  BlockGrid grid;
  grid.size = db;
  grid.block_dim = da;
  grid.cells.assign(static_cast<std::size_t>(db * db), cmat(da, da));
  for (Index k = 0; k < db; ++k)
    for (Index l = 0; l < db; ++l) {
      cmat& cell = grid(k, l);
      for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < da; ++j) cell(i, j) = m(i * db + k, j * db + l);
    }
  return grid;
}

BipartiteOperator from_blocks(const BlockGrid& grid, Side side) {
  if (side == Side::A) return {grid.size, grid.block_dim, join(grid)};

  const Index db = grid.size;
  const Index da = grid.block_dim;
  cmat m(da * db, da * db);
  for (Index k = 0; k < db; ++k)
    for (Index l = 0; l < db; ++l)
      for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < da; ++j) m(i * db + k, j * db + l) = grid(k, l)(i, j);
  return {da, db, std::move(m)};
}

BipartiteOperator kron(const cmat& a, const cmat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "kron: factors must be square");
  const Index da = a.rows();
  const Index db = b.rows();
  cmat m(da * db, da * db);
  for (Index i = 0; i < da; ++i)
    for (Index k = 0; k < da; ++k) m.block(i * db, k * db, db, db) = a(i, k) * b;
  return {da, db, std::move(m)};
}

cvec kron(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

BipartiteOperator partial_transpose(const BipartiteOperator& rho, Side side) {
  const Index da = rho.dim_a();
  const Index db = rho.dim_b();
  cmat out(rho.dim(), rho.dim());
  for (Index k = 0; k < da; ++k)
    for (Index l = 0; l < da; ++l) {
      if (side == Side::A)
        out.block(k * db, l * db, db, db) = rho.block(l, k);
      else
        out.block(k * db, l * db, db, db) = rho.block(k, l).transpose();
    }
  return {da, db, std::move(out)};
}

cmat partial_trace(const BipartiteOperator& rho, Side side) {
  const Index da = rho.dim_a();
  const Index db = rho.dim_b();
  if (side == Side::A) {
    cmat out = cmat::Zero(db, db);
    for (Index k = 0; k < da; ++k) out += rho.block(k, k);
    return out;
  }
  cmat out(da, da);
  for (Index k = 0; k < da; ++k)
    for (Index l = 0; l < da; ++l) out(k, l) = rho.block(k, l).trace();
  return out;
}

BipartiteOperator swap_subsystems(const BipartiteOperator& rho) {
  const Index da = rho.dim_a();
  const Index db = rho.dim_b();
  const cmat& m = rho.matrix();
  cmat out(rho.dim(), rho.dim());
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < db; ++j)
      for (Index k = 0; k < da; ++k)
        for (Index l = 0; l < db; ++l) out(j * da + i, l * da + k) = m(i * db + j, k * db + l);
  return {db, da, std::move(out)};
}

BipartiteOperator local_conjugate(const BipartiteOperator& rho, const cmat& u_a, const cmat& u_b) {
  const cmat u = kron(u_a, u_b).matrix();
  return {rho.dim_a(), rho.dim_b(), u * rho.matrix() * u.adjoint()};
}

namespace {

double min_eigenvalue(const cmat& m) {
  const auto spec = hermitian_eig(m);
  return spec.values.size() ? spec.values(spec.values.size() - 1) : 0.0;
}

}  // namespace

PptResult is_ppt(const BipartiteOperator& rho, double tol) {
  const double scale = std::max(1.0, rho.matrix().norm());
  if (hermiticity_defect(rho.matrix()) > tol * scale)
    throw Error(ErrorCode::NotHermitian, "is_ppt: operator is not Hermitian");
  PptResult out;
  out.min_eig_ta = min_eigenvalue(partial_transpose(rho, Side::A).matrix());
  out.min_eig_tb = min_eigenvalue(partial_transpose(rho, Side::B).matrix());
  out.ppt = out.min_eig_ta >= -tol && out.min_eig_tb >= -tol;
  return out;
}

BipartiteOperator truncate(const BipartiteOperator& rho, Index k_a, Index k_b) {
  if (k_a < 1 || k_a > rho.dim_a() || k_b < 1 || k_b > rho.dim_b())
    throw Error(ErrorCode::DimensionMismatch, "truncate: cut sizes out of range");
  const Index db = rho.dim_b();
  cmat out(k_a * k_b, k_a * k_b);
  for (Index i = 0; i < k_a; ++i)
    for (Index k = 0; k < k_a; ++k) out.block(i * k_b, k * k_b, k_b, k_b) = rho.matrix().block(i * db, k * db, k_b, k_b);
  const double tr = out.trace().real();
  if (!(tr > 0)) throw Error(ErrorCode::ZeroTrace, "truncate: compression annihilates the operator");
  return {k_a, k_b, out / tr};
}

BipartiteOperator embed(const BipartiteOperator& small, Index dim_a, Index dim_b) {
  const Index ka = small.dim_a();
  const Index kb = small.dim_b();
  if (ka > dim_a || kb > dim_b) throw Error(ErrorCode::DimensionMismatch, "embed: target is smaller than source");
  cmat out = cmat::Zero(dim_a * dim_b, dim_a * dim_b);
  for (Index i = 0; i < ka; ++i)
    for (Index k = 0; k < ka; ++k) out.block(i * dim_b, k * dim_b, kb, kb) = small.block(i, k);
  return {dim_a, dim_b, std::move(out)};
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ValidState: return "valid_state";
    case Verdict::NotNormalized: return "not_normalized";
    case Verdict::NotPsd: return "not_psd";
    case Verdict::NotHermitian: return "not_hermitian";
  }
  return "unknown";
}

StateCheck check_state(const BipartiteOperator& rho, double tol) {
  StateCheck out;
  const cmat& m = rho.matrix();
  out.trace = m.trace();
  out.is_hermitian = hermiticity_defect(m) <= tol * std::max(1.0, m.norm());
  const cmat herm = (m + m.adjoint()) / 2.0;
  out.min_eigenvalue = min_eigenvalue(herm);
  if (!out.is_hermitian)
    out.verdict = Verdict::NotHermitian;
  else if (out.min_eigenvalue < -tol)
    out.verdict = Verdict::NotPsd;
  else if (std::abs(out.trace - cplx(1, 0)) > tol)
    out.verdict = Verdict::NotNormalized;
  else
    out.verdict = Verdict::ValidState;
  return out;
}

}  // namespace sepfactory
