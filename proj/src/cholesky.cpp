#include "sepfactory/cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"

namespace sepfactory {

cmat CholeskyCertificate::coefficient(Index i, Index j) const {
  if (i == j) return cmat::Identity(dim_b, dim_b);
  const auto it = s.find({i, j});
  if (it == s.end()) return cmat::Zero(dim_b, dim_b);
  return it->second;
}

cmat CholeskyCertificate::operator_matrix() const {
  if (static_cast<Index>(x.size()) != dim_a)
    throw Error(ErrorCode::DimensionMismatch, "certificate must carry one X_i per row");
  for (const auto& xi : x)
    if (xi.rows() != dim_b || xi.cols() != dim_b)
      throw Error(ErrorCode::DimensionMismatch, "X_i must be dimB x dimB");
  for (const auto& [key, op] : s) {
    const auto [i, j] = key;
    if (!(0 <= i && i < j && j < dim_a))
      throw Error(ErrorCode::DimensionMismatch, "S_ij index out of range");
    if (op.rows() != dim_b || op.cols() != dim_b)
      throw Error(ErrorCode::DimensionMismatch, "S_ij must be dimB x dimB");
  }

  const Index n = dim_a * dim_b;
  cmat m = cmat::Zero(n, n);
  for (Index i = 0; i < dim_a; ++i) {
    m.block(i * dim_b, i * dim_b, dim_b, dim_b) = x[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < dim_a; ++j) {
      const auto it = s.find({i, j});
      if (it != s.end()) m.block(i * dim_b, j * dim_b, dim_b, dim_b) = it->second * x[static_cast<std::size_t>(i)];
    }
  }
  return m;
}

void CholeskyCertificate::refresh_row_norms() {
  row_norms.assign(static_cast<std::size_t>(dim_a), 0.0);
  for (Index k = 0; k < dim_a; ++k) {
    const cmat& xk = x[static_cast<std::size_t>(k)];
    double p = xk.squaredNorm();
    for (Index j = k + 1; j < dim_a; ++j) {
      const auto it = s.find({k, j});
      if (it != s.end()) p += (it->second * xk).squaredNorm();
    }
    row_norms[static_cast<std::size_t>(k)] = p;
  }
}

double CholeskyCertificate::hilbert_schmidt_mass() const { return operator_matrix().squaredNorm(); }

AssembledState assemble_state(const CholeskyCertificate& cert) {
  const cmat x = cert.operator_matrix();
  const double norm = x.squaredNorm();
  if (!(norm > 0)) throw Error(ErrorCode::ZeroOperator, "assemble_state: Tr(X^dagger X) = 0");
  cmat rho = x.adjoint() * x / norm;
  rho = (rho + rho.adjoint()).eval() / 2.0;
  return {BipartiteOperator(cert.dim_a, cert.dim_b, std::move(rho)), norm};
}

BlockGrid block_cholesky(const BipartiteOperator& rho, double tol) {
  const cmat root = psd_sqrt(rho.matrix(), tol);
  return carve(qr_upper(root), rho.dim_b());
}

CholeskyCertificate extract_operators(const BlockGrid& u, const ExtractOptions& options) {
  const Index n = u.size;
  const Index d = u.block_dim;

  double total = 0;
  double lower = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double sq = u(i, j).squaredNorm();
      total += sq;
      if (i > j) lower += sq;
    }
  const double u_norm = std::sqrt(total);
  if (std::sqrt(lower) > 1e-12 * std::max(1.0, u_norm))
    throw Error(ErrorCode::PreconditionFailed, "extract_operators: factor is not block upper-triangular");

  CholeskyCertificate cert;
  cert.dim_a = n;
  cert.dim_b = d;
  cert.x.reserve(static_cast<std::size_t>(n));
  const double bound = kConsistencyTol * std::max(1.0, u_norm);

  for (Index i = 0; i < n; ++i) {
    const cmat& diag = u(i, i);
    cert.x.push_back(diag);
    if (i + 1 == n) break;

    cmat inverse;
    if (options.ridge) {
      const cmat gram = diag.adjoint() * diag + options.ridge_eps * cmat::Identity(d, d);
      inverse = gram.ldlt().solve(diag.adjoint());
    } else {
      inverse = pinv(diag, options.rank_tol);
    }

    for (Index j = i + 1; j < n; ++j) {
      const cmat& off = u(i, j);
      cmat sij = off * inverse;
      if (!options.ridge) {
        const double residual = (sij * diag - off).norm();
        if (residual > bound) throw RangeMismatch(static_cast<int>(i + 1), static_cast<int>(j + 1), residual);
      }
      cert.s.emplace(std::make_pair(i, j), std::move(sij));
    }
  }

  cert.row_norms.assign(static_cast<std::size_t>(n), 0.0);
  for (Index k = 0; k < n; ++k)
    for (Index j = k; j < n; ++j) cert.row_norms[static_cast<std::size_t>(k)] += u(k, j).squaredNorm();
  return cert;
}

double SemiSspptReport::worst_residual() const {
  double worst = 0;
  for (const auto& r : rows) worst = std::max({worst, r.normality, r.cross});
  return worst;
}

SemiSspptReport verify_semi_ssppt(const CholeskyCertificate& cert, double tol) {
  SemiSspptReport report;
  report.tol = tol;
  for (Index k = 0; k < cert.dim_a; ++k) {
    RowResidual row;
    row.row = k;

    std::vector<cmat> family;
    for (Index i = k + 1; i < cert.dim_a; ++i) family.push_back(cert.coefficient(k, i));

    for (const auto& op : family) row.scale = std::max(row.scale, std::pow(op_norm(op), 2));

    double worst = -1;
    for (std::size_t a = 0; a < family.size(); ++a) {
      for (std::size_t b = a; b < family.size(); ++b) {
        const double r = commutator_residual(family[a], family[b].adjoint().eval());
        if (a == b)
          row.normality = std::max(row.normality, r);
        else
          row.cross = std::max(row.cross, r);
        if (r > worst) {
          worst = r;
          row.worst_i = k + 1 + static_cast<Index>(a);
          row.worst_j = k + 1 + static_cast<Index>(b);
        }
      }
    }
    row.ok = row.normality <= tol * row.scale && row.cross <= tol * row.scale;
    report.verdict = report.verdict && row.ok;
    report.rows.push_back(row);
  }
  return report;
}

bool check_corollary1(const CholeskyCertificate& cert, const BipartiteOperator& rho, double tol, double rank_tol) {
  if (cert.dim_a != 2 || rho.dim_a() != 2 || rho.dim_b() != cert.dim_b)
    throw Error(ErrorCode::PreconditionFailed, "check_corollary1: needs a two-row certificate matching rho");

  const AssembledState assembled = assemble_state(cert);
  const double scale = std::max(1.0, rho.matrix().norm());
  if ((assembled.rho.matrix() - rho.matrix()).norm() > tol * scale)
    throw Error(ErrorCode::PreconditionFailed, "check_corollary1: certificate does not reproduce rho");

  const cmat& x1 = cert.x[0];
  if (numerical_rank(x1, rank_tol) < cert.dim_b) return false;

  const cmat s12 = cert.coefficient(0, 1);
  CholeskyCertificate swapped = cert;
  swapped.s[{0, 1}] = s12.adjoint();
  const cmat y = swapped.operator_matrix();
  const cmat yy = y.adjoint() * y / assembled.norm;
  const cmat target = partial_transpose(rho, Side::A).matrix();
  if ((yy - target).norm() > tol * scale) return false;

  const double normal_scale = std::max(1.0, std::pow(op_norm(s12), 2));
  return normality_residual(s12) <= tol * normal_scale;
}

}  // namespace sepfactory
