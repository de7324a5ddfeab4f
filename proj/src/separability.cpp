#include "sepfactory/separability.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"
#include "sepfactory/rng.hpp"

namespace sepfactory {

namespace {

constexpr double kDroppedRowTol = 1e-14;
constexpr double kClusterTol = 1e-10;

}  // namespace

cmat row_operator(const RowComponent& row, Index dim_a) {
  const Index d = row.x.rows();
  cmat c = cmat::Zero(dim_a * d, dim_a * d);
  c.block(row.k * d, row.k * d, d, d) = row.x;
  for (std::size_t m = 0; m < row.s_row.size(); ++m) {
    const Index j = row.k + 1 + static_cast<Index>(m);
    c.block(row.k * d, j * d, d, d) = row.s_row[m] * row.x;
  }
  return c;
}

std::vector<RowComponent> row_split(const CholeskyCertificate& cert) {
  CholeskyCertificate fresh = cert;
  fresh.refresh_row_norms();
  double total = 0;
  for (double p : fresh.row_norms) total += p;

  std::vector<RowComponent> rows;
  for (Index k = 0; k < cert.dim_a; ++k) {
    const double p = fresh.row_norms[static_cast<std::size_t>(k)];
    if (p <= kDroppedRowTol * total) continue;
    RowComponent row;
    row.k = k;
    row.x = cert.x[static_cast<std::size_t>(k)];
    for (Index j = k + 1; j < cert.dim_a; ++j) row.s_row.push_back(cert.coefficient(k, j));
    row.weight = p;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> joint_diag_coefficients(std::uint64_t seed, int attempt, std::size_t count) {
  Rng rng(seed);
  for (std::size_t i = 0; i < static_cast<std::size_t>(attempt) * count; ++i) rng.next();
  std::vector<double> out(count);
  for (auto& c : out) c = rng.uniform(1.0, 2.0);
  return out;
}

namespace {

// Groups of consecutive (descending) eigenvalues closer than tol.
std::vector<std::pair<Index, Index>> clusters(const rvec& values, double tol) {
  std::vector<std::pair<Index, Index>> out;
  Index start = 0;
  for (Index i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values(i - 1) - values(i) > tol) {
      out.emplace_back(start, i - start);
      start = i;
    }
  }
  return out;
}

void refine(const std::vector<cmat>& parts, const cmat& basis, std::size_t level, std::vector<cvec>& out) {
  if (basis.cols() == 1 || level == parts.size()) {
    for (Index c = 0; c < basis.cols(); ++c) out.push_back(basis.col(c));
    return;
  }
  const cmat restricted = basis.adjoint() * parts[level] * basis;
  const auto spec = hermitian_eig(((restricted + restricted.adjoint()) / 2.0).eval());
  const double tol = kClusterTol * spec.values.cwiseAbs().maxCoeff();
  for (const auto& [start, len] : clusters(spec.values, tol))
    refine(parts, (basis * spec.vectors.middleCols(start, len)).eval(), level + 1, out);
}

double conjugation_residual(const cmat& v, const cmat& s) {
  cmat d = v.adjoint() * s * v;
  d.diagonal().setZero();
  return d.norm();
}

}  // namespace

JointEigenbasis joint_diagonalize(std::span<const cmat> family, Index dim, const JointDiagOptions& options) {
  for (const auto& s : family)
    if (s.rows() != dim || s.cols() != dim)
      throw Error(ErrorCode::DimensionMismatch, "joint_diagonalize: family member has the wrong size");

  JointEigenbasis out;
  for (const auto& s : family) out.scale = std::max(out.scale, std::pow(op_norm(s), 2));
  const double bound = options.tol * out.scale;

  double commutator = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      const double cross = commutator_residual(family[i], family[j].adjoint().eval());
      const double direct = i == j ? 0.0 : commutator_residual(family[i], family[j]);
      if (cross > bound || direct > bound)
        throw Error(ErrorCode::NotCommuting, "joint_diagonalize: members " + std::to_string(i) + " and " +
                                                 std::to_string(j) + " do not commute within tolerance");
      commutator = std::max(commutator, direct);
    }
  }

  if (family.empty()) {
    out.v = cmat::Identity(dim, dim);
    out.table = cmat(0, dim);
    out.residual = 0;
    out.attempts = 1;
    return out;
  }

  std::vector<cmat> parts;
  parts.reserve(2 * family.size());
  for (const auto& s : family) {
    parts.push_back((s + s.adjoint()) / 2.0);
    parts.push_back((s - s.adjoint()) / cplx(0, 2));
  }

  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const auto coeffs = joint_diag_coefficients(options.seed, attempt, parts.size());
    cmat mix = cmat::Zero(dim, dim);
    for (std::size_t i = 0; i < parts.size(); ++i) mix += coeffs[i] * parts[i];
    const auto spec = hermitian_eig(((mix + mix.adjoint()) / 2.0).eval());
    const double tol = kClusterTol * spec.values.cwiseAbs().maxCoeff();

    std::vector<cvec> columns;
    for (const auto& [start, len] : clusters(spec.values, tol))
      refine(parts, spec.vectors.middleCols(start, len), 0, columns);

    cmat v(dim, dim);
    for (Index c = 0; c < dim; ++c) v.col(c) = columns[static_cast<std::size_t>(c)];

    double residual = commutator;
    for (const auto& s : family) residual = std::max(residual, conjugation_residual(v, s));

    if (residual <= bound) {
      out.v = std::move(v);
      out.table.resize(static_cast<Index>(family.size()), dim);
      for (std::size_t i = 0; i < family.size(); ++i)
        out.table.row(static_cast<Index>(i)) = (out.v.adjoint() * family[i] * out.v).diagonal().transpose();
      out.residual = residual;
      out.attempts = attempt + 1;
      return out;
    }
  }
  throw Error(ErrorCode::NoConvergence, "joint_diagonalize: no common eigenbasis after " +
                                            std::to_string(options.max_retries + 1) + " attempts");
}

ProductEnsemble extract_ensemble(const CholeskyCertificate& cert, const EnsembleOptions& options) {
  const auto report = verify_semi_ssppt(cert, options.tol);
  if (!report.verdict)
    throw Error(ErrorCode::NotSemiSsppt, "extract_ensemble: worst commutator residual " +
                                             std::to_string(report.worst_residual()));

  const Index da = cert.dim_a;
  const Index db = cert.dim_b;
  const auto rows = row_split(cert);
  double total = 0;
  for (const auto& r : rows) total += r.weight;

  ProductEnsemble ensemble;
  ensemble.dim_a = da;
  ensemble.dim_b = db;

  JointDiagOptions jd;
  jd.tol = options.tol;
  jd.max_retries = options.max_retries;

  double kept = 0;
  for (const auto& row : rows) {
    jd.seed = options.seed + static_cast<std::uint64_t>(row.k);
    const auto basis = joint_diagonalize(row.s_row, db, jd);
    for (Index w = 0; w < db; ++w) {
      cvec a = cvec::Zero(da);
      a(row.k) = 1;
      for (std::size_t m = 0; m < row.s_row.size(); ++m)
        a(row.k + 1 + static_cast<Index>(m)) = std::conj(basis.table(static_cast<Index>(m), w));
      const cvec b = row.x.adjoint() * basis.v.col(w);
      const double weight = a.squaredNorm() * b.squaredNorm();
      if (weight <= options.prune_tol * total) continue;
      kept += weight;
      ensemble.terms.push_back({weight, a.normalized(), b.normalized()});
    }
  }
  for (auto& t : ensemble.terms) t.weight /= kept;
  return ensemble;
}

BipartiteOperator reconstruct(const ProductEnsemble& ensemble) {
  const Index n = ensemble.dim_a * ensemble.dim_b;
  cmat m = cmat::Zero(n, n);
  for (const auto& t : ensemble.terms) {
    const cvec psi = kron(t.a, t.b);
    m.noalias() += t.weight * psi * psi.adjoint();
  }
  return {ensemble.dim_a, ensemble.dim_b, std::move(m)};
}

DouglasSolution douglas_solve(const cmat& a_root, const cmat& b, double rank_tol) {
  if (a_root.rows() != b.rows())
    throw Error(ErrorCode::DimensionMismatch, "douglas_solve: operand row counts differ");
  DouglasSolution out;
  out.g = pinv(a_root, rank_tol) * b;
  out.residual = (a_root * out.g - b).norm();
  out.op_norm = op_norm(out.g);
  if (out.residual > kConsistencyTol * std::max(1.0, b.norm()))
    throw Error(ErrorCode::Unsolvable,
                "douglas_solve: range condition fails (residual " + std::to_string(out.residual) + ")");
  return out;
}

namespace {

BipartiteOperator reverse_rows(const BipartiteOperator& rho) {
  cmat flip = cmat::Zero(rho.dim_a(), rho.dim_a());
  for (Index i = 0; i < rho.dim_a(); ++i) flip(i, rho.dim_a() - 1 - i) = 1;
  return local_conjugate(rho, flip, cmat::Identity(rho.dim_b(), rho.dim_b()));
}

double min_eigenvalue(const cmat& m) {
  const auto spec = hermitian_eig(((m + m.adjoint()) / 2.0).eval());
  return spec.values(spec.values.size() - 1);
}

QubitPathwayResult two_block_certificate(const BipartiteOperator& rho, const QubitPathwayOptions& options) {
  const cmat rho11 = rho.block(0, 0);
  const cmat rho12 = rho.block(0, 1);
  const cmat rho22 = rho.block(1, 1);

  const cmat r1 = psd_sqrt(rho11, options.tol);
  const cmat r2 = psd_sqrt(rho22, options.tol);
  const cmat s = douglas_solve(r1, r2, options.rank_tol).g;
  const cmat g1 = douglas_solve(r1, rho12, options.rank_tol).g;
  const cmat t = douglas_solve(r2, g1.adjoint(), options.rank_tol).g.adjoint();
  const cmat s12 = t * s.adjoint();
  const cmat x2 = psd_sqrt((rho22 - r1 * s12.adjoint() * s12 * r1).eval(), options.tol);

  QubitPathwayResult out;
  out.cert.dim_a = 2;
  out.cert.dim_b = rho.dim_b();
  out.cert.x = {r1, x2};
  out.cert.s.emplace(std::make_pair(Index{0}, Index{1}), s12);
  out.cert.refresh_row_norms();

  const cmat x = out.cert.operator_matrix();
  const double reproduce = (x.adjoint() * x - rho.matrix()).norm();
  if (reproduce > options.tol * std::max(1.0, rho.matrix().norm()))
    throw Error(ErrorCode::Unsolvable,
                "qubit_pathway: certificate does not reproduce the state (residual " + std::to_string(reproduce) + ")");

  const double normality = normality_residual(s12);
  if (normality > options.tol * std::max(1.0, std::pow(op_norm(s12), 2)))
    throw Error(ErrorCode::NormalityFailed,
                "qubit_pathway: S_12 is not normal (residual " + std::to_string(normality) + ")");

  EnsembleOptions eo;
  eo.tol = options.tol;
  eo.seed = options.seed;
  out.ensemble = extract_ensemble(out.cert, eo);
  return out;
}

}  // namespace

QubitPathwayResult qubit_pathway(const BipartiteOperator& rho, const QubitPathwayOptions& options) {
  if (rho.dim_a() != 2 && rho.dim_b() != 2)
    throw Error(ErrorCode::PreconditionFailed, "qubit_pathway: one subsystem must be two-dimensional");

  struct Candidate {
    BipartiteOperator state;
    BasisConvention basis;
  };
  std::vector<Candidate> candidates;
  if (rho.dim_a() == 2) {
    candidates.push_back({rho, {}});
    candidates.push_back({reverse_rows(rho), {false, true}});
  }
  if (rho.dim_b() == 2) {
    const BipartiteOperator swapped = swap_subsystems(rho);
    candidates.push_back({swapped, {true, false}});
    candidates.push_back({reverse_rows(swapped), {true, true}});
  }

  std::optional<Error> failure;
  for (const auto& c : candidates) {
    const cmat gap = c.state.block(0, 0) - c.state.block(1, 1);
    if (min_eigenvalue(gap) < -options.tol) continue;
    try {
      QubitPathwayResult result = two_block_certificate(c.state, options);
      result.cert.basis = c.basis;
      ProductEnsemble& e = result.ensemble;
      for (auto& term : e.terms) {
        if (c.basis.reverse_rows) term.a.reverseInPlace();
        if (c.basis.swap_subsystems) std::swap(term.a, term.b);
      }
      e.dim_a = rho.dim_a();
      e.dim_b = rho.dim_b();
      return result;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::NormalityFailed && err.code() != ErrorCode::Unsolvable &&
          err.code() != ErrorCode::NotPSD)
        throw;
      if (!failure || failure->code() != ErrorCode::NormalityFailed) failure = err;
    }
  }
  if (failure) throw *failure;
  throw Error(ErrorCode::ConditionFailed, "qubit_pathway: neither diagonal block dominates the other");
}

}  // namespace sepfactory
