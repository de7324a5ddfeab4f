#include "sepfactory/generators.hpp"

#include <cmath>

#include <Eigen/QR>

#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"

namespace sepfactory {

const char* to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Example1: return "example1";
    case GeneratorKind::Example2: return "example2";
    case GeneratorKind::RandomSsppt: return "random_ssppt";
    case GeneratorKind::RandomDensity: return "random_density";
    case GeneratorKind::MaximallyEntangled: return "maximally_entangled";
  }
  return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
  for (auto k : {GeneratorKind::Example1, GeneratorKind::Example2, GeneratorKind::RandomSsppt,
                 GeneratorKind::RandomDensity, GeneratorKind::MaximallyEntangled})
    if (name == to_string(k)) return k;
  throw Error(ErrorCode::Format, "unknown generator kind '" + name + "'");
}

cmat random_unitary(Index d, Rng& rng) {
  const cmat g = rng.ginibre(d, d);
  Eigen::HouseholderQR<cmat> qr(g);
  cmat q = qr.householderQ();
  const cmat& r = qr.matrixQR();
  for (Index i = 0; i < d; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

cmat random_normal(Index d, Rng& rng) {
  const cmat u = random_unitary(d, rng);
  cvec z(d);
  for (Index i = 0; i < d; ++i) z(i) = rng.cnormal();
  return u * z.asDiagonal() * u.adjoint();
}

cmat random_contraction(Index d, Rng& rng, double lo, double hi) {
  const cmat g = rng.ginibre(d, d);
  const double target = rng.uniform(lo, hi);
  const double nrm = op_norm(g);
  return nrm > 0 ? cmat(g * (target / nrm)) : g;
}

double geometric_tail(int i, int n) {
  double sum = 0;
  for (int j = n; j > i; --j) sum += std::ldexp(1.0, -2 * j);
  return sum;
}

double geometric_tail_limit(int i) { return std::ldexp(1.0, -2 * i) / 3.0; }

Example1 example1_state(Index n, Index dim_b, std::uint64_t seed) {
  if (n < 1 || dim_b < 1) throw Error(ErrorCode::DimensionMismatch, "example1_state: n and dimB must be >= 1");
  Rng rng(seed);

  constexpr int kAttempts = 5;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<cmat> x(static_cast<std::size_t>(n));
    std::vector<cmat> s(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = rng.ginibre(dim_b, dim_b);
      if (i + 1 < n) s[static_cast<std::size_t>(i)] = random_normal(dim_b, rng);
    }

    bool degenerate = false;
    for (Index i = 0; i + 1 < n; ++i)
      if ((s[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)]).norm() == 0) degenerate = true;
    if (degenerate) continue;

    Example1 out;
    out.cert.dim_a = n;
    out.cert.dim_b = dim_b;

    double diag_mass = 0;
    for (const auto& xi : x) diag_mass += xi.squaredNorm();
    if (diag_mass == 0) continue;

    if (n == 1) {
      out.cert.x = {x[0] / std::sqrt(diag_mass)};
    } else {
      const double shrink = std::sqrt(0.5 / diag_mass);
      for (auto& xi : x) xi *= shrink;
      double head_mass = 0;  // rows that have off-diagonal entries
      for (Index i = 0; i + 1 < n; ++i) head_mass += x[static_cast<std::size_t>(i)].squaredNorm();

      for (Index i = 0; i + 1 < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const int row = static_cast<int>(i) + 1;  // 1-based
        const double tail = geometric_tail(row, static_cast<int>(n));
        const double target = 0.5 * x[ui].squaredNorm() / head_mass;
        const double mass = (s[ui] * x[ui]).squaredNorm() * tail;
        s[ui] *= std::sqrt(target / mass);
        for (Index j = i + 1; j < n; ++j)
          out.cert.s.emplace(std::make_pair(i, j), s[ui] * std::ldexp(1.0, -static_cast<int>(j + 1)));
      }
      out.cert.x = std::move(x);
    }
    out.cert.refresh_row_norms();
    out.rho = assemble_state(out.cert).rho;
    return out;
  }
  throw Error(ErrorCode::DegenerateDraw, "example1_state: every draw produced a vanishing S_i X_i");
}

BipartiteOperator example2_state(const cmat& rho11, const cmat& d, const cmat& t) {
  const Index n = rho11.rows();
  if (rho11.cols() != n || d.rows() != n || d.cols() != n || t.rows() != n || t.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "example2_state: inputs must be square and equal-sized");

  auto clip = [](const cmat& m, const char* name) {
    const double nrm = op_norm(m);
    if (nrm > 1 + 1e-12)
      throw Error(ErrorCode::NotContraction, std::string(name) + " has operator norm " + std::to_string(nrm));
    return nrm > 1 ? cmat(m / nrm) : m;
  };
  const cmat dc = clip(d, "D");
  const cmat tc = clip(t, "T");

  const cmat r1 = psd_sqrt(rho11);
  const cmat rho22 = r1 * dc * dc.adjoint() * r1;
  const cmat rho12 = r1 * tc * psd_sqrt(rho22);
  const double tr = (rho11 + rho22).trace().real();
  if (!(tr > 0)) throw Error(ErrorCode::NotPSD, "example2_state: rho_11 must be nonzero");

  cmat m(2 * n, 2 * n);
  m << rho11, rho12, rho12.adjoint(), rho22;
  m /= tr;
  return {2, n, (m + m.adjoint()) / 2.0};
}

BipartiteOperator random_example2(Index dim_b, std::uint64_t seed, bool aligned) {
  Rng rng(seed);
  if (!aligned) {
    const cmat g = rng.ginibre(dim_b, dim_b);
    const cmat d = random_contraction(dim_b, rng);
    const cmat t = random_contraction(dim_b, rng);
    return example2_state(g * g.adjoint(), d, t);
  }
  const cmat u = random_unitary(dim_b, rng);
  rvec r(dim_b);
  cvec dd(dim_b), tt(dim_b);
  for (Index i = 0; i < dim_b; ++i) {
    r(i) = rng.uniform(0.1, 1.0);
    dd(i) = std::polar(rng.uniform(0.0, 1.0), rng.uniform(0.0, 2 * M_PI));
    tt(i) = std::polar(rng.uniform(0.0, 1.0), rng.uniform(0.0, 2 * M_PI));
  }
  const cmat rho11 = u * r.cast<cplx>().asDiagonal() * u.adjoint();
  const cmat d = u * dd.asDiagonal() * u.adjoint();
  const cmat t = u * tt.asDiagonal() * u.adjoint();
  return example2_state(rho11, d, t);
}

RandomSsppt random_semi_ssppt(Index dim_a, Index dim_b, std::uint64_t seed) {
  if (dim_a < 1 || dim_b < 1) throw Error(ErrorCode::DimensionMismatch, "random_semi_ssppt: dims must be >= 1");
  Rng rng(seed);
  RandomSsppt out;
  out.cert.dim_a = dim_a;
  out.cert.dim_b = dim_b;
  for (Index k = 0; k < dim_a; ++k) {
    out.cert.x.push_back(rng.ginibre(dim_b, dim_b));
    if (k + 1 == dim_a) break;
    const cmat v = random_unitary(dim_b, rng);
    for (Index j = k + 1; j < dim_a; ++j) {
      cvec diag(dim_b);
      for (Index i = 0; i < dim_b; ++i) diag(i) = rng.cnormal();
      out.cert.s.emplace(std::make_pair(k, j), v * diag.asDiagonal() * v.adjoint());
    }
  }
  const double mass = out.cert.hilbert_schmidt_mass();
  for (auto& x : out.cert.x) x /= std::sqrt(mass);
  out.cert.refresh_row_norms();
  out.rho = assemble_state(out.cert).rho;
  return out;
}

BipartiteOperator random_density(Index dim_a, Index dim_b, Index rank, std::uint64_t seed) {
  const Index n = dim_a * dim_b;
  if (rank <= 0 || rank > n) rank = n;
  Rng rng(seed);
  const cmat g = rng.ginibre(n, rank);
  cmat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return {dim_a, dim_b, (rho + rho.adjoint()) / 2.0};
}

BipartiteOperator maximally_entangled(Index d) {
  if (d < 2) throw Error(ErrorCode::DimensionMismatch, "maximally_entangled: d must be >= 2");
  cvec phi = cvec::Zero(d * d);
  for (Index i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(double(d));
  return {d, d, phi * phi.adjoint()};
}

GeneratedState generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::Example1: {
      auto e = example1_state(spec.dim_a, spec.dim_b, spec.seed);
      return {std::move(e.rho), std::move(e.cert)};
    }
    case GeneratorKind::Example2:
      return {random_example2(spec.dim_b, spec.seed, spec.aligned), std::nullopt};
    case GeneratorKind::RandomSsppt: {
      auto r = random_semi_ssppt(spec.dim_a, spec.dim_b, spec.seed);
      return {std::move(r.rho), std::move(r.cert)};
    }
    case GeneratorKind::RandomDensity:
      return {random_density(spec.dim_a, spec.dim_b, spec.rank, spec.seed), std::nullopt};
    case GeneratorKind::MaximallyEntangled:
      return {maximally_entangled(spec.dim_a), std::nullopt};
  }
  throw Error(ErrorCode::Format, "unknown generator kind");
}

}  // namespace sepfactory
