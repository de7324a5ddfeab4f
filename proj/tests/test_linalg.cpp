#include <doctest.h>

#include "oracles.hpp"
#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"
#include "sepfactory/rng.hpp"

using namespace sepfactory;

TEST_CASE("hermitian_eig matches SelfAdjointEigenSolver") {
  oracle::Gen gen(11);
  for (Index n : {1, 2, 3, 5, 8, 13}) {
    const cmat h = gen.hermitian(n);
    const auto spec = hermitian_eig(h);
    const Eigen::VectorXd ref = oracle::eigenvalues(h).reverse();
    CHECK((spec.values - ref).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    CHECK((spec.vectors.adjoint() * spec.vectors - cmat::Identity(n, n)).norm() <= 1e-12);
    CHECK((h * spec.vectors - spec.vectors * spec.values.cast<cplx>().asDiagonal()).norm() <= 1e-11 * h.norm());
    CHECK(spec.sweeps <= kJacobiSweepBudget);
  }
}

TEST_CASE("hermitian_eig: descending order, phase convention, determinism") {
  oracle::Gen gen(12);
  const cmat h = gen.hermitian(6);
  const auto a = hermitian_eig(h);
  const auto b = hermitian_eig(h);
  CHECK(a.vectors == b.vectors);
  CHECK(a.values == b.values);
  for (Index i = 1; i < 6; ++i) CHECK(a.values(i - 1) >= a.values(i));
  for (Index j = 0; j < 6; ++j) {
    Index best = 0;
    a.vectors.col(j).cwiseAbs().maxCoeff(&best);
    CHECK(std::abs(a.vectors(best, j).imag()) <= 1e-15);
    CHECK(a.vectors(best, j).real() > 0);
  }
}

TEST_CASE("hermitian_eig: degenerate spectrum and diagonal input") {
  const cmat id = cmat::Identity(4, 4) * 2.0;
  const auto spec = hermitian_eig(id);
  CHECK(spec.values.isApproxToConstant(2.0));
  CHECK(spec.sweeps == 0);

  oracle::Gen gen(13);
  const cmat u = gen.unitary(5);
  Eigen::VectorXd d(5);
  d << 3, 3, 1, 1, -2;
  const cmat h = u * d.cast<cplx>().asDiagonal() * u.adjoint();
  const auto s = hermitian_eig(h);
  CHECK((s.values - d).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("hermitian_eig rejects non-Hermitian and non-finite input") {
  cmat m = cmat::Identity(3, 3);
  m(0, 1) = 0.5;
  CHECK_THROWS_AS(hermitian_eig(m), Error);
  try {
    hermitian_eig(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(hermitian_eig(m), Error);
}

TEST_CASE("svd matches JacobiSVD on tall, wide and rank-deficient matrices") {
  oracle::Gen gen(21);
  for (auto [r, c] : {std::pair<Index, Index>{4, 4}, {6, 3}, {3, 6}, {1, 5}, {7, 1}}) {
    const cmat m = gen.gaussian(r, c);
    const auto s = svd(m);
    const Eigen::VectorXd ref = oracle::singular_values(m);
    REQUIRE(s.values.size() == ref.size());
    CHECK((s.values - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref(0));
    CHECK((s.u * s.values.cast<cplx>().asDiagonal() * s.v.adjoint() - m).norm() <= 1e-12 * m.norm());
  }
  const cmat low = gen.gaussian(6, 2) * gen.gaussian(2, 6);
  CHECK(numerical_rank(low) == 2);
  CHECK(numerical_rank(cmat::Zero(3, 3)) == 0);
}

TEST_CASE("svd keeps small singular values accurate") {
  oracle::Gen gen(22);
  const cmat u = gen.unitary(4), v = gen.unitary(4);
  Eigen::VectorXd d(4);
  d << 1, 1e-4, 1e-8, 1e-12;
  const cmat m = u * d.cast<cplx>().asDiagonal() * v.adjoint();
  const auto s = svd(m);
  for (Index i = 0; i < 4; ++i) CHECK(std::abs(s.values(i) - d(i)) <= 1e-15 + 1e-3 * d(i));
}

TEST_CASE("pinv satisfies the Penrose conditions") {
  oracle::Gen gen(31);
  const cmat a = gen.gaussian(5, 3) * gen.gaussian(3, 4);
  const cmat p = pinv(a);
  const double s = a.norm();
  CHECK((a * p * a - a).norm() <= 1e-10 * s);
  CHECK((p * a * p - p).norm() <= 1e-10 * p.norm());
  CHECK(((a * p).adjoint() - a * p).norm() <= 1e-10);
  CHECK(((p * a).adjoint() - p * a).norm() <= 1e-10);
  CHECK((p - oracle::pinv(a)).norm() <= 1e-9 * p.norm());
  CHECK(pinv(cmat::Zero(2, 3)).isZero());
}

TEST_CASE("psd_sqrt squares back and rejects negative spectra") {
  oracle::Gen gen(41);
  const cmat rho = gen.density(6, 3);
  const cmat r = psd_sqrt(rho);
  CHECK((r * r - rho).norm() <= 1e-12);
  CHECK(oracle::min_eigenvalue(r) >= -1e-12);
  CHECK(hermiticity_defect(r) == 0);

  cmat bad = cmat::Identity(3, 3);
  bad(2, 2) = -0.1;
  CHECK_THROWS_AS(psd_sqrt(bad), Error);
  bad(2, 2) = -1e-14;
  CHECK_NOTHROW(psd_sqrt(bad));
}

TEST_CASE("qr_upper gives an upper factor of M^dagger M with non-negative diagonal") {
  oracle::Gen gen(51);
  for (Index n : {1, 3, 6}) {
    const cmat m = gen.gaussian(n, n);
    const cmat r = qr_upper(m);
    CHECK(r.isUpperTriangular(0));
    for (Index i = 0; i < n; ++i) {
      CHECK(r(i, i).imag() == 0);
      CHECK(r(i, i).real() >= 0);
    }
    CHECK((r.adjoint() * r - m.adjoint() * m).norm() <= 1e-12 * m.squaredNorm());
  }
}

TEST_CASE("norms agree with the singular-value oracle") {
  oracle::Gen gen(61);
  const cmat m = gen.gaussian(5, 5);
  const auto n = norms(m);
  CHECK(n.trace == doctest::Approx(oracle::trace_norm(m)).epsilon(1e-12));
  CHECK(n.op == doctest::Approx(oracle::op_norm(m)).epsilon(1e-12));
  CHECK(n.frobenius == doctest::Approx(m.norm()).epsilon(1e-15));
}

TEST_CASE("commutator and normality residuals") {
  oracle::Gen gen(71);
  const cmat u = gen.unitary(4);
  const cmat d1 = gen.gaussian(4, 1).asDiagonal();
  const cmat d2 = gen.gaussian(4, 1).asDiagonal();
  const cmat a = u * d1 * u.adjoint(), b = u * d2 * u.adjoint();
  CHECK(commutator_residual(a, b) <= 1e-13);
  CHECK(normality_residual(a) <= 1e-13);
  CHECK(normality_residual(gen.gaussian(4, 4)) > 1e-3);
  CHECK_THROWS_AS(commutator_residual(cmat::Identity(2, 2), cmat::Identity(3, 3)), Error);
}

TEST_CASE("templates work for single precision") {
  oracle::Gen gen(81);
  const Eigen::MatrixXcf h = gen.hermitian(5).cast<std::complex<float>>();
  const auto spec = hermitian_eig(h, 1e-6f);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcf> ref(h);
  CHECK((spec.values - ref.eigenvalues().reverse()).cwiseAbs().maxCoeff() <= 1e-5f * h.norm());
}

TEST_CASE("seeded reconstruction and factorization checks") {
  Rng rng(7);
  const cmat g = rng.ginibre(6, 6);
  const cmat h = (g + g.adjoint()) / 2.0;
  const auto spec = hermitian_eig(h);
  CHECK((spec.vectors * spec.values.cast<cplx>().asDiagonal() * spec.vectors.adjoint() - h).norm() <= 1e-10);

  Rng r11(11);
  const cmat f = r11.ginibre(4, 2);
  const cmat psd = f * f.adjoint();
  const cmat root = psd_sqrt(psd);
  CHECK((root * root - psd).norm() <= 1e-9);

  Rng r5(5);
  const cmat f5 = r5.ginibre(4, 4);
  const cmat rho = f5 * f5.adjoint();
  const cmat r = qr_upper(psd_sqrt(rho));
  CHECK((r.adjoint() * r - rho).norm() <= 1e-9);
}

TEST_CASE("rank-one norms and the Pauli commutator") {
  oracle::Gen gen(91);
  const cvec u = gen.unit(3), v = gen.unit(4);
  const auto n = norms((u * v.adjoint()).eval());
  CHECK(n.trace == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(n.frobenius == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(n.op == doctest::Approx(1.0).epsilon(1e-14));

  cmat x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  CHECK(commutator_residual(x, z) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
}
