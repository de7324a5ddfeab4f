#include <doctest.h>

#include "oracles.hpp"
#include "sepfactory/bipartite.hpp"
#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"

using namespace sepfactory;

namespace {

BipartiteOperator random_state(oracle::Gen& gen, Index da, Index db, Index rank = 0) {
  return {da, db, gen.density(da * db, rank)};
}

cmat bell(Index d) {
  cvec phi = cvec::Zero(d * d);
  for (Index i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(double(d));
  return phi * phi.adjoint();
}

}  // namespace

TEST_CASE("constructor validates shape and finiteness") {
  CHECK_THROWS_AS(BipartiteOperator(2, 3, cmat::Identity(5, 5)), Error);
  CHECK_THROWS_AS(BipartiteOperator(0, 3, cmat(0, 0)), Error);
  cmat m = cmat::Identity(4, 4);
  m(1, 2) = std::numeric_limits<double>::infinity();
  try {
    BipartiteOperator(2, 2, m);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
}

TEST_CASE("partial transposes match index-loop oracles") {
  oracle::Gen gen(101);
  for (auto [da, db] : {std::pair<Index, Index>{2, 2}, {2, 3}, {3, 2}, {3, 4}}) {
    const auto rho = random_state(gen, da, db);
    CHECK(partial_transpose(rho, Side::A).matrix() == oracle::partial_transpose_a(rho.matrix(), da, db));
    CHECK(partial_transpose(rho, Side::B).matrix() == oracle::partial_transpose_b(rho.matrix(), da, db));
    // T_A T_B is the full transpose
    const auto both = partial_transpose(partial_transpose(rho, Side::A), Side::B);
    CHECK((both.matrix() - rho.matrix().transpose()).norm() == 0);
  }
}

TEST_CASE("partial traces match index-loop oracles") {
  oracle::Gen gen(102);
  const auto rho = random_state(gen, 3, 4);
  CHECK((partial_trace(rho, Side::B) - oracle::trace_out_b(rho.matrix(), 3, 4)).norm() <= 1e-15);
  CHECK((partial_trace(rho, Side::A) - oracle::trace_out_a(rho.matrix(), 3, 4)).norm() <= 1e-15);
  CHECK(partial_trace(rho, Side::A).trace().real() == doctest::Approx(1.0));
}

TEST_CASE("kron agrees with the oracle and the vector form") {
  oracle::Gen gen(103);
  const cmat a = gen.gaussian(2, 2), b = gen.gaussian(3, 3);
  const auto k = kron(a, b);
  CHECK(k.dim_a() == 2);
  CHECK(k.dim_b() == 3);
  CHECK((k.matrix() - oracle::kron(a, b)).norm() == 0);

  const cvec u = gen.unit(2), v = gen.unit(3);
  const cvec uv = kron(u, v);
  CHECK((uv * uv.adjoint() - kron(cmat(u * u.adjoint()), cmat(v * v.adjoint())).matrix()).norm() <= 1e-15);
}

TEST_CASE("blocks / from_blocks round trip on both sides") {
  oracle::Gen gen(104);
  const auto rho = random_state(gen, 3, 2);
  for (Side s : {Side::A, Side::B}) {
    const auto g = blocks(rho, s);
    CHECK(from_blocks(g, s).matrix() == rho.matrix());
  }
  const auto ga = blocks(rho, Side::A);
  CHECK(ga.size == 3);
  CHECK(ga(1, 2) == rho.block(1, 2));
  // B-side blocks are the A-side blocks of the swapped operator
  const auto gb = blocks(rho, Side::B);
  const auto swapped = blocks(swap_subsystems(rho), Side::A);
  for (Index k = 0; k < 2; ++k)
    for (Index l = 0; l < 2; ++l) CHECK(gb(k, l) == swapped(k, l));
}

TEST_CASE("swap_subsystems on products and involution") {
  oracle::Gen gen(105);
  const cmat a = gen.density(2), b = gen.density(3);
  const auto ab = kron(a, b);
  CHECK((swap_subsystems(ab).matrix() - kron(b, a).matrix()).norm() <= 1e-15);
  const auto rho = random_state(gen, 2, 3);
  CHECK(swap_subsystems(swap_subsystems(rho)).matrix() == rho.matrix());
}

TEST_CASE("local_conjugate preserves spectrum and PPT") {
  oracle::Gen gen(106);
  const auto rho = BipartiteOperator(2, 2, bell(2));
  const auto out = local_conjugate(rho, gen.unitary(2), gen.unitary(2));
  CHECK((oracle::eigenvalues(out.matrix()) - oracle::eigenvalues(rho.matrix())).norm() <= 1e-12);
  CHECK(is_ppt(out).min_eig_tb == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("is_ppt: Bell states, products, and the oracle") {
  for (Index d : {2, 3, 4}) {
    const auto r = is_ppt(BipartiteOperator(d, d, bell(d)));
    CHECK_FALSE(r.ppt);
    CHECK(std::abs(r.min_eig_ta + 1.0 / d) <= 1e-10);
    CHECK(std::abs(r.min_eig_tb + 1.0 / d) <= 1e-10);
  }
  oracle::Gen gen(107);
  const auto prod = kron(gen.density(3), gen.density(2));
  CHECK(is_ppt(prod).ppt);

  const auto rho = random_state(gen, 2, 3);
  const auto r = is_ppt(rho);
  CHECK(r.min_eig_tb == doctest::Approx(oracle::min_eigenvalue(oracle::partial_transpose_b(rho.matrix(), 2, 3))).epsilon(1e-10));

  cmat bad = rho.matrix();
  bad(0, 1) += 0.1;
  CHECK_THROWS_AS(is_ppt(BipartiteOperator(2, 3, bad)), Error);
}

TEST_CASE("truncate and embed") {
  oracle::Gen gen(108);
  const auto rho = random_state(gen, 3, 4);
  CHECK((embed(truncate(rho, 3, 4), 3, 4).matrix() - rho.matrix()).norm() <= 1e-15);

  const auto t = truncate(rho, 2, 3);
  CHECK(t.dim_a() == 2);
  CHECK(t.dim_b() == 3);
  CHECK(t.trace().real() == doctest::Approx(1.0));
  // (P (x) Q) rho (P (x) Q) evaluated directly
  cmat p = cmat::Zero(3, 3), q = cmat::Zero(4, 4);
  p.topLeftCorner(2, 2).setIdentity();
  q.topLeftCorner(3, 3).setIdentity();
  const cmat pq = oracle::kron(p, q);
  cmat direct = pq * rho.matrix() * pq;
  direct /= direct.trace().real();
  CHECK((embed(t, 3, 4).matrix() - direct).norm() <= 1e-14);

  cmat corner = cmat::Zero(4, 4);
  corner(3, 3) = 1;
  CHECK_THROWS_AS(truncate(BipartiteOperator(2, 2, corner), 1, 1), Error);
  CHECK_THROWS_AS(truncate(rho, 4, 1), Error);
}

TEST_CASE("check_state ordering of verdicts") {
  oracle::Gen gen(109);
  const auto rho = random_state(gen, 2, 2);
  CHECK(check_state(rho).verdict == Verdict::ValidState);
  CHECK(std::string(to_string(Verdict::ValidState)) == "valid_state");

  CHECK(check_state(BipartiteOperator(2, 2, rho.matrix() * 2.0)).verdict == Verdict::NotNormalized);

  cmat neg = cmat::Identity(4, 4) * 0.5;
  neg(3, 3) = -0.5;
  CHECK(check_state(BipartiteOperator(2, 2, neg)).verdict == Verdict::NotPsd);

  cmat nh = rho.matrix();
  nh(0, 3) += cplx(0, 0.2);
  const auto c = check_state(BipartiteOperator(2, 2, nh));
  CHECK(c.verdict == Verdict::NotHermitian);
  CHECK_FALSE(c.is_hermitian);
}

TEST_CASE("trace of a product and the reduced Bell state") {
  oracle::Gen gen(110);
  for (int t = 0; t < 5; ++t) {
    const cmat a = gen.gaussian(3, 3), b = gen.gaussian(3, 3);
    CHECK(std::abs(kron(a, b).trace() - a.trace() * b.trace()) <= 1e-12 * (1 + std::abs(a.trace() * b.trace())));
  }
  const BipartiteOperator phi(2, 2, bell(2));
  CHECK((partial_trace(phi, Side::A) - cmat::Identity(2, 2) / 2.0).norm() <= 1e-15);
  CHECK((partial_trace(phi, Side::B) - cmat::Identity(2, 2) / 2.0).norm() <= 1e-15);
}

TEST_CASE("truncation distance reaches zero at full size") {
  oracle::Gen gen(111);
  for (int t = 0; t < 5; ++t) {
    const auto rho = random_state(gen, 4, 4);
    double last = 0;
    for (Index k = 1; k <= 4; ++k) {
      last = oracle::trace_norm(rho.matrix() - embed(truncate(rho, k, k), 4, 4).matrix());
      CHECK(last <= 2 + 1e-12);
    }
    CHECK(last <= 1e-12);
  }
}
