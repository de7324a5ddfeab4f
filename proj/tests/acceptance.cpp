// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run only criterion N
//   acceptance --known-red N   exit 77 instead of 1 when criterion N fails

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sepfactory/commands.hpp"
#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"
#include "sepfactory/witness.hpp"

using namespace sepfactory;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 ---------------------------------------------------------------------------
Outcome example1_normalization() {
  Outcome o;
  double worst_trace = 0;
  int instances = 0;
  for (Index n = 1; n <= 8; ++n)
    for (Index db = 1; db <= 4; ++db)
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto e = example1_state(n, db, seed);
        const cmat x = e.cert.operator_matrix();
        worst_trace = std::max(worst_trace, std::abs((x.adjoint() * x).trace().real() - 1.0));
        ++instances;
      }
  double worst_tail = 0;
  for (int i = 1; i <= 25; ++i) {
    // n large enough that 4^{-n} is below double resolution of 4^{-i}
    worst_tail = std::max(worst_tail, std::abs(geometric_tail(i, 200) - std::ldexp(1.0, -2 * i) / 3.0));
    for (int n = i; n <= i + 30; ++n) {
      const double closed = (std::ldexp(1.0, -2 * i) - std::ldexp(1.0, -2 * n)) / 3.0;
      worst_tail = std::max(worst_tail, std::abs(geometric_tail(i, n) - closed));
    }
  }
  o.pass = worst_trace <= 1e-12 && worst_tail <= 1e-15;
  o.detail = fmt("%d instances, max |Tr(X^dag X) - 1| = %.2e (tol 1e-12), max tail error = %.2e (tol 1e-15)",
                 instances, worst_trace, worst_tail);
  return o;
}

// 2 ---------------------------------------------------------------------------
Outcome soundness_suite() {
  Outcome o;
  const Index das[] = {2, 3, 4};
  const Index dbs[] = {2, 3, 4, 6};
  int count = 0, bad_verdict = 0, bad_ppt = 0, bad_recon = 0, bad_weight = 0, bad_terms = 0, witnessed = 0;
  double worst_recon = 0, worst_ppt = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 1000; ++t) {
    const Index da = das[t % 3];
    const Index db = dbs[(t / 3) % 4];
    const auto r = random_semi_ssppt(da, db, 1000 + t);
    ++count;
    if (!verify_semi_ssppt(r.cert).verdict) ++bad_verdict;
    // PPT with an independent eigensolver
    const double m = std::min(oracle::min_eigenvalue(oracle::partial_transpose_a(r.rho.matrix(), da, db)),
                              oracle::min_eigenvalue(oracle::partial_transpose_b(r.rho.matrix(), da, db)));
    worst_ppt = std::min(worst_ppt, m);
    if (!is_ppt(r.rho, 1e-9).ppt || m < -1e-9) ++bad_ppt;
    try {
      EnsembleOptions eo;
      eo.seed = t;
      const auto e = extract_ensemble(r.cert, eo);
      const double res = oracle::trace_norm(reconstruct(e).matrix() - r.rho.matrix());
      worst_recon = std::max(worst_recon, res);
      if (res > 1e-8) ++bad_recon;
      for (const auto& term : e.terms)
        if (!(term.weight > 0)) {
          ++bad_weight;
          break;
        }
      if (Index(e.terms.size()) > da * db) ++bad_terms;
    } catch (const Error& e) {
      ++bad_recon;
      o.notes.push_back(fmt("instance %d: %s", t, e.what()));
    }
    if (npt_witness(r.rho)) ++witnessed;
  }
  o.pass = !(bad_verdict || bad_ppt || bad_recon || bad_weight || bad_terms || witnessed);
  o.detail = fmt("%d instances; verdict fails %d, PPT fails %d (min PT eig %.2e), reconstruction fails %d "
                 "(max %.2e, tol 1e-8), non-positive weights %d, too many terms %d, witnesses %d",
                 count, bad_verdict, bad_ppt, worst_ppt, bad_recon, worst_recon, bad_weight, bad_terms, witnessed);
  return o;
}

// 3 ---------------------------------------------------------------------------
Outcome qubit_pathway_suite() {
  Outcome o;
  int ordered = 0, succeeded = 0, succeeded_scalar = 0, npt = 0, normality = 0;
  double worst_order = std::numeric_limits<double>::infinity(), worst_recon = 0;
  std::map<std::string, int> errors;
  for (int t = 0; t < 200; ++t) {
    const Index n = 1 + t % 16;
    const auto rho = random_example2(n, 5000 + t);
    const double gap = oracle::min_eigenvalue(rho.block(0, 0) - rho.block(1, 1));
    worst_order = std::min(worst_order, gap);
    if (gap >= -1e-10) ++ordered;
    if (oracle::min_eigenvalue(oracle::partial_transpose_a(rho.matrix(), 2, n)) < -1e-9) ++npt;
    try {
      QubitPathwayOptions qo;
      qo.seed = t;
      const auto r = qubit_pathway(rho, qo);
      const double res = oracle::trace_norm(reconstruct(r.ensemble).matrix() - rho.matrix());
      worst_recon = std::max(worst_recon, res);
      if (res <= 1e-8) {
        ++succeeded;
        if (n == 1) ++succeeded_scalar;
      }
    } catch (const Error& e) {
      ++errors[to_string(e.code())];
      if (e.code() == ErrorCode::NormalityFailed) ++normality;
    }
  }

  // The same pipeline on draws where rho_11, D and T share an eigenbasis.
  int aligned_ok = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n = 1 + t % 16;
    const auto rho = random_example2(n, 5000 + t, true);
    try {
      const auto r = qubit_pathway(rho);
      if (oracle::trace_norm(reconstruct(r.ensemble).matrix() - rho.matrix()) <= 1e-8) ++aligned_ok;
    } catch (const Error&) {
    }
  }

  o.pass = ordered == 200 && succeeded == 200;
  std::string errs;
  for (const auto& [k, v] : errors) errs += fmt(" %s=%d", k.c_str(), v);
  o.detail = fmt("200 instances; ordering holds %d/200 (min gap %.2e), pathway succeeds %d/200 "
                 "(max residual %.2e), errors:%s",
                 ordered, worst_order, succeeded, worst_recon, errs.empty() ? " none" : errs.c_str());
  o.notes.push_back(fmt("%d/200 generic instances have a negative partial transpose (entangled), so no "
                        "separable decomposition exists for them",
                        npt));
  o.notes.push_back(fmt("%d/200 fail because S_12 = T S^dagger is not normal; the two-block factor then "
                        "gives rho^{T_A} != Y^dagger Y",
                        normality));
  o.notes.push_back(fmt("%d of the %d successes are 2 (x) 1 instances, where S_12 is a scalar", succeeded_scalar,
                        succeeded));
  o.notes.push_back(fmt("aligned draws (rho_11, D, T jointly diagonal): pathway succeeds %d/200", aligned_ok));
  return o;
}

// 4 ---------------------------------------------------------------------------
Outcome entangled_controls() {
  Outcome o;
  bool ok = true;
  std::string parts;
  for (Index d : {2, 3, 4}) {
    const auto rho = maximally_entangled(d);
    const auto ppt = is_ppt(rho);
    const double target = -1.0 / double(d);
    const double pt_err = std::max(std::abs(ppt.min_eig_ta - target), std::abs(ppt.min_eig_tb - target));
    const auto w = npt_witness(rho);
    const double w_err = w ? std::abs(w->value_on_target - target) : 1.0;
    const double pairing = w ? product_pairing_min(w->w, 10000, 17) : -1.0;
    const bool good = pt_err <= 1e-10 && w_err <= 1e-10 && pairing >= -1e-9;
    ok = ok && good;
    parts += fmt(" d=%d: PT err %.1e, witness err %.1e, pairing min %.3e;", int(d), pt_err, w_err, pairing);
  }
  // d = 2 brute force: build |Phi+><Phi+|, transpose B by index loops, Eigen eigensolve
  cmat bell = cmat::Zero(4, 4);
  for (int i : {0, 3})
    for (int j : {0, 3}) bell(i, j) = 0.5;
  const double brute = oracle::min_eigenvalue(oracle::partial_transpose_b(bell, 2, 2));
  const bool brute_ok = std::abs(brute + 0.5) <= 1e-10 &&
                        std::abs(is_ppt(maximally_entangled(2)).min_eig_tb - brute) <= 1e-10;
  o.pass = ok && brute_ok;
  o.detail = parts + fmt(" 4x4 brute force %.15f", brute);
  return o;
}

// 5 ---------------------------------------------------------------------------
double conj_residual(const cmat& v, const cmat& s) {
  cmat d = v.adjoint() * s * v;
  d.diagonal().setZero();
  return d.norm();
}

Outcome joint_diagonalization() {
  Outcome o;
  oracle::Gen gen(555);
  double worst = 0;
  int failures = 0;
  for (int t = 0; t < 500; ++t) {
    const Index dim = gen.integer(1, 8);
    const cmat u = gen.unitary(dim);
    cvec spec = gen.gaussian(dim, 1);
    if (t % 3 == 0 && dim > 1) spec(dim - 1) = spec(0);  // repeated eigenvalue
    const cmat nrm = u * spec.asDiagonal() * u.adjoint();
    const cmat id = cmat::Identity(dim, dim);
    const std::vector<cmat> funcs{nrm, nrm.adjoint(), nrm * nrm + 0.5 * id, nrm.adjoint() * nrm,
                                  (nrm - 3.0 * id).inverse()};
    std::vector<cmat> fam;
    const int size = gen.integer(1, 4);
    for (int i = 0; i < size; ++i) fam.push_back(funcs[std::size_t(gen.integer(0, 4))]);
    try {
      JointDiagOptions jo;
      jo.seed = t;
      const auto b = joint_diagonalize(fam, dim, jo);
      for (const auto& s : fam) worst = std::max(worst, conj_residual(b.v, s));
    } catch (const Error& e) {
      ++failures;
      o.notes.push_back(fmt("family %d: %s", t, e.what()));
    }
  }

  // Degenerate-spectrum fixture: the attempt-0 mix separates two eigenvalues by
  // 1e-9 relative, too close for accurate eigenvectors.
  const auto c = joint_diag_coefficients(0, 0, 2);
  Rng rng(5);
  const cmat v = random_unitary(3, rng);
  cvec lam(3);
  lam << cplx(1, 0), cplx(1 - (1e-9 * 3.5 + c[1]) / c[0], 1.0), cplx(-1, -1);
  const std::vector<cmat> fixture{cmat(v * lam.asDiagonal() * v.adjoint())};
  int attempts = 0;
  double fixture_res = 1;
  try {
    const auto b = joint_diagonalize(fixture, 3);
    attempts = b.attempts;
    fixture_res = conj_residual(b.v, fixture[0]);
  } catch (const Error& e) {
    o.notes.push_back(std::string("retry fixture: ") + e.what());
  }
  o.pass = failures == 0 && worst <= 1e-9 && attempts > 1 && fixture_res <= 1e-9;
  o.detail = fmt("500 families, %d failures, max conjugation residual %.2e (tol 1e-9); retry fixture took %d "
                 "attempts, residual %.2e",
                 failures, worst, attempts, fixture_res);
  return o;
}

// 6 ---------------------------------------------------------------------------
Outcome round_trips(const fs::path& fixtures) {
  Outcome o;
  oracle::Gen gen(666);
  double worst = 0;
  int failures = 0;
  for (int t = 0; t < 500; ++t) {
    CholeskyCertificate c;
    c.dim_a = gen.integer(2, 4);
    c.dim_b = gen.integer(2, 4);
    for (Index k = 0; k < c.dim_a; ++k) {
      cmat x = gen.gaussian(c.dim_b, c.dim_b);
      if (oracle::singular_values(x).minCoeff() < 1e-3) x += cmat::Identity(c.dim_b, c.dim_b);
      c.x.push_back(x);
      for (Index j = k + 1; j < c.dim_a; ++j) c.s.emplace(std::make_pair(k, j), gen.gaussian(c.dim_b, c.dim_b));
    }
    c.refresh_row_norms();
    try {
      const auto rho = assemble_state(c).rho;
      const auto back = assemble_state(extract_operators(block_cholesky(rho))).rho;
      worst = std::max(worst, oracle::trace_norm(back.matrix() - rho.matrix()));
    } catch (const Error& e) {
      ++failures;
      o.notes.push_back(fmt("certificate %d: %s", t, e.what()));
    }
  }

  int files = 0, changed = 0;
  const fs::path tmp = fs::temp_directory_path() / "sepfactory_acceptance_roundtrip.json";
  for (const auto& entry : fs::directory_iterator(fixtures)) {
    const fs::path p = entry.path();
    if (p.extension() != ".json" || p.filename().string().find(".cert.") != std::string::npos) continue;
    const auto first = cmd_certify(p);
    if (first.exit_code == 2) continue;  // malformed fixtures have nothing to round-trip
    const auto rho = io::matrix_file_from_json(io::read_document(p)).as_bipartite();
    io::write_document(tmp, io::to_json(io::state_file(rho)));
    const auto second = cmd_certify(tmp);
    ++files;
    if (first.verdicts != second.verdicts || first.exit_code != second.exit_code) {
      ++changed;
      o.notes.push_back("verdict changed for " + p.filename().string());
    }
  }
  fs::remove(tmp);
  o.pass = failures == 0 && worst <= 1e-8 && changed == 0 && files > 0;
  o.detail = fmt("500 certificates, %d failures, max trace-norm residual %.2e (tol 1e-8); %d fixture files, "
                 "%d verdict changes after save/load",
                 failures, worst, files, changed);
  return o;
}

// 7 ---------------------------------------------------------------------------
Outcome truncation_study() {
  Outcome o;
  oracle::Gen gen(777);
  double worst_full = 0;
  bool finite = true;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (int t = 0; t < 50; ++t) {
    const BipartiteOperator rho(4, 4, gen.density(16));
    for (Index k = 1; k <= 4; ++k) {
      const double d = oracle::trace_norm(rho.matrix() - embed(truncate(rho, k, k), 4, 4).matrix());
      finite = finite && std::isfinite(d);
      mean(k - 1) += d / 50;
      if (k == 4) worst_full = std::max(worst_full, d);
    }
  }
  o.pass = finite && worst_full <= 1e-12;
  o.detail = fmt("50 states, mean distance k=1..4: %.4f %.4f %.4f %.2e; max at k=4 %.2e (tol 1e-12)", mean(0),
                 mean(1), mean(2), mean(3), worst_full);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::set<int> known_red;
  fs::path fixtures = FIXTURE_DIR;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--known-red") && i + 1 < argc)
      known_red.insert(std::atoi(argv[++i]));
    else if (!std::strcmp(argv[i], "--fixtures") && i + 1 < argc)
      fixtures = argv[++i];
  }

  const std::vector<Criterion> criteria{
      {1, "example1-normalization", 1, example1_normalization},
      {2, "certificate-soundness", 60, soundness_suite},
      {3, "qubit-pathway", 30, qubit_pathway_suite},
      {4, "entangled-controls", 10, entangled_controls},
      {5, "joint-diagonalization", 20, joint_diagonalization},
      {6, "round-trips", 20, [&] { return round_trips(fixtures); }},
      {7, "truncation-study", 5, truncation_study},
  };

  int failed = 0, failed_known = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("uncaught: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = out.pass && in_time;
    std::printf("[%s] %d %s: %s; %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_s);
    for (std::size_t i = 0; i < out.notes.size() && i < 10; ++i) std::printf("       %s\n", out.notes[i].c_str());
    if (!pass) (known_red.count(c.id) ? failed_known : failed)++;
  }
  std::fflush(stdout);
  if (failed) return 1;
  if (failed_known) return 77;
  return 0;
}
