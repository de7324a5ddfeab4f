#include "sepfactory/commands.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sepfactory/error.hpp"
#include "sepfactory/linalg.hpp"
#include "sepfactory/witness.hpp"

namespace sepfactory {

using io::json;
namespace fs = std::filesystem;

json RunReport::to_json() const {
  json out = json::object();
  out["command"] = command;
  out["inputs"] = inputs;
  out["verdicts"] = verdicts;
  out["residuals"] = residuals;
  if (!details.empty()) out["details"] = details;
  if (!notes.empty()) out["notes"] = notes;
  out["timing_ms"] = timing_ms;
  out["exit_code"] = exit_code;
  return out;
}

namespace {

bool is_input_error(ErrorCode code) {
  return code == ErrorCode::Format || code == ErrorCode::DimensionMismatch || code == ErrorCode::NonFinite;
}

// Runs body, timing it and mapping escaped exceptions onto the exit-code contract.
template <typename Body>
RunReport run(const std::string& name, Body&& body) {
  RunReport report;
  report.command = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(report);
  } catch (const RangeMismatch& e) {
    report.exit_code = 1;
    report.details["error"] = {{"code", to_string(e.code())}, {"message", e.what()}, {"row", e.row()}, {"col", e.col()}};
  } catch (const Error& e) {
    report.exit_code = is_input_error(e.code()) ? 2 : 1;
    report.details["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
  } catch (const std::exception& e) {
    report.exit_code = 2;
    report.details["error"] = {{"code", "Exception"}, {"message", e.what()}};
  }
  report.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void record_input(RunReport& report, const fs::path& path) {
  report.inputs.push_back({{"path", path.string()}, {"digest", io::file_digest(path)}});
}

BipartiteOperator load_state(const json& doc) {
  return io::matrix_file_from_json(doc).as_bipartite();
}

// Records the state check; returns false (and sets exit 2) when the input is not a state.
bool require_valid_state(RunReport& report, const BipartiteOperator& rho, const Tolerances& tols) {
  const StateCheck check = check_state(rho, tols.state_tol);
  report.verdicts["state"] = to_string(check.verdict);
  report.details["state_check"] = {{"hermitian", check.is_hermitian},
                                   {"min_eigenvalue", check.min_eigenvalue},
                                   {"trace", {check.trace.real(), check.trace.imag()}}};
  if (check.verdict != Verdict::ValidState) {
    report.exit_code = 2;
    report.notes.push_back("input is not a valid density matrix");
    return false;
  }
  return true;
}

void record_ppt(RunReport& report, const BipartiteOperator& rho, const Tolerances& tols) {
  const PptResult ppt = is_ppt(rho, tols.ppt_tol);
  report.verdicts["ppt"] = ppt.ppt;
  report.residuals["min_eig_TA"] = ppt.min_eig_ta;
  report.residuals["min_eig_TB"] = ppt.min_eig_tb;
}

void record_ssppt(RunReport& report, const SemiSspptReport& ssppt) {
  report.verdicts["semi_ssppt"] = ssppt.verdict;
  report.residuals["worst_commutator"] = ssppt.worst_residual();
  json rows = json::array();
  for (const auto& r : ssppt.rows) {
    json row = {{"row", r.row + 1}, {"normality", r.normality}, {"cross", r.cross}, {"scale", r.scale}, {"ok", r.ok}};
    if (r.worst_i >= 0) row["worst_pair"] = {r.worst_i + 1, r.worst_j + 1};
    rows.push_back(std::move(row));
  }
  report.details["semi_ssppt_rows"] = std::move(rows);
}

fs::path default_cert_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension();
  p += ".cert.json";
  return p;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

RunReport cmd_gen(const GeneratorSpec& spec, const fs::path& out, std::optional<fs::path> cert_out,
                  const Tolerances& tols) {
  return run("gen", [&](RunReport& report) {
    report.details["spec"] = io::to_json(spec);
    const GeneratedState g = generate(spec);

    json metadata = {{"kind", to_string(spec.kind)}, {"seed", spec.seed}, {"spec", io::to_json(spec)}};
    io::write_document(out, io::to_json(io::state_file(g.rho, "state", metadata)));
    report.details["state_path"] = out.string();

    const bool valid = require_valid_state(report, g.rho, tols);
    record_ppt(report, g.rho, tols);
    if (g.cert) {
      const fs::path cp = cert_out ? *cert_out : default_cert_path(out);
      io::write_document(cp, io::to_json(*g.cert));
      report.details["certificate_path"] = cp.string();
      report.residuals["hilbert_schmidt_mass"] = g.cert->hilbert_schmidt_mass();
      record_ssppt(report, verify_semi_ssppt(*g.cert, tols.tol));
    }
    report.exit_code = valid ? 0 : 1;
  });
}

RunReport cmd_certify(const fs::path& state, const Tolerances& tols, std::optional<fs::path> cert_out) {
  return run("certify", [&](RunReport& report) {
    const json doc = io::read_document(state);
    record_input(report, state);
    const BipartiteOperator rho = load_state(doc);
    if (!require_valid_state(report, rho, tols)) return;
    record_ppt(report, rho, tols);

    CholeskyCertificate cert;
    try {
      const BlockGrid u = block_cholesky(rho, tols.state_tol);
      cert = extract_operators(u, {tols.rank_tol});
    } catch (const RangeMismatch& e) {
      report.verdicts["semi_ssppt"] = false;
      report.details["range_mismatch"] = {{"row", e.row()}, {"col", e.col()}, {"residual", e.residual()}};
      report.notes.push_back("no Cholesky-operator form for this row in the stored basis");
      report.exit_code = 1;
      return;
    }
    const SemiSspptReport ssppt = verify_semi_ssppt(cert, tols.tol);
    record_ssppt(report, ssppt);
    if (cert_out) {
      io::write_document(*cert_out, io::to_json(cert));
      report.details["certificate_path"] = cert_out->string();
    }
    report.exit_code = ssppt.verdict ? 0 : 1;
  });
}

RunReport cmd_decompose(const fs::path& input, const fs::path& out, bool use_qubit_pathway, std::uint64_t seed,
                        const Tolerances& tols) {
  return run("decompose", [&](RunReport& report) {
    const json doc = io::read_document(input);
    record_input(report, input);
    report.details["qubit_pathway"] = use_qubit_pathway;

    std::optional<CholeskyCertificate> cert;
    BipartiteOperator rho;
    if (io::document_type(doc) == "certificate") {
      cert = io::certificate_from_json(doc);
      rho = assemble_state(*cert).rho;
    } else {
      rho = load_state(doc);
    }
    if (!require_valid_state(report, rho, tols)) return;
    record_ppt(report, rho, tols);

    EnsembleOptions eo;
    eo.tol = tols.tol;
    eo.seed = seed;
    ProductEnsemble ensemble;
    if (use_qubit_pathway) {
      if (rho.dim_a() != 2 && rho.dim_b() != 2)
        throw Error(ErrorCode::DimensionMismatch, "--qubit-pathway needs a two-dimensional subsystem");
      QubitPathwayOptions qo;
      qo.tol = tols.tol;
      qo.rank_tol = tols.rank_tol;
      qo.seed = seed;
      auto result = qubit_pathway(rho, qo);
      record_ssppt(report, verify_semi_ssppt(result.cert, tols.tol));
      ensemble = std::move(result.ensemble);
    } else {
      if (!cert) {
        try {
          cert = extract_operators(block_cholesky(rho, tols.state_tol), {tols.rank_tol});
        } catch (const RangeMismatch&) {
          report.verdicts["semi_ssppt"] = false;
          throw;
        }
      }
      record_ssppt(report, verify_semi_ssppt(*cert, tols.tol));
      ensemble = extract_ensemble(*cert, eo);
    }

    const double residual = trace_norm((reconstruct(ensemble).matrix() - rho.matrix()).eval());
    report.residuals["reconstruction_trace_norm"] = residual;
    report.verdicts["ensemble_terms"] = ensemble.terms.size();
    report.verdicts["reconstructs"] = residual <= kReconstructionTol;
    io::write_document(out, io::to_json(ensemble));
    report.details["ensemble_path"] = out.string();
    report.exit_code = residual <= kReconstructionTol ? 0 : 1;
  });
}

RunReport cmd_witness(const fs::path& state, std::size_t samples, std::uint64_t seed, std::optional<fs::path> out,
                      const Tolerances& tols) {
  return run("witness", [&](RunReport& report) {
    const json doc = io::read_document(state);
    record_input(report, state);
    const BipartiteOperator rho = load_state(doc);
    if (!require_valid_state(report, rho, tols)) return;

    auto witness = npt_witness(rho, tols.ppt_tol);
    report.verdicts["witness_found"] = witness.has_value();
    if (!witness) {
      report.notes.push_back("both partial transposes are positive; no decomposable witness exists");
      report.exit_code = 1;
      return;
    }
    report.residuals["value_on_target"] = witness->value_on_target;
    report.details["side"] = witness->side == Side::A ? "A" : "B";
    if (samples == 0) {
      report.notes.push_back("samples = 0: product pairing check skipped");
    } else {
      witness->samples = samples;
      witness->pairing_min = product_pairing_min(witness->w, samples, seed);
      report.residuals["pairing_min"] = witness->pairing_min;
      report.details["samples"] = samples;
      report.verdicts["pairing_nonnegative"] = witness->pairing_min >= -1e-9;
    }
    if (out) {
      json metadata = {{"side", witness->side == Side::A ? "A" : "B"},
                       {"value_on_target", witness->value_on_target},
                       {"samples", witness->samples}};
      if (witness->samples) metadata["pairing_min"] = witness->pairing_min;
      io::write_document(*out, io::to_json(io::state_file(witness->w, "witness", metadata)));
      report.details["witness_path"] = out->string();
    }
    report.exit_code = 0;
  });
}

RunReport cmd_truncate_study(const fs::path& state, Index steps, std::optional<fs::path> csv_out) {
  return run("truncate-study", [&](RunReport& report) {
    const json doc = io::read_document(state);
    record_input(report, state);
    const BipartiteOperator rho = load_state(doc);
    if (rho.dim_a() < 2 || rho.dim_b() < 2)
      throw Error(ErrorCode::DimensionMismatch, "truncate-study needs dims >= 2x2");

    const Index k_max = std::max(rho.dim_a(), rho.dim_b());
    const Index count = steps <= 0 ? k_max : std::min(steps, k_max);
    std::ostringstream csv;
    csv << "k,k_a,k_b,retained_trace,trace_distance\n";
    json table = json::array();
    bool finite = true;
    for (Index k = 1; k <= count; ++k) {
      const Index ka = std::min(k, rho.dim_a());
      const Index kb = std::min(k, rho.dim_b());
      double retained = 0;
      for (Index i = 0; i < ka; ++i) retained += rho.matrix().block(i * rho.dim_b(), i * rho.dim_b(), kb, kb).trace().real();
      double distance = std::numeric_limits<double>::quiet_NaN();
      try {
        const BipartiteOperator cut = embed(truncate(rho, ka, kb), rho.dim_a(), rho.dim_b());
        distance = trace_norm((rho.matrix() - cut.matrix()).eval());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroTrace) throw;
        finite = false;
      }
      csv << k << ',' << ka << ',' << kb << ',' << csv_number(retained) << ',' << csv_number(distance) << '\n';
      table.push_back({{"k", k}, {"k_a", ka}, {"k_b", kb}, {"retained_trace", retained},
                       {"trace_distance", std::isfinite(distance) ? json(distance) : json(nullptr)}});
    }
    report.details["table"] = std::move(table);
    report.verdicts["finite"] = finite;
    if (csv_out) {
      io::write_atomic(*csv_out, csv.str());
      report.details["csv_path"] = csv_out->string();
    } else {
      report.details["csv"] = csv.str();
    }
    report.exit_code = 0;
  });
}

}  // namespace sepfactory
