#include <iostream>

#include <CLI11.hpp>

#include "sepfactory/commands.hpp"
#include "sepfactory/error.hpp"

using namespace sepfactory;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"sepfactory: separability certificates from Cholesky operator data"};
  app.require_subcommand(1);

  Tolerances tols;
  std::uint64_t seed = 0;
  std::string report_path;
  app.add_option("--tol", tols.tol, "commutator and normality tolerance")->capture_default_str();
  app.add_option("--ppt-tol", tols.ppt_tol, "partial-transpose eigenvalue tolerance")->capture_default_str();
  app.add_option("--rank-tol", tols.rank_tol, "pseudoinverse rank cutoff")->capture_default_str();
  app.add_option("--state-tol", tols.state_tol, "density-matrix validity tolerance")->capture_default_str();
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--report", report_path, "also write the run report here");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a state (and certificate when one exists)");
  std::string kind = "random_ssppt", spec_path;
  Index dim_a = 2, dim_b = 2, rank = 0;
  bool aligned = false;
  std::string gen_out, gen_cert;
  gen->add_option("--kind", kind, "example1|example2|random_ssppt|random_density|maximally_entangled");
  gen->add_option("--dim-a,--n,--d", dim_a, "dimA (n for example1, d for maximally_entangled)");
  gen->add_option("--dim-b", dim_b, "dimB");
  gen->add_option("--rank", rank, "rank for random_density (0 = full)");
  gen->add_flag("--aligned", aligned, "example2: rho_11, D, T share an eigenbasis");
  gen->add_option("--spec", spec_path, "generator_spec JSON file (overrides the flags)");
  gen->add_option("--out,-o", gen_out, "state file")->required();
  gen->add_option("--cert-out", gen_cert, "certificate file (default <out stem>.cert.json)");

  // certify
  auto* certify = app.add_subcommand("certify", "check the semi-SSPPT condition");
  std::string cert_in, cert_out;
  certify->add_option("state", cert_in, "state file")->required();
  certify->add_option("--cert-out", cert_out, "write the extracted certificate");

  // decompose
  auto* decompose = app.add_subcommand("decompose", "emit a product-state ensemble");
  std::string dec_in, dec_out;
  bool qubit = false;
  decompose->add_option("input", dec_in, "state or certificate file")->required();
  decompose->add_option("--out,-o", dec_out, "ensemble file")->required();
  decompose->add_flag("--qubit-pathway", qubit, "two-block Douglas construction");

  // witness
  auto* witness = app.add_subcommand("witness", "search for a decomposable entanglement witness");
  std::string wit_in, wit_out;
  std::size_t samples = 10000;
  witness->add_option("state", wit_in, "state file")->required();
  witness->add_option("--samples", samples, "random product pairings to check")->capture_default_str();
  witness->add_option("--out,-o", wit_out, "witness file");

  // truncate-study
  auto* study = app.add_subcommand("truncate-study", "trace distance of corner truncations");
  std::string study_in, study_csv;
  Index steps = 0;
  study->add_option("state", study_in, "state file")->required();
  study->add_option("--steps", steps, "number of k values (0 = up to max dims)");
  study->add_option("--csv", study_csv, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto opt = [](const std::string& s) { return s.empty() ? std::optional<fs::path>{} : std::optional<fs::path>{s}; };

  RunReport report;
  if (*gen) {
    GeneratorSpec spec;
    try {
      if (!spec_path.empty()) {
        spec = io::generator_spec_from_json(io::read_document(spec_path));
      } else {
        spec.kind = generator_kind_from_string(kind);
        spec.dim_a = spec.kind == GeneratorKind::Example2 ? 2 : dim_a;
        spec.dim_b = dim_b;
        spec.rank = rank;
        spec.seed = seed;
        spec.aligned = aligned;
      }
    } catch (const Error& e) {
      report.command = "gen";
      report.exit_code = 2;
      report.details["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    }
    if (report.command.empty()) report = cmd_gen(spec, gen_out, opt(gen_cert), tols);
  } else if (*certify) {
    report = cmd_certify(cert_in, tols, opt(cert_out));
  } else if (*decompose) {
    report = cmd_decompose(dec_in, dec_out, qubit, seed, tols);
  } else if (*witness) {
    report = cmd_witness(wit_in, samples, seed, opt(wit_out), tols);
  } else if (*study) {
    report = cmd_truncate_study(study_in, steps, opt(study_csv));
  }

  const io::json doc = report.to_json();
  std::cout << doc.dump(2) << '\n';
  if (!report_path.empty()) {
    try {
      io::write_document(report_path, doc);
    } catch (const Error& e) {
      std::cerr << "sepfactory: " << e.what() << '\n';
      return 2;
    }
  }
  return report.exit_code;
}
