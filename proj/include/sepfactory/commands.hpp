#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sepfactory/generators.hpp"
#include "sepfactory/io.hpp"

namespace sepfactory {

/// Numerical thresholds shared by all commands.
struct Tolerances {
  double tol = 1e-8;         // commutator / normality checks
  double ppt_tol = 1e-9;     // partial-transpose eigenvalues
  double rank_tol = 1e-10;   // pseudoinverse cutoff
  double state_tol = 1e-8;   // hermiticity, trace and PSD checks on input states
};

inline constexpr double kReconstructionTol = 1e-8;

/// Exit codes: 0 all requested verdicts hold, 1 a negative mathematical
/// verdict, 2 an input or format problem.
struct RunReport {
  std::string command;
  io::json inputs = io::json::array();
  io::json verdicts = io::json::object();
  io::json residuals = io::json::object();
  io::json details = io::json::object();
  io::json notes = io::json::array();
  double timing_ms = 0;
  int exit_code = 0;

  io::json to_json() const;
};

RunReport cmd_gen(const GeneratorSpec& spec, const std::filesystem::path& out,
                  std::optional<std::filesystem::path> cert_out = {}, const Tolerances& tols = {});

RunReport cmd_certify(const std::filesystem::path& state, const Tolerances& tols = {},
                      std::optional<std::filesystem::path> cert_out = {});

RunReport cmd_decompose(const std::filesystem::path& input, const std::filesystem::path& out, bool qubit_pathway,
                        std::uint64_t seed = 0, const Tolerances& tols = {});

RunReport cmd_witness(const std::filesystem::path& state, std::size_t samples, std::uint64_t seed = 0,
                      std::optional<std::filesystem::path> out = {}, const Tolerances& tols = {});

/// steps = 0 runs k = 1..max(dimA, dimB); the projections saturate at the full
/// identity once k reaches a subsystem's dimension.
RunReport cmd_truncate_study(const std::filesystem::path& state, Index steps = 0,
                             std::optional<std::filesystem::path> csv_out = {});

}  // namespace sepfactory
