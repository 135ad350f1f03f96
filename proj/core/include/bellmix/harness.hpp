#pragma once

// Duty-cycle sweeps (generate -> simulate -> reconstruct -> metrics) and the
// embedded reference fixtures.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bellmix/measurement.hpp"
#include "bellmix/metrics.hpp"
#include "bellmix/states.hpp"
#include "bellmix/tomography.hpp"

namespace bellmix {

struct SweepSpec {
  std::vector<double> alphas;
  AcquisitionConfig acquisition;  // acquisition.seed is the master seed
  NoiseParams noise;
  std::filesystem::path outputs;  // empty: nothing written
  bool include_completely_mixed = false;
  int resamples = 20;  // bootstrap resamples per point; < 2 disables error bars
  MleOptions mle;

  /// Throws InvalidConfig.
  void validate() const;
};

/// {"alphas": [...], "acquisition": {"pairs_per_setting", "accidental_rate", "seed"},
///  "noise": {"dephasing", "depolarizing"}, "outputs": "dir",
///  "include_completely_mixed": bool, "resamples": int,
///  "mle": {"max_iterations", "tolerance", "dilution"}}
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
nlohmann::json sweep_spec_to_json(const SweepSpec& spec);

struct SweepRow {
  std::string source;  // "pump_vpr" or "two_vpr"
  double alpha = 0.0;
  MetricsReport metrics;
  MetricErrors errors;
  double visibility_theory = 0.0;
  double tangle_theory = 0.0;
  double purity_theory = 0.0;
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string csv;
};

/// Per-point seeds come from (master seed, point index), so the result does
/// not depend on `threads`. When spec.outputs is set, writes
/// alpha_<value>/{state.json,counts.csv,recon.json}, completely_mixed/... and
/// sweep.csv under it. Errors are rethrown with the alpha prepended.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

/// The density matrix reconstructed at alpha = 0.25 as printed (3 decimals).
ComplexMatrix printed_rho_quarter();

struct FixtureCheck {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  bool pass() const { return value >= lower && value <= upper; }
};

/// Reference checks: printed matrix metrics, completely mixed generation and a
/// noise-matched completely mixed tomography run seeded by `seed`.
std::vector<FixtureCheck> reference_fixtures(std::uint64_t seed = 2014);

}  // namespace bellmix
