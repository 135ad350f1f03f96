#pragma once

// Maximum-likelihood state reconstruction from 36-outcome coincidence counts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bellmix/measurement.hpp"
#include "bellmix/metrics.hpp"
#include "bellmix/optics.hpp"
#include "bellmix/qubit_algebra.hpp"

namespace bellmix {

inline constexpr double kProbabilityFloor = 1e-15;

/// sum_j n_j log p_j(rho) over outcomes with n_j > 0, p_j floored at 1e-15.
/// Throws MismatchedData if a record references an unknown or repeated setting.
double log_likelihood(const DensityMatrix& rho, const CountRecords& counts, const ProjectorSet& set);

struct MleOptions {
  int max_iterations = 10000;
  double tolerance = 1e-10;  // relative log-likelihood gain per iteration
  double dilution = 1.0;     // initial epsilon; halved whenever a step lowers the likelihood
  bool record_trace = true;
};

struct ReconstructionTarget {
  DensityMatrix state = DensityMatrix::maximally_mixed();
  std::string description = "maximally mixed";
};

struct MetricErrors {
  double purity = 0.0;
  double tangle = 0.0;
  double visibility = 0.0;
  double fidelity = 0.0;

  bool operator==(const MetricErrors&) const = default;
};

struct ReconstructionResult {
  DensityMatrix rho_hat = DensityMatrix::maximally_mixed();
  double log_likelihood = 0.0;
  int iterations = 0;  // likelihood evaluations after the start state, accepted or not
  bool converged = false;
  int floored_outcomes = 0;  // outcomes with counts but estimated probability below the floor
  double final_dilution = 1.0;
  std::vector<double> log_likelihood_trace;  // start state, then each accepted iterate
  MetricsReport metrics;
  std::optional<MetricErrors> metric_errors;
};

/// Diluted R rho R iteration from 1/4:
///   R = sum_j n_j / (N p_j) Pi_j,  rho <- (1 + eps R) rho (1 + eps R) / tr.
/// Stops when the relative gain drops below `tolerance` (converged) or after
/// max_iterations (not converged). Requires records for every setting of
/// `set` (MismatchedData) and a nonzero total (NoCounts).
ReconstructionResult mle_reconstruct(const CountRecords& counts, const ProjectorSet& set,
                                     const MleOptions& options = {},
                                     const ReconstructionTarget& target = {});

/// Parametric bootstrap: resimulate counts from result.rho_hat with seeds
/// derived from acq.seed, reconstruct, and take the sample standard deviation
/// of each metric. `threads` = 0 uses the hardware concurrency; the output is
/// identical for any thread count.
MetricErrors bootstrap_errors(const ReconstructionResult& result, const ProjectorSet& set,
                              const AcquisitionConfig& acq, int resamples,
                              const MleOptions& options = {},
                              const ReconstructionTarget& target = {}, unsigned threads = 1);

nlohmann::json reconstruction_to_json(const ReconstructionResult& result);
ReconstructionResult reconstruction_from_json(const nlohmann::json& j);

}  // namespace bellmix
