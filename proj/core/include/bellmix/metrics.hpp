#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "bellmix/qubit_algebra.hpp"

namespace bellmix {

/// tr(rho^2), in [1/4, 1].
double purity(const DensityMatrix& rho);

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), l_k the descending square
/// roots of the eigenvalues of rho (Y x Y) rho* (Y x Y).
double concurrence(const DensityMatrix& rho);

/// Squared concurrence.
double tangle(const DensityMatrix& rho);

struct CoincidencePair {
  double plus45 = 0.0;   // signal HWP at +22.5 deg
  double minus45 = 0.0;  // signal HWP at -22.5 deg
};

/// Transmitted-transmitted coincidence probabilities with the idler HWP at
/// -22.5 deg, QWPs at 0 and the signal HWP at +-22.5 deg.
CoincidencePair pm45_coincidences(const DensityMatrix& rho);

/// |(N+ - N-) / (N+ + N-)| from pm45_coincidences. Throws
/// DegenerateDenominator if N+ + N- < 1e-15.
double visibility(const DensityMatrix& rho);

/// Root fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Closed forms for the duty-cycle family.
double purity_theory(double alpha);
double tangle_theory(double alpha);
double visibility_theory(double alpha);

struct MetricsReport {
  double purity = 0.0;
  double tangle = 0.0;
  double visibility = 0.0;
  double fidelity_to_target = 0.0;
  std::string target_description;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport compute_metrics(const DensityMatrix& rho, const DensityMatrix& target,
                              std::string target_description);

nlohmann::json metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::json& j);

/// "alpha,purity,tangle,visibility,fidelity"
std::string metrics_csv_header();
std::string metrics_csv_row(double alpha, const MetricsReport& report);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

}  // namespace bellmix
