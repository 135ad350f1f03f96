#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "bellmix/qubit_algebra.hpp"

namespace bellmix {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// (|HH> +- |VV>)/sqrt2 or (|HV> +- |VH>)/sqrt2, real amplitudes.
PureState bell_state(BellKind kind);

/// Environmental noise applied after the duty-cycle average.
struct NoiseParams {
  double dephasing = 0.0;     // damping of signal-polarization coherences (HH<->VV, HV<->VH, ...)
  double depolarizing = 0.0;  // admixture weight of 1/4

  bool operator==(const NoiseParams&) const = default;
};

/// Source settings: pump and signal-arm rotator duty cycles, pump splitting and
/// relative phase, and the noise model.
struct SourceConfig {
  double alpha = 0.0;  // pump rotator duty cycle
  double phi = 0.0;    // pump relative phase, radians
  Complex beta{kInvSqrt2, 0.0};
  Complex gamma{kInvSqrt2, 0.0};
  double signal_dc = 0.0;  // signal-arm rotator duty cycle
  NoiseParams noise;

  /// Throws InvalidConfig naming the offending field.
  void validate() const;

  bool operator==(const SourceConfig&) const = default;
};

/// beta|HH> - e^{i phi} gamma|VV>. Throws NotNormalized unless
/// |beta|^2 + |gamma|^2 = 1 within 1e-12.
PureState pump_state(double phi, Complex beta, Complex gamma);

/// (1 - alpha)|Phi-><Phi-| + alpha|Phi+><Phi+|, i.e. 1/2 on the HH and VV
/// diagonal and (alpha - 1/2) on the HH/VV coherence. Alpha is the fraction
/// of time the pump rotator is at half-wave retardance. OutOfRange unless
/// alpha is in [0, 1].
DensityMatrix mix_duty_cycle(double alpha);

/// Half-wave retardance on the signal arm swaps H and V of the signal photon.
DensityMatrix apply_signal_rotator(const DensityMatrix& state, bool half_wave);

/// Dephasing of the signal polarization: coherences between states that differ
/// in the signal photon are multiplied by (1 - strength).
DensityMatrix apply_dephasing(const DensityMatrix& state, double strength);

/// (1 - weight) rho + weight * 1/4.
DensityMatrix apply_depolarizing(const DensityMatrix& state, double weight);

/// Time average of the four pump/signal rotator branches, then noise.
DensityMatrix generate(const SourceConfig& config);

/// Visibility-matched dephasing for an ideal Bell source: the strength d with
/// visibility(generate({alpha=0, dephasing=d})) == target_visibility.
double dephasing_for_visibility(double target_visibility);

/// Parses the flat JSON source config. Missing fields take their defaults.
/// Throws ParseError for wrong types and InvalidConfig for out-of-range values.
SourceConfig source_config_from_json(const nlohmann::json& j);
nlohmann::json source_config_to_json(const SourceConfig& config);

}  // namespace bellmix
