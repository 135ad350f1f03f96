#pragma once

// Jones-calculus model of the two-arm polarization analyzer
// (HWP -> QWP -> PBS in each arm) and the 36-outcome tomography set.

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bellmix/qubit_algebra.hpp"

namespace bellmix {

inline constexpr double kHalfWave = 3.14159265358979323846;
inline constexpr double kQuarterWave = kHalfWave / 2.0;

struct WaveplateSetting {
  double qwp_angle = 0.0;  // degrees, fast axis from horizontal
  double hwp_angle = 0.0;  // degrees

  bool operator==(const WaveplateSetting&) const = default;
};

/// R(angle) * diag(1, e^{-i retardance}) * R(-angle); angle in degrees.
Matrix2c waveplate_jones(double angle_deg, double retardance);

/// Outcome order within a setting: TT, TR, RT, RR (signal port first).
/// T is the transmitted PBS port (H), R the reflected one (V).
inline constexpr std::array<const char*, 4> kOutcomeLabels = {"TT", "TR", "RT", "RR"};

/// The four coincidence projectors for one pair of analyzer settings, in
/// kOutcomeLabels order.
std::array<Matrix4c, 4> analyzer_projectors(const WaveplateSetting& signal,
                                            const WaveplateSetting& idler);

/// Single-arm measurement bases and the waveplate angles that realize them.
enum class ArmBasis { HV, DA, RL };
WaveplateSetting basis_setting(ArmBasis basis);
std::string to_string(ArmBasis basis);

struct AnalyzerSetting {
  std::string label;  // e.g. "HV-DA"
  WaveplateSetting signal;
  WaveplateSetting idler;
};

/// Nine analyzer settings with four projectors each. Immutable once built.
class ProjectorSet {
 public:
  static constexpr int kOutcomesPerSetting = 4;

  /// Validates completeness per setting and that every projector is a
  /// Hermitian rank-1 idempotent with unit trace (tolerance 1e-10).
  /// Throws MismatchedData otherwise.
  ProjectorSet(std::vector<AnalyzerSetting> settings, std::vector<Matrix4c> projectors);

  int num_settings() const noexcept { return static_cast<int>(settings_.size()); }
  int num_outcomes() const noexcept { return static_cast<int>(projectors_.size()); }
  const std::vector<AnalyzerSetting>& settings() const noexcept { return settings_; }
  const AnalyzerSetting& setting(int index) const;

  /// Throws IndexOutOfRange.
  const Matrix4c& projector(int setting_index, int outcome) const;
  const std::vector<Matrix4c>& projectors() const noexcept { return projectors_; }

  /// "<setting label>:<outcome label>", e.g. "HV-DA:TR".
  std::string outcome_label(int setting_index, int outcome) const;

 private:
  std::vector<AnalyzerSetting> settings_;
  std::vector<Matrix4c> projectors_;
};

/// All pairs of {H/V, D/A, R/L} on signal x idler, signal basis varying slowest.
const ProjectorSet& standard_projector_set();

nlohmann::json projector_set_to_json(const ProjectorSet& set);
ProjectorSet projector_set_from_json(const nlohmann::json& j);

}  // namespace bellmix
