#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bellmix/optics.hpp"
#include "bellmix/qubit_algebra.hpp"

namespace bellmix {

/// Coincidence counts for the four outcomes of one analyzer setting.
struct CountRecord {
  int setting_index = 0;
  std::array<std::uint64_t, 4> outcome_counts{};
  std::string duration_tag;

  std::uint64_t total() const noexcept {
    return outcome_counts[0] + outcome_counts[1] + outcome_counts[2] + outcome_counts[3];
  }
  bool operator==(const CountRecord&) const = default;
};

using CountRecords = std::vector<CountRecord>;

struct AcquisitionConfig {
  double pairs_per_setting = 1e5;  // mean detected pairs per setting
  double accidental_rate = 0.0;    // flat background mean per outcome
  std::uint64_t seed = 0;
  std::string duration_tag = "sim";

  /// Throws InvalidConfig.
  void validate() const;
};

// Seed derivation. Every random draw uses its own engine seeded from
// (master seed, domain, index...), so results never depend on call order.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Poisson draw with the given mean from the stream identified by `stream_seed`.
std::uint64_t poisson_sample(double mean, std::uint64_t stream_seed);

/// tr(rho * Pi_k) for the four outcomes of one setting, small negatives
/// clipped to zero. Throws IndexOutOfRange.
std::array<double, 4> born_probabilities(const DensityMatrix& rho, const ProjectorSet& set,
                                         int setting_index);

/// Noiseless means pairs_per_setting * p_k + accidental_rate.
std::vector<std::array<double, 4>> expected_counts(const DensityMatrix& rho,
                                                   const ProjectorSet& set,
                                                   const AcquisitionConfig& acq);

/// Independent Poisson counts per outcome; deterministic in acq.seed.
CountRecords simulate_counts(const DensityMatrix& rho, const ProjectorSet& set,
                             const AcquisitionConfig& acq);

struct ScanPoint {
  double hwp_angle = 0.0;  // signal HWP, degrees
  double expected = 0.0;   // noiseless mean TT count
  std::uint64_t count = 0;
};

/// Signal-HWP scan of the transmitted-transmitted coincidences with the idler
/// HWP at -22.5 deg and both QWPs at 0.
std::vector<ScanPoint> visibility_scan(const DensityMatrix& rho, std::span<const double> hwp_angles,
                                       const AcquisitionConfig& acq);

/// Least-squares fit of counts to offset + a cos(4 theta) + b sin(4 theta).
struct SinusoidFit {
  double offset = 0.0;
  double cos_amplitude = 0.0;
  double sin_amplitude = 0.0;

  double amplitude() const;
  /// amplitude / offset
  double visibility() const;
};
SinusoidFit fit_sinusoid(std::span<const ScanPoint> scan);

// "setting_index,outcome_label,count". An optional first line
// "# duration_tag: <tag>" carries the acquisition label.
std::string counts_to_csv(const CountRecords& records, const ProjectorSet& set);
/// Throws ParseError (with line number) for malformed text and MismatchedData
/// when labels or coverage disagree with `set`.
CountRecords counts_from_csv(std::string_view text, const ProjectorSet& set);

nlohmann::json counts_to_json(const CountRecords& records, const ProjectorSet& set);
CountRecords counts_from_json(const nlohmann::json& j, const ProjectorSet& set);

/// Checks that every record references a valid setting and that no setting
/// appears twice. Throws MismatchedData.
void validate_counts(const CountRecords& records, const ProjectorSet& set);

}  // namespace bellmix
