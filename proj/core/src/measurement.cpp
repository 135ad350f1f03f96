#include "bellmix/measurement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "bellmix/error.hpp"

namespace bellmix {

namespace {

constexpr std::uint64_t kCountDomain = 1;
constexpr std::uint64_t kScanDomain = 2;
constexpr const char* kCsvHeader = "setting_index,outcome_label,count";
constexpr std::string_view kTagPrefix = "# duration_tag: ";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k) {
    if (k == s.size() || s[k] == sep) {
      out.push_back(trim(s.substr(start, k - start)));
      start = k + 1;
    }
  }
  return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Assembles per-setting records from (setting, outcome) -> count cells.
CountRecords assemble(const std::map<std::pair<int, int>, std::uint64_t>& cells,
                      const std::string& tag) {
  CountRecords out;
  for (const auto& [key, count] : cells) {
    if (out.empty() || out.back().setting_index != key.first) {
      out.push_back(CountRecord{key.first, {}, tag});
    }
    out.back().outcome_counts[static_cast<std::size_t>(key.second)] = count;
  }
  for (const CountRecord& r : out) {
    for (int o = 0; o < ProjectorSet::kOutcomesPerSetting; ++o) {
      if (!cells.contains({r.setting_index, o})) {
        throw Error(ErrorKind::MismatchedData, "setting " + std::to_string(r.setting_index) +
                                                   " is missing outcome " + kOutcomeLabels[static_cast<std::size_t>(o)]);
      }
    }
  }
  return out;
}

}  // namespace

void AcquisitionConfig::validate() const {
  if (!std::isfinite(pairs_per_setting) || pairs_per_setting <= 0.0) {
    throw Error(ErrorKind::InvalidConfig, "pairs_per_setting must be positive");
  }
  if (!std::isfinite(accidental_rate) || accidental_rate < 0.0) {
    throw Error(ErrorKind::InvalidConfig, "accidental_rate must be >= 0");
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

std::uint64_t poisson_sample(double mean, std::uint64_t stream_seed) {
  if (!(mean > 0.0)) return 0;
  std::mt19937_64 engine(stream_seed);
  std::poisson_distribution<std::int64_t> dist(mean);
  return static_cast<std::uint64_t>(dist(engine));
}

std::array<double, 4> born_probabilities(const DensityMatrix& rho, const ProjectorSet& set,
                                         int setting_index) {
  std::array<double, 4> p{};
  for (int o = 0; o < ProjectorSet::kOutcomesPerSetting; ++o) {
    p[static_cast<std::size_t>(o)] = std::max(rho.expectation(set.projector(setting_index, o)), 0.0);
  }
  return p;
}

std::vector<std::array<double, 4>> expected_counts(const DensityMatrix& rho,
                                                   const ProjectorSet& set,
                                                   const AcquisitionConfig& acq) {
  acq.validate();
  std::vector<std::array<double, 4>> out(static_cast<std::size_t>(set.num_settings()));
  for (int s = 0; s < set.num_settings(); ++s) {
    const auto p = born_probabilities(rho, set, s);
    for (std::size_t o = 0; o < 4; ++o) {
      out[static_cast<std::size_t>(s)][o] = acq.pairs_per_setting * p[o] + acq.accidental_rate;
    }
  }
  return out;
}

CountRecords simulate_counts(const DensityMatrix& rho, const ProjectorSet& set,
                             const AcquisitionConfig& acq) {
  const auto means = expected_counts(rho, set, acq);
  CountRecords out;
  out.reserve(means.size());
  for (int s = 0; s < set.num_settings(); ++s) {
    CountRecord r{s, {}, acq.duration_tag};
    for (int o = 0; o < ProjectorSet::kOutcomesPerSetting; ++o) {
      const auto stream = derive_seed(acq.seed, kCountDomain,
                                      static_cast<std::uint64_t>(s * ProjectorSet::kOutcomesPerSetting + o));
      r.outcome_counts[static_cast<std::size_t>(o)] =
          poisson_sample(means[static_cast<std::size_t>(s)][static_cast<std::size_t>(o)], stream);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScanPoint> visibility_scan(const DensityMatrix& rho, std::span<const double> hwp_angles,
                                       const AcquisitionConfig& acq) {
  acq.validate();
  const WaveplateSetting idler{0.0, -22.5};
  std::vector<ScanPoint> out;
  out.reserve(hwp_angles.size());
  for (std::size_t k = 0; k < hwp_angles.size(); ++k) {
    const auto proj = analyzer_projectors({0.0, hwp_angles[k]}, idler);
    const double p = std::max(rho.expectation(proj[0]), 0.0);
    const double mean = acq.pairs_per_setting * p + acq.accidental_rate;
    out.push_back({hwp_angles[k], mean, poisson_sample(mean, derive_seed(acq.seed, kScanDomain, k))});
  }
  return out;
}

double SinusoidFit::amplitude() const { return std::hypot(cos_amplitude, sin_amplitude); }

double SinusoidFit::visibility() const {
  if (!(offset > 0.0)) throw Error(ErrorKind::DegenerateDenominator, "scan has no counts");
  return amplitude() / offset;
}

SinusoidFit fit_sinusoid(std::span<const ScanPoint> scan) {
  if (scan.size() < 3) throw Error(ErrorKind::MismatchedData, "sinusoid fit needs >= 3 points");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(scan.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(scan.size()));
  for (std::size_t k = 0; k < scan.size(); ++k) {
    const double t = 4.0 * scan[k].hwp_angle * std::numbers::pi / 180.0;
    const auto row = static_cast<Eigen::Index>(k);
    a(row, 0) = 1.0;
    a(row, 1) = std::cos(t);
    a(row, 2) = std::sin(t);
    y(row) = static_cast<double>(scan[k].count);
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  return {c(0), c(1), c(2)};
}

void validate_counts(const CountRecords& records, const ProjectorSet& set) {
  std::vector<bool> seen(static_cast<std::size_t>(set.num_settings()), false);
  for (const CountRecord& r : records) {
    if (r.setting_index < 0 || r.setting_index >= set.num_settings()) {
      throw Error(ErrorKind::MismatchedData,
                  "count record references setting " + std::to_string(r.setting_index));
    }
    if (seen[static_cast<std::size_t>(r.setting_index)]) {
      throw Error(ErrorKind::MismatchedData,
                  "setting " + std::to_string(r.setting_index) + " appears twice");
    }
    seen[static_cast<std::size_t>(r.setting_index)] = true;
  }
}

std::string counts_to_csv(const CountRecords& records, const ProjectorSet& set) {
  validate_counts(records, set);
  std::ostringstream out;
  if (!records.empty() && !records.front().duration_tag.empty()) {
    out << kTagPrefix << records.front().duration_tag << '\n';
  }
  out << kCsvHeader << '\n';
  for (const CountRecord& r : records) {
    for (int o = 0; o < ProjectorSet::kOutcomesPerSetting; ++o) {
      out << r.setting_index << ',' << set.outcome_label(r.setting_index, o) << ','
          << r.outcome_counts[static_cast<std::size_t>(o)] << '\n';
    }
  }
  return out.str();
}

CountRecords counts_from_csv(std::string_view text, const ProjectorSet& set) {
  std::string tag;
  bool header_seen = false;
  std::map<std::pair<int, int>, std::uint64_t> cells;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](ErrorKind kind, const std::string& msg) {
    throw Error(kind, "counts CSV line " + std::to_string(line_no) + ": " + msg);
  };

  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with(kTagPrefix)) tag = std::string(trim(line.substr(kTagPrefix.size())));
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) fail(ErrorKind::ParseError, std::string("expected header '") + kCsvHeader + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) fail(ErrorKind::ParseError, "expected 3 fields");
    int setting = 0;
    std::uint64_t count = 0;
    if (!parse_int(fields[0], setting)) fail(ErrorKind::ParseError, "bad setting_index");
    if (!parse_int(fields[2], count)) fail(ErrorKind::ParseError, "bad count");
    if (setting < 0 || setting >= set.num_settings()) {
      fail(ErrorKind::MismatchedData, "setting_index " + std::to_string(setting) + " out of range");
    }
    int outcome = -1;
    for (int o = 0; o < ProjectorSet::kOutcomesPerSetting; ++o) {
      if (fields[1] == set.outcome_label(setting, o)) outcome = o;
    }
    if (outcome < 0) {
      fail(ErrorKind::MismatchedData,
           "label '" + std::string(fields[1]) + "' does not belong to setting " + std::to_string(setting));
    }
    if (!cells.emplace(std::pair{setting, outcome}, count).second) {
      fail(ErrorKind::MismatchedData, "duplicate outcome " + std::string(fields[1]));
    }
  }
  if (!header_seen) throw Error(ErrorKind::ParseError, "counts CSV: missing header");
  return assemble(cells, tag);
}

nlohmann::json counts_to_json(const CountRecords& records, const ProjectorSet& set) {
  validate_counts(records, set);
  nlohmann::json arr = nlohmann::json::array();
  for (const CountRecord& r : records) {
    nlohmann::json outcomes = nlohmann::json::array();
    for (int o = 0; o < ProjectorSet::kOutcomesPerSetting; ++o) {
      outcomes.push_back({{"label", set.outcome_label(r.setting_index, o)},
                          {"count", r.outcome_counts[static_cast<std::size_t>(o)]}});
    }
    arr.push_back({{"setting_index", r.setting_index},
                   {"duration_tag", r.duration_tag},
                   {"outcomes", std::move(outcomes)}});
  }
  return {{"records", std::move(arr)}};
}

CountRecords counts_from_json(const nlohmann::json& j, const ProjectorSet& set) {
  try {
    CountRecords out;
    for (const auto& e : j.at("records")) {
      CountRecord r;
      r.setting_index = e.at("setting_index").get<int>();
      r.duration_tag = e.value("duration_tag", std::string{});
      if (r.setting_index < 0 || r.setting_index >= set.num_settings()) {
        throw Error(ErrorKind::MismatchedData,
                    "setting_index " + std::to_string(r.setting_index) + " out of range");
      }
      const auto& outs = e.at("outcomes");
      if (!outs.is_array() || outs.size() != 4) {
        throw Error(ErrorKind::MismatchedData, "each record needs 4 outcomes");
      }
      for (std::size_t o = 0; o < 4; ++o) {
        if (outs[o].at("label").get<std::string>() != set.outcome_label(r.setting_index, static_cast<int>(o))) {
          throw Error(ErrorKind::MismatchedData, "outcome label mismatch in setting " +
                                                     std::to_string(r.setting_index));
        }
        r.outcome_counts[o] = outs[o].at("count").get<std::uint64_t>();
      }
      out.push_back(std::move(r));
    }
    validate_counts(out, set);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("counts JSON: ") + e.what());
  }
}

}  // namespace bellmix
