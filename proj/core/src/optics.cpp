#include "bellmix/optics.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "bellmix/error.hpp"

namespace bellmix {

namespace {

constexpr double kProjectorTolerance = 1e-10;

Matrix2c rotation(double angle_deg) {
  const double t = angle_deg * std::numbers::pi / 180.0;
  Matrix2c r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

// Analyzer unitary: light passes the HWP, then the QWP, then the PBS. A QWP at
// 0 deg directly in front of the PBS only adds an H/V phase, so the HWP alone
// selects the linear basis.
Matrix2c arm_unitary(const WaveplateSetting& w) {
  return waveplate_jones(w.qwp_angle, kQuarterWave) * waveplate_jones(w.hwp_angle, kHalfWave);
}

// Back-propagated port states: column 0 is transmitted, column 1 reflected.
Matrix2c arm_port_states(const WaveplateSetting& w) { return arm_unitary(w).adjoint(); }

ProjectorSet build_standard_set() {
  constexpr std::array<ArmBasis, 3> bases = {ArmBasis::HV, ArmBasis::DA, ArmBasis::RL};
  std::vector<AnalyzerSetting> settings;
  std::vector<Matrix4c> projectors;
  for (ArmBasis s : bases) {
    for (ArmBasis i : bases) {
      AnalyzerSetting a{to_string(s) + "-" + to_string(i), basis_setting(s), basis_setting(i)};
      for (const Matrix4c& p : analyzer_projectors(a.signal, a.idler)) projectors.push_back(p);
      settings.push_back(std::move(a));
    }
  }
  return ProjectorSet(std::move(settings), std::move(projectors));
}

}  // namespace

Matrix2c waveplate_jones(double angle_deg, double retardance) {
  Matrix2c d = Matrix2c::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = std::polar(1.0, -retardance);
  return rotation(angle_deg) * d * rotation(-angle_deg);
}

std::array<Matrix4c, 4> analyzer_projectors(const WaveplateSetting& signal,
                                            const WaveplateSetting& idler) {
  const Matrix2c s = arm_port_states(signal);
  const Matrix2c i = arm_port_states(idler);
  std::array<Matrix4c, 4> out;
  for (int sp = 0; sp < 2; ++sp) {
    for (int ip = 0; ip < 2; ++ip) {
      Vector4c v;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) v(2 * a + b) = s(a, sp) * i(b, ip);
      out[static_cast<std::size_t>(2 * sp + ip)] = v * v.adjoint();
    }
  }
  return out;
}

WaveplateSetting basis_setting(ArmBasis basis) {
  switch (basis) {
    case ArmBasis::HV: return {0.0, 0.0};
    case ArmBasis::DA: return {0.0, 22.5};
    case ArmBasis::RL: return {45.0, 0.0};
  }
  return {};
}

std::string to_string(ArmBasis basis) {
  switch (basis) {
    case ArmBasis::HV: return "HV";
    case ArmBasis::DA: return "DA";
    case ArmBasis::RL: return "RL";
  }
  return "?";
}

ProjectorSet::ProjectorSet(std::vector<AnalyzerSetting> settings, std::vector<Matrix4c> projectors)
    : settings_(std::move(settings)), projectors_(std::move(projectors)) {
  if (settings_.empty() ||
      projectors_.size() != settings_.size() * static_cast<std::size_t>(kOutcomesPerSetting)) {
    throw Error(ErrorKind::MismatchedData, "projector set needs 4 projectors per setting");
  }
  for (std::size_t k = 0; k < projectors_.size(); ++k) {
    const Matrix4c& p = projectors_[k];
    const bool ok = p.allFinite() && hermiticity_defect(p) <= kProjectorTolerance &&
                    max_abs_diff(p * p, p) <= kProjectorTolerance &&
                    std::abs(p.trace() - Complex(1.0, 0.0)) <= kProjectorTolerance;
    if (!ok) {
      throw Error(ErrorKind::MismatchedData,
                  "projector " + std::to_string(k) + " is not a rank-1 orthogonal projector");
    }
  }
  for (std::size_t s = 0; s < settings_.size(); ++s) {
    Matrix4c sum = Matrix4c::Zero();
    for (int o = 0; o < kOutcomesPerSetting; ++o) sum += projectors_[4 * s + static_cast<std::size_t>(o)];
    if (max_abs_diff(sum, Matrix4c::Identity()) > kProjectorTolerance) {
      throw Error(ErrorKind::MismatchedData,
                  "setting " + std::to_string(s) + " projectors do not sum to identity");
    }
  }
}

const AnalyzerSetting& ProjectorSet::setting(int index) const {
  if (index < 0 || index >= num_settings()) {
    throw Error(ErrorKind::IndexOutOfRange, "setting index " + std::to_string(index));
  }
  return settings_[static_cast<std::size_t>(index)];
}

const Matrix4c& ProjectorSet::projector(int setting_index, int outcome) const {
  if (setting_index < 0 || setting_index >= num_settings() || outcome < 0 ||
      outcome >= kOutcomesPerSetting) {
    throw Error(ErrorKind::IndexOutOfRange, "outcome (" + std::to_string(setting_index) + ", " +
                                                std::to_string(outcome) + ")");
  }
  return projectors_[static_cast<std::size_t>(setting_index * kOutcomesPerSetting + outcome)];
}

std::string ProjectorSet::outcome_label(int setting_index, int outcome) const {
  projector(setting_index, outcome);
  return setting(setting_index).label + ":" + kOutcomeLabels[static_cast<std::size_t>(outcome)];
}

const ProjectorSet& standard_projector_set() {
  static const ProjectorSet set = build_standard_set();
  return set;
}

nlohmann::json projector_set_to_json(const ProjectorSet& set) {
  nlohmann::json settings = nlohmann::json::array();
  for (int s = 0; s < set.num_settings(); ++s) {
    const AnalyzerSetting& a = set.setting(s);
    nlohmann::json outcomes = nlohmann::json::array();
    for (int o = 0; o < ProjectorSet::kOutcomesPerSetting; ++o) {
      outcomes.push_back({{"label", set.outcome_label(s, o)},
                          {"projector", matrix_to_json(set.projector(s, o))}});
    }
    settings.push_back({{"index", s},
                        {"label", a.label},
                        {"signal", {{"qwp_deg", a.signal.qwp_angle}, {"hwp_deg", a.signal.hwp_angle}}},
                        {"idler", {{"qwp_deg", a.idler.qwp_angle}, {"hwp_deg", a.idler.hwp_angle}}},
                        {"outcomes", std::move(outcomes)}});
  }
  return {{"settings", std::move(settings)}};
}

ProjectorSet projector_set_from_json(const nlohmann::json& j) {
  try {
    std::vector<AnalyzerSetting> settings;
    std::vector<Matrix4c> projectors;
    const auto& arr = j.at("settings");
    if (!arr.is_array()) throw Error(ErrorKind::ParseError, "'settings' must be an array");
    for (std::size_t s = 0; s < arr.size(); ++s) {
      const auto& e = arr[s];
      if (e.at("index").get<std::size_t>() != s) {
        throw Error(ErrorKind::MismatchedData, "settings must be listed in index order");
      }
      AnalyzerSetting a;
      a.label = e.at("label").get<std::string>();
      a.signal = {e.at("signal").at("qwp_deg").get<double>(), e.at("signal").at("hwp_deg").get<double>()};
      a.idler = {e.at("idler").at("qwp_deg").get<double>(), e.at("idler").at("hwp_deg").get<double>()};
      const auto& outs = e.at("outcomes");
      if (!outs.is_array() || outs.size() != ProjectorSet::kOutcomesPerSetting) {
        throw Error(ErrorKind::MismatchedData, "setting " + std::to_string(s) + " needs 4 outcomes");
      }
      for (std::size_t o = 0; o < outs.size(); ++o) {
        const std::string expected = a.label + ":" + kOutcomeLabels[o];
        if (outs[o].at("label").get<std::string>() != expected) {
          throw Error(ErrorKind::MismatchedData, "outcome label mismatch, expected " + expected);
        }
        const ComplexMatrix m = matrix_from_json(outs[o].at("projector"));
        if (m.rows() != 4) throw Error(ErrorKind::MismatchedData, "projectors must be 4x4");
        projectors.emplace_back(m);
      }
      settings.push_back(std::move(a));
    }
    return ProjectorSet(std::move(settings), std::move(projectors));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("projector set JSON: ") + e.what());
  }
}

}  // namespace bellmix
