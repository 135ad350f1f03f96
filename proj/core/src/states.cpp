#include "bellmix/states.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "bellmix/error.hpp"

namespace bellmix {

namespace {

// X on the signal photon: HH<->VH, HV<->VV.
const Matrix4c& signal_flip() {
  static const Matrix4c x = [] {
    Matrix4c m = Matrix4c::Zero();
    m(0, 2) = m(2, 0) = 1.0;
    m(1, 3) = m(3, 1) = 1.0;
    return m;
  }();
  return x;
}

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

PureState bell_state(BellKind kind) {
  Vector4c a = Vector4c::Zero();
  switch (kind) {
    case BellKind::PhiPlus: a << kInvSqrt2, 0.0, 0.0, kInvSqrt2; break;
    case BellKind::PhiMinus: a << kInvSqrt2, 0.0, 0.0, -kInvSqrt2; break;
    case BellKind::PsiPlus: a << 0.0, kInvSqrt2, kInvSqrt2, 0.0; break;
    case BellKind::PsiMinus: a << 0.0, kInvSqrt2, -kInvSqrt2, 0.0; break;
  }
  return PureState::from_amplitudes(a);
}

void SourceConfig::validate() const {
  auto check_unit = [](double v, const char* name) {
    if (!in_unit_interval(v)) {
      throw Error(ErrorKind::InvalidConfig,
                  std::string(name) + " = " + std::to_string(v) + " is outside [0, 1]");
    }
  };
  check_unit(alpha, "alpha");
  check_unit(signal_dc, "signal_dc");
  check_unit(noise.dephasing, "dephasing");
  check_unit(noise.depolarizing, "depolarizing");
  if (!std::isfinite(phi)) throw Error(ErrorKind::InvalidConfig, "phi must be finite");
  const double norm2 = std::norm(beta) + std::norm(gamma);
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kStoredTolerance) {
    throw Error(ErrorKind::InvalidConfig,
                "|beta|^2 + |gamma|^2 = " + std::to_string(norm2) + ", expected 1");
  }
}

PureState pump_state(double phi, Complex beta, Complex gamma) {
  const double norm2 = std::norm(beta) + std::norm(gamma);
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kStoredTolerance) {
    throw Error(ErrorKind::NotNormalized,
                "|beta|^2 + |gamma|^2 = " + std::to_string(norm2));
  }
  Vector4c a = Vector4c::Zero();
  a(0) = beta;
  a(3) = -std::polar(1.0, phi) * gamma;
  // Rounding can push the norm off by a few ulps; the check above already
  // bounds it, so renormalize exactly here.
  a /= a.norm();
  return PureState::from_amplitudes(a);
}

DensityMatrix mix_duty_cycle(double alpha) {
  if (!in_unit_interval(alpha)) {
    throw Error(ErrorKind::OutOfRange, "alpha = " + std::to_string(alpha) + " is outside [0, 1]");
  }
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  m(0, 3) = alpha - 0.5;
  m(3, 0) = alpha - 0.5;
  return DensityMatrix::from_matrix(m);
}

DensityMatrix apply_signal_rotator(const DensityMatrix& state, bool half_wave) {
  if (!half_wave) return state;
  const Matrix4c& x = signal_flip();
  return DensityMatrix::from_matrix(x * state.matrix() * x.adjoint());
}

DensityMatrix apply_dephasing(const DensityMatrix& state, double strength) {
  if (!in_unit_interval(strength)) {
    throw Error(ErrorKind::OutOfRange, "dephasing must be in [0, 1]");
  }
  Matrix4c m = state.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      // Index bit 1 is the signal polarization (0 = H, 1 = V).
      if (((r >> 1) & 1) != ((c >> 1) & 1)) m(r, c) *= (1.0 - strength);
    }
  }
  return DensityMatrix::from_matrix(m);
}

DensityMatrix apply_depolarizing(const DensityMatrix& state, double weight) {
  if (!in_unit_interval(weight)) {
    throw Error(ErrorKind::OutOfRange, "depolarizing must be in [0, 1]");
  }
  const Matrix4c m = (1.0 - weight) * state.matrix() + weight * 0.25 * Matrix4c::Identity();
  return DensityMatrix::from_matrix(m);
}

DensityMatrix generate(const SourceConfig& config) {
  config.validate();
  const Matrix4c direct = pump_state(config.phi, config.beta, config.gamma).projector();
  const Matrix4c flipped =
      pump_state(config.phi + std::numbers::pi, config.beta, config.gamma).projector();
  const Matrix4c pump_avg = (1.0 - config.alpha) * direct + config.alpha * flipped;

  const Matrix4c& x = signal_flip();
  const Matrix4c avg =
      (1.0 - config.signal_dc) * pump_avg + config.signal_dc * (x * pump_avg * x.adjoint());

  DensityMatrix rho = DensityMatrix::from_matrix(avg);
  if (config.noise.dephasing > 0.0) rho = apply_dephasing(rho, config.noise.dephasing);
  if (config.noise.depolarizing > 0.0) rho = apply_depolarizing(rho, config.noise.depolarizing);
  return rho;
}

double dephasing_for_visibility(double target_visibility) {
  if (!in_unit_interval(target_visibility)) {
    throw Error(ErrorKind::OutOfRange, "visibility must be in [0, 1]");
  }
  // The +-45 degree contrast of a dephased Bell pair is its surviving HH/VV coherence.
  return 1.0 - target_visibility;
}

SourceConfig source_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "source config must be a JSON object");
  static const std::set<std::string> known = {"alpha",    "phi",      "beta_re",
                                              "beta_im",  "gamma_re", "gamma_im",
                                              "signal_dc", "dephasing", "depolarizing"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw Error(ErrorKind::InvalidConfig, "unknown field '" + key + "'");
    }
    if (!value.is_number()) {
      throw Error(ErrorKind::ParseError, "field '" + key + "' must be a number");
    }
  }
  auto get = [&](const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
  };
  SourceConfig c;
  c.alpha = get("alpha", c.alpha);
  c.phi = get("phi", c.phi);
  c.beta = Complex(get("beta_re", c.beta.real()), get("beta_im", c.beta.imag()));
  c.gamma = Complex(get("gamma_re", c.gamma.real()), get("gamma_im", c.gamma.imag()));
  c.signal_dc = get("signal_dc", c.signal_dc);
  c.noise.dephasing = get("dephasing", c.noise.dephasing);
  c.noise.depolarizing = get("depolarizing", c.noise.depolarizing);
  c.validate();
  return c;
}

nlohmann::json source_config_to_json(const SourceConfig& c) {
  return {{"alpha", c.alpha},
          {"phi", c.phi},
          {"beta_re", c.beta.real()},
          {"beta_im", c.beta.imag()},
          {"gamma_re", c.gamma.real()},
          {"gamma_im", c.gamma.imag()},
          {"signal_dc", c.signal_dc},
          {"dephasing", c.noise.dephasing},
          {"depolarizing", c.noise.depolarizing}};
}

}  // namespace bellmix
