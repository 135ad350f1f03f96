#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <bellmix/error.hpp>
#include <bellmix/metrics.hpp>
#include <bellmix/states.hpp>

#include "test_support.hpp"

namespace bellmix {
namespace {

constexpr double r2 = kInvSqrt2;

void expect_amplitudes(const PureState& psi, Complex a0, Complex a1, Complex a2, Complex a3) {
  EXPECT_LE(std::abs(psi[0] - a0), 1e-15);
  EXPECT_LE(std::abs(psi[1] - a1), 1e-15);
  EXPECT_LE(std::abs(psi[2] - a2), 1e-15);
  EXPECT_LE(std::abs(psi[3] - a3), 1e-15);
}

DensityMatrix pure(BellKind k) { return DensityMatrix::from_pure(bell_state(k)); }

TEST(BellState, Amplitudes) {
  expect_amplitudes(bell_state(BellKind::PhiMinus), r2, 0, 0, -r2);
  expect_amplitudes(bell_state(BellKind::PhiPlus), r2, 0, 0, r2);
  expect_amplitudes(bell_state(BellKind::PsiMinus), 0, r2, -r2, 0);
  expect_amplitudes(bell_state(BellKind::PsiPlus), 0, r2, r2, 0);
}

TEST(PumpState, PhaseAndSplitting) {
  expect_amplitudes(pump_state(0.0, r2, r2), r2, 0, 0, -r2);
  const PureState flipped = pump_state(std::numbers::pi, r2, r2);
  EXPECT_LE(max_abs_diff(DensityMatrix::from_pure(flipped).matrix(), pure(BellKind::PhiPlus).matrix()), 1e-15);
  expect_amplitudes(pump_state(0.0, 1.0, 0.0), 1, 0, 0, 0);
}

TEST(PumpState, RejectsUnnormalizedSplitting) {
  try {
    pump_state(0.0, 1.0, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotNormalized);
  }
}

TEST(MixDutyCycle, Endpoints) {
  EXPECT_LE(max_abs_diff(mix_duty_cycle(0.0).matrix(), pure(BellKind::PhiMinus).matrix()), 1e-15);
  EXPECT_LE(max_abs_diff(mix_duty_cycle(1.0).matrix(), pure(BellKind::PhiPlus).matrix()), 1e-15);
}

TEST(MixDutyCycle, HalfIsClassicalMixture) {
  Matrix4c expected = Matrix4c::Zero();
  expected(0, 0) = 0.5;
  expected(3, 3) = 0.5;
  EXPECT_EQ(mix_duty_cycle(0.5).matrix(), expected);
}

TEST(MixDutyCycle, QuarterCoherence) {
  const DensityMatrix rho = mix_duty_cycle(0.25);
  EXPECT_DOUBLE_EQ(rho(0, 3).real(), -0.25);
  EXPECT_DOUBLE_EQ(rho(3, 0).real(), -0.25);
  // Matches the weighted sum of the two Bell projectors.
  const Matrix4c sum = 0.75 * pure(BellKind::PhiMinus).matrix() + 0.25 * pure(BellKind::PhiPlus).matrix();
  EXPECT_LE(max_abs_diff(rho.matrix(), sum), 1e-15);
}

TEST(MixDutyCycle, OutOfRange) {
  for (double a : {-0.01, 1.01, std::nan("")}) {
    try {
      mix_duty_cycle(a);
      FAIL() << a;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
    }
  }
}

TEST(MixDutyCycle, ComplementIsVvPhaseFlip) {
  Matrix4c z = Matrix4c::Identity();
  z(3, 3) = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double a = k / 100.0;
    const Matrix4c flipped = z * mix_duty_cycle(a).matrix() * z.adjoint();
    ASSERT_LE(max_abs_diff(flipped, mix_duty_cycle(1.0 - a).matrix()), 1e-12) << a;
  }
}

TEST(SignalRotator, MapsPhiToPsi) {
  EXPECT_LE(max_abs_diff(apply_signal_rotator(pure(BellKind::PhiMinus), true).matrix(),
                         pure(BellKind::PsiMinus).matrix()), 1e-15);
  EXPECT_LE(max_abs_diff(apply_signal_rotator(pure(BellKind::PhiPlus), true).matrix(),
                         pure(BellKind::PsiPlus).matrix()), 1e-15);
  const DensityMatrix rho = mix_duty_cycle(0.3);
  EXPECT_EQ(apply_signal_rotator(rho, false), rho);
}

TEST(SignalRotator, IsAnInvolution) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho = testing::random_state(rng);
    const DensityMatrix back = apply_signal_rotator(apply_signal_rotator(rho, true), true);
    ASSERT_LE(max_abs_diff(back.matrix(), rho.matrix()), 1e-15);
  }
}

TEST(Generate, TwoRotatorsGiveCompletelyMixedState) {
  SourceConfig c;
  c.alpha = 0.5;
  c.signal_dc = 0.5;
  EXPECT_LE(max_abs_diff(generate(c).matrix(), Matrix4c::Identity() * 0.25), 1e-12);
}

TEST(Generate, ReducesToDutyCycleMixture) {
  for (int k = 0; k <= 20; ++k) {
    SourceConfig c;
    c.alpha = k / 20.0;
    ASSERT_LE(max_abs_diff(generate(c).matrix(), mix_duty_cycle(c.alpha).matrix()), 1e-15) << c.alpha;
  }
}

TEST(Generate, CalibrationDephasingGivesMeasuredVisibility) {
  SourceConfig c;
  c.noise.dephasing = 0.027;
  EXPECT_NEAR(visibility(generate(c)), 0.973, 1e-12);
  EXPECT_DOUBLE_EQ(dephasing_for_visibility(0.973), 1.0 - 0.973);
}

TEST(Generate, SignalRotatorOnlyGivesPsiMixture) {
  SourceConfig c;
  c.signal_dc = 1.0;
  EXPECT_LE(max_abs_diff(generate(c).matrix(), pure(BellKind::PsiMinus).matrix()), 1e-15);
  c.alpha = 1.0;
  EXPECT_LE(max_abs_diff(generate(c).matrix(), pure(BellKind::PsiPlus).matrix()), 1e-15);
}

TEST(Generate, ArbitrarySplittingWithoutFlipIsPure) {
  SourceConfig c;
  c.beta = std::sqrt(0.8);
  c.gamma = std::sqrt(0.2);
  c.phi = 0.4;
  const DensityMatrix rho = generate(c);
  EXPECT_NEAR(purity(rho), 1.0, 1e-12);
  EXPECT_NEAR(rho(0, 0).real(), 0.8, 1e-12);
  EXPECT_LE(std::abs(rho(0, 3) - (-std::sqrt(0.16) * std::polar(1.0, -0.4))), 1e-12);
}

TEST(Generate, AlwaysPhysicalProperty) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    SourceConfig c;
    c.alpha = u(rng);
    c.signal_dc = u(rng);
    c.phi = 2.0 * std::numbers::pi * u(rng);
    const double t = 0.5 * std::numbers::pi * u(rng);
    c.beta = std::polar(std::cos(t), 2.0 * std::numbers::pi * u(rng));
    c.gamma = std::polar(std::sin(t), 2.0 * std::numbers::pi * u(rng));
    c.noise.dephasing = trial % 3 == 0 ? 0.0 : u(rng);
    c.noise.depolarizing = trial % 5 == 0 ? 0.0 : u(rng);
    const DensityMatrix rho = generate(c);
    ASSERT_LE(hermiticity_defect(rho.matrix()), 1e-12);
    ASSERT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
    ASSERT_GE(hermitian_eigen(rho.matrix()).values.minCoeff(), -1e-10);
  }
}

TEST(Generate, NoSignalRotatorNoNoiseHasRankAtMostTwo) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    SourceConfig c;
    c.alpha = u(rng);
    c.phi = 6.0 * u(rng);
    const double t = 1.5 * u(rng);
    c.beta = std::cos(t);
    c.gamma = std::polar(std::sin(t), 6.0 * u(rng));
    ASSERT_LE(std::abs(hermitian_eigen(generate(c).matrix()).values(2)), 1e-12);
  }
}

TEST(SourceConfigJson, DefaultsAndErrors) {
  const SourceConfig d = source_config_from_json(nlohmann::json::object());
  EXPECT_EQ(d, SourceConfig{});
  EXPECT_LE(max_abs_diff(generate(d).matrix(), pure(BellKind::PhiMinus).matrix()), 1e-15);

  auto kind_of = [](const char* text) {
    try {
      source_config_from_json(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::NoCounts;  // sentinel: no error
  };
  EXPECT_EQ(kind_of(R"({"alpha": 1.5})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"alpah": 0.5})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"alpha": "half"})"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of(R"({"beta_re": 1.0})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"([1, 2])"), ErrorKind::ParseError);
}

TEST(SourceConfigJson, RoundTrip) {
  SourceConfig c;
  c.alpha = 0.35;
  c.phi = 0.1;
  c.beta = Complex(0.6, 0.0);
  c.gamma = Complex(0.0, 0.8);
  c.signal_dc = 0.25;
  c.noise = {0.027, 0.01};
  const auto text = source_config_to_json(c).dump();
  EXPECT_EQ(source_config_from_json(nlohmann::json::parse(text)), c);
}

}  // namespace
}  // namespace bellmix
