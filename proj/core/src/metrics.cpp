#include "bellmix/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include "bellmix/error.hpp"
#include "bellmix/optics.hpp"

namespace bellmix {

namespace {

// sigma_y (x) sigma_y in the (HH, HV, VH, VV) basis.
const Matrix4c& yy() {
  static const Matrix4c m = [] {
    Matrix4c y = Matrix4c::Zero();
    y(0, 3) = -1.0;
    y(3, 0) = -1.0;
    y(1, 2) = 1.0;
    y(2, 1) = 1.0;
    return y;
  }();
  return m;
}

}  // namespace

double purity(const DensityMatrix& rho) {
  // tr(rho^2) = sum |rho_jk|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

double concurrence(const DensityMatrix& rho) {
  // With rho = sum_k p_k |e_k><e_k|, the l_k are the singular values of
  // tau = D E^T (Y x Y) E D, D = diag(sqrt p). Taking singular values directly
  // keeps the small l_k accurate to machine precision instead of sqrt(eps).
  const HermitianEigen eig = hermitian_eigen(rho.matrix());
  const Eigen::Vector4d weights = clipped_spectrum(eig.values).cwiseSqrt();
  const Matrix4c e = eig.vectors;
  const Matrix4c tau =
      weights.cast<Complex>().asDiagonal() * (e.transpose() * yy() * e) * weights.cast<Complex>().asDiagonal();
  const Eigen::Vector4d l = Eigen::JacobiSVD<Matrix4c>(tau).singularValues();
  return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

double tangle(const DensityMatrix& rho) {
  const double c = concurrence(rho);
  return c * c;
}

CoincidencePair pm45_coincidences(const DensityMatrix& rho) {
  const WaveplateSetting idler{0.0, -22.5};
  const auto plus = analyzer_projectors({0.0, 22.5}, idler);
  const auto minus = analyzer_projectors({0.0, -22.5}, idler);
  return {std::max(rho.expectation(plus[0]), 0.0), std::max(rho.expectation(minus[0]), 0.0)};
}

double visibility(const DensityMatrix& rho) {
  const CoincidencePair n = pm45_coincidences(rho);
  const double total = n.plus45 + n.minus45;
  if (total < 1e-15) {
    throw Error(ErrorKind::DegenerateDenominator, "no +-45 coincidences");
  }
  return std::abs((n.plus45 - n.minus45) / total);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  // Trace norm of sqrt(rho) sqrt(sigma).
  const Matrix4c product = matrix_sqrt(rho.matrix()) * matrix_sqrt(sigma.matrix());
  const double f = Eigen::JacobiSVD<Matrix4c>(product).singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

double purity_theory(double alpha) { return 2.0 * (alpha - 0.5) * (alpha - 0.5) + 0.5; }
double tangle_theory(double alpha) { return (1.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha); }
double visibility_theory(double alpha) { return std::abs(1.0 - 2.0 * alpha); }

MetricsReport compute_metrics(const DensityMatrix& rho, const DensityMatrix& target,
                              std::string target_description) {
  return {purity(rho), tangle(rho), visibility(rho), fidelity(rho, target),
          std::move(target_description)};
}

nlohmann::json metrics_to_json(const MetricsReport& r) {
  return {{"purity", r.purity},
          {"tangle", r.tangle},
          {"visibility", r.visibility},
          {"fidelity_to_target", r.fidelity_to_target},
          {"target_description", r.target_description}};
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
  try {
    return {j.at("purity").get<double>(), j.at("tangle").get<double>(),
            j.at("visibility").get<double>(), j.at("fidelity_to_target").get<double>(),
            j.at("target_description").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("metrics JSON: ") + e.what());
  }
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), end);
}

std::string metrics_csv_header() { return "alpha,purity,tangle,visibility,fidelity"; }

std::string metrics_csv_row(double alpha, const MetricsReport& r) {
  return format_double(alpha) + "," + format_double(r.purity) + "," + format_double(r.tangle) +
         "," + format_double(r.visibility) + "," + format_double(r.fidelity_to_target);
}

}  // namespace bellmix
