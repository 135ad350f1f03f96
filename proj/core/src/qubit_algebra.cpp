#include "bellmix/qubit_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "bellmix/error.hpp"

namespace bellmix {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::ZeroTrace: return "ZeroTrace";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::MismatchedData: return "MismatchedData";
    case ErrorKind::NoCounts: return "NoCounts";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

namespace {

void require_supported_shape(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4)) {
    throw Error(ErrorKind::NonHermitianInput,
                "expected a 2x2 or 4x4 matrix, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::NonHermitianInput, "matrix has non-finite entries");
  }
}

ComplexMatrix symmetrized(const ComplexMatrix& m) {
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  for (Eigen::Index k = 0; k < h.rows(); ++k) h(k, k) = h(k, k).real();
  return h;
}

// Zeroes a(p,q) with the unitary J = diag(1, conj(e)) * [[c, s], [-s, c]]
// acting on coordinates p,q, where e = a(p,q)/|a(p,q)|.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const Complex e = apq / r;
  const Complex ebar = std::conj(e);
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double theta = (aqq - app) / (2.0 * r);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp - s * ebar * akq;
    a(k, q) = s * akp + c * ebar * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk - s * e * aqk;
    a(q, k) = s * apk + c * e * aqk;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp - s * ebar * vkq;
    v(k, q) = s * vkp + c * ebar * vkq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * r;
  a(q, q) = aqq + t * r;
}

}  // namespace

Eigen::VectorXd clipped_spectrum(const Eigen::VectorXd& values) {
  const double top = values.size() > 0 ? std::max(values.maxCoeff(), 0.0) : 0.0;
  const double floor = 4.0 * static_cast<double>(values.size()) *
                       std::numeric_limits<double>::epsilon() * top;
  return values.unaryExpr([floor](double v) { return v <= floor ? 0.0 : v; });
}

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  require_supported_shape(m);
  if (const double defect = hermiticity_defect(m); defect > kHermitianTolerance) {
    throw Error(ErrorKind::NonHermitianInput,
                "matrix deviates from Hermitian by " + std::to_string(defect));
  }

  const Eigen::Index n = m.rows();
  ComplexMatrix a = symmetrized(m);
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double scale = a.norm();
  constexpr int kMaxSweeps = 64;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= std::numeric_limits<double>::epsilon() * scale * 1e-2 || off == 0.0) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() > a(j, j).real();
  });

  HermitianEigen out{Eigen::VectorXd(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

ComplexMatrix matrix_sqrt(const ComplexMatrix& m) {
  const HermitianEigen eig = hermitian_eigen(m);
  if (eig.values.minCoeff() < -kRejectNegative) {
    throw Error(ErrorKind::InvalidState, "matrix_sqrt of a matrix with eigenvalue " +
                                             std::to_string(eig.values.minCoeff()));
  }
  const Eigen::VectorXd roots = clipped_spectrum(eig.values).cwiseSqrt();
  ComplexMatrix r = eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return symmetrized(r);
}

PureState PureState::from_amplitudes(const Vector4c& amplitudes) {
  if (!amplitudes.allFinite()) {
    throw Error(ErrorKind::NotNormalized, "amplitudes are not finite");
  }
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > kStoredTolerance) {
    throw Error(ErrorKind::NotNormalized, "squared norm is " + std::to_string(norm2));
  }
  return PureState(amplitudes);
}

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4) {
    throw Error(ErrorKind::InvalidState, "density matrix must be 4x4");
  }
  require_supported_shape(m);
  if (const double defect = hermiticity_defect(m); defect > kHermitianTolerance) {
    throw Error(ErrorKind::NonHermitianInput,
                "density matrix deviates from Hermitian by " + std::to_string(defect));
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidState, "trace is " + std::to_string(tr));
  }
  const HermitianEigen eig = hermitian_eigen(m);
  const double smallest = eig.values.minCoeff();
  if (smallest < -kRejectNegative) {
    throw Error(ErrorKind::InvalidState,
                "density matrix has eigenvalue " + std::to_string(smallest));
  }
  if (smallest < 0.0) return nearest_physical(m);
  Matrix4c h = symmetrized(m);
  if (std::abs(tr - 1.0) > kStoredTolerance) h /= tr;
  return DensityMatrix(h);
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  Matrix4c p = psi.projector();
  for (int k = 0; k < 4; ++k) p(k, k) = p(k, k).real();
  return DensityMatrix(0.5 * (p + p.adjoint()));
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix4c::Identity() * 0.25);
}

double DensityMatrix::expectation(const Matrix4c& op) const {
  return (matrix_ * op).trace().real();
}

DensityMatrix nearest_physical(const ComplexMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4) {
    throw Error(ErrorKind::InvalidState, "density matrix must be 4x4");
  }
  const ComplexMatrix h = symmetrized(m);
  const HermitianEigen eig = hermitian_eigen(h);
  const double tr = h.trace().real();
  if (eig.values.minCoeff() >= 0.0 && std::abs(tr - 1.0) <= kStoredTolerance) {
    return DensityMatrix(Matrix4c(h));
  }
  const Eigen::VectorXd clipped = eig.values.cwiseMax(0.0);
  const double total = clipped.sum();
  if (!(total > std::numeric_limits<double>::min())) {
    throw Error(ErrorKind::ZeroTrace, "no positive eigenvalues survive clipping");
  }
  ComplexMatrix r =
      eig.vectors * (clipped / total).cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return DensityMatrix(Matrix4c(symmetrized(r)));
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ParseError, "matrix JSON: " + msg); };
  if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im")) {
    fail("expected object with dim, re, im");
  }
  if (!j["dim"].is_number_integer()) fail("dim must be an integer");
  const auto n = j["dim"].get<long long>();
  if (n != 2 && n != 4) fail("dim must be 2 or 4");
  const auto& re = j["re"];
  const auto& im = j["im"];
  if (!re.is_array() || !im.is_array() || static_cast<long long>(re.size()) != n ||
      static_cast<long long>(im.size()) != n) {
    fail("re/im must have dim rows");
  }
  ComplexMatrix m(n, n);
  for (long long r = 0; r < n; ++r) {
    const auto& rr = re[static_cast<std::size_t>(r)];
    const auto& ir = im[static_cast<std::size_t>(r)];
    if (!rr.is_array() || !ir.is_array() || static_cast<long long>(rr.size()) != n ||
        static_cast<long long>(ir.size()) != n) {
      fail("row " + std::to_string(r) + " must have dim entries");
    }
    for (long long c = 0; c < n; ++c) {
      const auto& x = rr[static_cast<std::size_t>(c)];
      const auto& y = ir[static_cast<std::size_t>(c)];
      if (!x.is_number() || !y.is_number()) fail("entries must be numbers");
      m(r, c) = Complex(x.get<double>(), y.get<double>());
    }
  }
  if (!m.allFinite()) fail("entries must be finite");
  return m;
}

}  // namespace bellmix
