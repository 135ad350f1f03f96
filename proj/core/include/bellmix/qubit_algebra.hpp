#pragma once

// Small dense Hermitian kernel for one- and two-qubit operators.
//
// Everything here works on 2x2 or 4x4 complex matrices. The two-qubit basis
// order is (HH, HV, VH, VV) with the signal photon as the left tensor factor.

#include <complex>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace bellmix {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kStoredTolerance = 1e-12;
inline constexpr double kSilentClip = 1e-10;
inline constexpr double kRejectNegative = 1e-6;

struct HermitianEigen {
  Eigen::VectorXd values;  // descending
  ComplexMatrix vectors;   // orthonormal columns, vectors.col(k) <-> values(k)
};

/// Largest |m(j,k) - conj(m(k,j))|.
double hermiticity_defect(const ComplexMatrix& m);

/// Cyclic complex Jacobi diagonalization.
///
/// Throws NonHermitianInput if `m` is not square of dimension 2 or 4, contains
/// non-finite entries, or deviates from Hermitian by more than 1e-10.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

/// Eigenvalues at or below the roundoff floor 4 n eps max(values) set to zero.
Eigen::VectorXd clipped_spectrum(const Eigen::VectorXd& values);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-1e-6, 0) are clipped to zero; anything more negative is InvalidState.
ComplexMatrix matrix_sqrt(const ComplexMatrix& m);

/// Pure two-photon polarization state, amplitudes ordered (HH, HV, VH, VV).
class PureState {
 public:
  /// Throws NotNormalized unless the squared norm is 1 within 1e-12.
  static PureState from_amplitudes(const Vector4c& amplitudes);

  const Vector4c& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](int k) const { return amplitudes_(k); }
  Matrix4c projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  explicit PureState(const Vector4c& a) : amplitudes_(a) {}
  Vector4c amplitudes_;
};

/// Two-photon density matrix. Always Hermitian, unit trace and PSD within the
/// stored tolerance; there is no way to build one that is not.
class DensityMatrix {
 public:
  /// Validating constructor. Hermitian within 1e-10 and trace 1 within 1e-9
  /// are required (else NonHermitianInput / InvalidState). Negative
  /// eigenvalues down to -1e-6 are clipped; below that is InvalidState.
  static DensityMatrix from_matrix(const ComplexMatrix& m);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed();

  const Matrix4c& matrix() const noexcept { return matrix_; }
  Complex operator()(int row, int col) const { return matrix_(row, col); }

  /// Re tr(rho * op).
  double expectation(const Matrix4c& op) const;

  bool operator==(const DensityMatrix&) const = default;

 private:
  friend DensityMatrix nearest_physical(const ComplexMatrix& m);
  explicit DensityMatrix(const Matrix4c& m) : matrix_(m) {}
  Matrix4c matrix_;
};

/// Symmetrizes, clips negative eigenvalues to zero and renormalizes to unit
/// trace. Physical input is returned unchanged (after symmetrization).
/// Throws ZeroTrace when nothing positive survives the clip.
DensityMatrix nearest_physical(const ComplexMatrix& m);

/// Maximum absolute elementwise difference.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// {"dim": n, "re": [[...]], "im": [[...]]}, row-major.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace bellmix
