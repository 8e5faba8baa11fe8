#pragma once

#include "polpair/types.hpp"

#include <array>

namespace polpair {

// Two-qubit polarization states in the fixed product basis
// (|HH>, |HV>, |VH>, |VV>); the first tensor slot is Alice's (signal) photon,
// the second is Bob's (idler).

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = -1e-10;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Normalized two-qubit state vector.
class PureState {
 public:
  /// Validates Σ|amplitude|² = 1 before accepting the vector.
  explicit PureState(const Vector4c& amplitudes);

  const Vector4c& amplitudes() const { return amplitudes_; }
  Complex amplitude(int i) const { return amplitudes_(i); }

 private:
  Vector4c amplitudes_;
};

/// 4x4 Hermitian, unit-trace, positive-semidefinite operator.
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12), trace (1e-12) and eigenvalues >= -1e-10.
  explicit DensityMatrix(const Matrix4c& entries);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed();

  const Matrix4c& matrix() const { return entries_; }
  Complex operator()(int i, int j) const { return entries_(i, j); }

  /// Eigenvalues in increasing order (real, clamped to >= 0 only in callers
  /// that need it).
  Eigen::Vector4d eigenvalues() const;

 private:
  Matrix4c entries_;
};

/// 2x2 unitary acting on one photon's polarization. Loss channels are out of
/// scope: everything between chip and analyzer is a rotation.
class JonesMatrix {
 public:
  /// Validates J†J = I within 1e-10.
  explicit JonesMatrix(const Matrix2c& entries);

  static JonesMatrix identity();
  /// Polarization flip |H> <-> |V>.
  static JonesMatrix flip();
  /// Euler-angle unitary  Rz(alpha) Ry(beta) Rz(gamma); covers SU(2), which is
  /// all that matters once the global phase is dropped.
  static JonesMatrix from_angles(double alpha, double beta, double gamma);

  const Matrix2c& matrix() const { return entries_; }

  /// Frobenius distance to the closest phase multiple of the identity;
  /// zero iff the rotation is trivial. Used to break ties between
  /// equally-good recovered rotations.
  double rotation_norm() const;

 private:
  Matrix2c entries_;
};

/// a|HH> + b|VV> with real nonnegative a, b; rejects a² + b² != 1 (1e-9).
PureState target_state(double a, double b);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))².
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Fidelity against a pure state: <psi|rho|psi>.
double fidelity(const DensityMatrix& rho, const PureState& psi);

/// (jA ⊗ jB) rho (jA† ⊗ jB†).
DensityMatrix apply_local_rotation(const DensityMatrix& rho, const JonesMatrix& jA,
                                   const JonesMatrix& jB);

/// Wootters concurrence; 2ab for the pure state a|HH> + b|VV>.
double concurrence(const DensityMatrix& rho);

/// Euler angles (alpha, beta, gamma) such that
/// JonesMatrix::from_angles(alpha, beta, gamma) equals j up to a global
/// phase. gamma is zeroed in the beta = 0 or pi degeneracies.
std::array<double, 3> euler_angles(const JonesMatrix& j);

} // namespace polpair
