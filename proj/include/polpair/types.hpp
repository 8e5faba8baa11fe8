#pragma once

#include <Eigen/Dense>
#include <complex>

namespace polpair {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Kronecker product of two dense expressions, evaluated into a fixed-size
/// matrix when both operands have fixed sizes.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  constexpr int RA = DerivedA::RowsAtCompileTime;
  constexpr int CA = DerivedA::ColsAtCompileTime;
  constexpr int RB = DerivedB::RowsAtCompileTime;
  constexpr int CB = DerivedB::ColsAtCompileTime;
  constexpr int R = (RA < 0 || RB < 0) ? Eigen::Dynamic : RA * RB;
  constexpr int C = (CA < 0 || CB < 0) ? Eigen::Dynamic : CA * CB;
  Eigen::Matrix<Scalar, R, C> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// (m + m†)/2, discarding the anti-Hermitian round-off part.
template <typename Derived>
auto hermitize(const Eigen::MatrixBase<Derived>& m) {
  return ((m + m.adjoint()) / 2.0).eval();
}

} // namespace polpair
