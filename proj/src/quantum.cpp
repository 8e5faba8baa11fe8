#include "polpair/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polpair {

namespace {

Matrix4c sqrt_psd(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m);
  Eigen::Vector4d vals = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

} // namespace

PureState::PureState(const Vector4c& amplitudes) : amplitudes_(amplitudes) {
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTolerance)
    throw std::invalid_argument("PureState: amplitudes are not normalized");
}

DensityMatrix::DensityMatrix(const Matrix4c& entries) : entries_(entries) {
  if (((entries - entries.adjoint()).cwiseAbs().maxCoeff()) > 2.0 * kHermitianTolerance)
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(entries.trace().real() - 1.0) > kTraceTolerance ||
      std::abs(entries.trace().imag()) > kTraceTolerance)
    throw std::invalid_argument("DensityMatrix: trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(hermitize(entries));
  if (es.eigenvalues().minCoeff() < kPsdTolerance)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  entries_ = hermitize(entries);
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix4c::Identity() / 4.0);
}

Eigen::Vector4d DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

JonesMatrix::JonesMatrix(const Matrix2c& entries) : entries_(entries) {
  if ((entries.adjoint() * entries - Matrix2c::Identity()).cwiseAbs().maxCoeff() >
      kUnitaryTolerance)
    throw std::invalid_argument("JonesMatrix: not unitary");
}

JonesMatrix JonesMatrix::identity() { return JonesMatrix(Matrix2c::Identity()); }

JonesMatrix JonesMatrix::flip() {
  Matrix2c x;
  x << 0, 1, 1, 0;
  return JonesMatrix(x);
}

JonesMatrix JonesMatrix::from_angles(double alpha, double beta, double gamma) {
  const Complex i(0.0, 1.0);
  const double c = std::cos(beta / 2.0);
  const double s = std::sin(beta / 2.0);
  Matrix2c u;
  u << std::exp(-i * ((alpha + gamma) / 2.0)) * c, -std::exp(-i * ((alpha - gamma) / 2.0)) * s,
      std::exp(i * ((alpha - gamma) / 2.0)) * s, std::exp(i * ((alpha + gamma) / 2.0)) * c;
  return JonesMatrix(u);
}

double JonesMatrix::rotation_norm() const {
  // min over phi of ||U - e^{i phi} I||_F  =  sqrt(4 - 2|tr U|).
  return std::sqrt(std::max(0.0, 4.0 - 2.0 * std::abs(entries_.trace())));
}

PureState target_state(double a, double b) {
  if (a < 0.0 || b < 0.0)
    throw std::invalid_argument("target_state: amplitudes must be nonnegative");
  if (std::abs(a * a + b * b - 1.0) > 1e-9)
    throw std::invalid_argument("target_state: a^2 + b^2 must equal 1");
  Vector4c amps;
  amps << a, 0.0, 0.0, b;
  // Round away the 1e-9 slack so the PureState invariant holds exactly.
  amps /= std::sqrt(amps.squaredNorm());
  return PureState(amps);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const Matrix4c sr = sqrt_psd(rho.matrix());
  const Matrix4c inner = hermitize(sr * sigma.matrix() * sr);
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(inner, Eigen::EigenvaluesOnly);
  // Eigenvalues below the solver's noise floor are rank-deficiency artifacts;
  // sqrt would amplify them to ~1e-8, so zero them out.
  const double floor = 1e-13 * std::max(es.eigenvalues().maxCoeff(), 0.0);
  double tr = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > floor) tr += std::sqrt(lam);
  }
  return std::clamp(tr * tr, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const PureState& psi) {
  const Complex v = psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes();
  return std::clamp(v.real(), 0.0, 1.0);
}

DensityMatrix apply_local_rotation(const DensityMatrix& rho, const JonesMatrix& jA,
                                   const JonesMatrix& jB) {
  const Matrix4c u = kron(jA.matrix(), jB.matrix());
  return DensityMatrix(hermitize(u * rho.matrix() * u.adjoint()));
}

std::array<double, 3> euler_angles(const JonesMatrix& j) {
  // Strip the global phase (principal square root of the determinant), then
  // read the Euler angles off the SU(2) form.
  Matrix2c u = j.matrix();
  const Complex det = u.determinant();
  u /= std::sqrt(det);
  const double beta = 2.0 * std::atan2(std::abs(u(1, 0)), std::abs(u(0, 0)));
  double alpha = 0.0, gamma = 0.0;
  const bool have_c = std::abs(u(0, 0)) > 1e-12;
  const bool have_s = std::abs(u(1, 0)) > 1e-12;
  if (have_c && have_s) {
    const double sum = -2.0 * std::arg(u(0, 0));
    const double diff = 2.0 * std::arg(u(1, 0));
    alpha = (sum + diff) / 2.0;
    gamma = (sum - diff) / 2.0;
  } else if (have_c) {
    alpha = -2.0 * std::arg(u(0, 0));
  } else {
    alpha = 2.0 * std::arg(u(1, 0));
  }
  return {alpha, beta, gamma};
}

double concurrence(const DensityMatrix& rho) {
  Matrix4c yy = Matrix4c::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix4c rho_tilde = yy * rho.matrix().conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix4c> es(rho.matrix() * rho_tilde, false);
  Eigen::Vector4d raw;
  for (int i = 0; i < 4; ++i) raw(i) = std::max(0.0, es.eigenvalues()(i).real());
  const double floor = 1e-13 * raw.maxCoeff(); // suppress rank-deficiency noise
  Eigen::Vector4d lams;
  for (int i = 0; i < 4; ++i) lams(i) = raw(i) > floor ? std::sqrt(raw(i)) : 0.0;
  std::sort(lams.data(), lams.data() + 4, std::greater<double>());
  return std::max(0.0, lams(0) - lams(1) - lams(2) - lams(3));
}

} // namespace polpair
