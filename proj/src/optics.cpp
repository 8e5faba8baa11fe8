#include "polpair/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace polpair {

namespace {

double canonical_angle(double theta) {
  if (!std::isfinite(theta))
    throw std::invalid_argument("AnalyzerSetting: angle must be finite");
  double a = std::fmod(theta, kPi);
  if (a < 0.0) a += kPi;
  return a;
}

} // namespace

AnalyzerSetting::AnalyzerSetting(double qwp, double hwp, Port p)
    : qwp_angle(canonical_angle(qwp)), hwp_angle(canonical_angle(hwp)), port(p) {}

AnalyzerSetting AnalyzerSetting::from_degrees(double qwp_deg, double hwp_deg, Port p) {
  return AnalyzerSetting(deg_to_rad(qwp_deg), deg_to_rad(hwp_deg), p);
}

Matrix2c hwp(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("hwp: angle must be finite");
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  Matrix2c m;
  m << c, s, s, -c;
  return m;
}

Matrix2c qwp(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("qwp: angle must be finite");
  const Complex i(0.0, 1.0);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix2c m;
  m << c * c + i * s * s, (1.0 - i) * s * c, (1.0 - i) * s * c, s * s + i * c * c;
  return m;
}

Vector2c analyzer_state(const AnalyzerSetting& s) {
  const Matrix2c u = hwp(s.hwp_angle) * qwp(s.qwp_angle);
  Vector2c port = (s.port == Port::H) ? Vector2c(1.0, 0.0) : Vector2c(0.0, 1.0);
  return u.adjoint() * port;
}

Matrix2c analyzer_projector(const AnalyzerSetting& s) {
  const Vector2c psi = analyzer_state(s);
  return psi * psi.adjoint();
}

double coincidence_probability(const DensityMatrix& rho, const JointSetting& j) {
  const Matrix4c op = kron(analyzer_projector(j.alice), analyzer_projector(j.bob));
  return std::clamp((rho.matrix() * op).trace().real(), 0.0, 1.0);
}

double singles_probability(const DensityMatrix& rho, const AnalyzerSetting& s, Arm arm) {
  const Matrix2c p = analyzer_projector(s);
  const Matrix4c op = (arm == Arm::A) ? kron(p, Matrix2c::Identity())
                                      : kron(Matrix2c::Identity(), p);
  return std::clamp((rho.matrix() * op).trace().real(), 0.0, 1.0);
}

AnalyzerSetting linear_analyzer_setting(double phi, Port port) {
  // With the QWP axis at phi, the plate pair maps |phi> onto the V port when
  // the HWP sits at phi/2 + 45° (and onto the H port with the HWP at phi/2).
  const double hwp_angle = (port == Port::V) ? phi / 2.0 + kPi / 4.0 : phi / 2.0;
  return AnalyzerSetting(phi, hwp_angle, port);
}

} // namespace polpair
