#pragma once

#include "polpair/quantum.hpp"
#include "polpair/types.hpp"

namespace polpair {

// Analyzer chain: light traverses the quarter-wave plate, then the half-wave
// plate, then the polarizing beam splitter. Waveplate matrices follow the
// retarder convention W(theta, phi) = R(theta) diag(1, e^{i phi}) R(-theta),
// so hwp(0) = diag(1, -1) and qwp(0) = diag(1, i).

enum class Port { H, V };

enum class Arm { A, B };

/// One analyzer: waveplate rotations plus the PBS output port observed.
/// Angles are physical plate rotations in radians, canonicalized to [0, pi).
struct AnalyzerSetting {
  double qwp_angle = 0.0;
  double hwp_angle = 0.0;
  Port port = Port::H;

  AnalyzerSetting() = default;
  AnalyzerSetting(double qwp, double hwp, Port p);

  static AnalyzerSetting from_degrees(double qwp_deg, double hwp_deg, Port p);
};

struct JointSetting {
  AnalyzerSetting alice;
  AnalyzerSetting bob;
};

/// Half-wave plate with fast axis at theta: rotates linear polarization by
/// 2*theta.
Matrix2c hwp(double theta);

/// Quarter-wave plate with fast axis at theta; qwp(theta)^2 = hwp(theta).
Matrix2c qwp(double theta);

/// Projector onto the single-photon state selected by the analyzer:
/// P = U† |port><port| U with U = hwp(hwp_angle) * qwp(qwp_angle).
Matrix2c analyzer_projector(const AnalyzerSetting& s);

/// The pure state the analyzer projects onto (the port vector pulled back
/// through the plates).
Vector2c analyzer_state(const AnalyzerSetting& s);

/// Born probability of a coincidence: tr[rho (P_A ⊗ P_B)].
double coincidence_probability(const DensityMatrix& rho, const JointSetting& j);

/// Born probability of a single detection on one arm: tr[rho (P ⊗ I)] or
/// tr[rho (I ⊗ P)].
double singles_probability(const DensityMatrix& rho, const AnalyzerSetting& s, Arm arm);

/// Plate angles that project the V port onto linear polarization at angle
/// phi (and hence the H port onto phi + 90°). The QWP axis is aligned with
/// the analyzed polarization so no ellipticity is introduced.
AnalyzerSetting linear_analyzer_setting(double phi, Port port = Port::V);

} // namespace polpair
