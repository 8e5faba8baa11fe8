#pragma once

#include "polpair/optics.hpp"
#include "polpair/quantum.hpp"
#include "polpair/simulation.hpp"
#include "polpair/tomography.hpp"

#include <array>

namespace polpair {

/// Two analyzer settings per arm; the four joint combinations feed the
/// correlators. Settings are produced with the analyzed polarization on the
/// V output (Alice's only instrumented port); Bob's H output supplies the
/// orthogonal outcome.
struct ChshSettingPair {
  std::array<AnalyzerSetting, 2> alice;
  std::array<AnalyzerSetting, 2> bob;
};

/// Correlators in the order (A1B1, A1B2, A2B1, A2B2), the CHSH combination
/// S = E11 + E12 + E21 - E22, and its first-order Poisson uncertainty.
struct ChshResult {
  std::array<double, 4> e_values{};
  double s = 0.0;
  double sigma_s = 0.0;
};

/// Counts for one joint combination; outcome indices are PBS ports (0 = H,
/// 1 = V, first index Alice). Variances default to the counts themselves
/// (Poisson); net counts carry the extra subtraction variance.
struct CorrelatorCounts {
  double n00 = 0.0, n01 = 0.0, n10 = 0.0, n11 = 0.0;
  double v00 = -1.0, v01 = -1.0, v10 = -1.0, v11 = -1.0;

  double variance(int i, int j) const;
  double total() const { return n00 + n01 + n10 + n11; }
};

/// E = ((N00 + N11) - (N01 + N10)) / total.
double correlator_full(double n00, double n01, double n10, double n11);

/// Three-detector estimator E = ((N0B - 2 N10) - (N1B - 2 N11)) / (N0B + N1B)
/// with N_iB = N_0i + N_1i estimated from the complementary acquisition.
double correlator_three_detector(double nB0, double nB1, double n10, double n11);

/// S = e11 + e12 + e21 - e22.
double chsh_s(double e11, double e12, double e21, double e22);

/// First-order propagated uncertainty on S from the per-combination counts.
double sigma_s(const std::array<CorrelatorCounts, 4>& combos);

struct OptimalSettings {
  ChshSettingPair pair;
  double predicted_s = 0.0;
};

/// Analyzer angles maximizing the Born-rule prediction of S. The default
/// search space is linear-polarization analyzers (one angle per setting);
/// `full_search` frees both plates of every analyzer (8 angles).
OptimalSettings optimal_settings(const DensityMatrix& rho, bool full_search = false);

/// Predicted correlator for linear analyzers at angles (alpha, beta).
double predicted_correlator(const DensityMatrix& rho, double alpha, double beta);

/// The sixteen acquisitions realizing the three-detector CHSH measurement:
/// per joint combination, Alice's nominal angle and its complement (HWP
/// +45°), each against both of Bob's ports. Order: combination-major
/// (A1B1, A1B2, A2B1, A2B2), channels (nominal,B_V), (nominal,B_H),
/// (complement,B_V), (complement,B_H) within each.
std::vector<JointSetting> chsh_campaign_settings(const ChshSettingPair& pair);

/// Correlators, S and sigma_S from the records of a chsh_campaign_settings
/// acquisition (order as produced there). Negative net counts are clamped.
ChshResult analyze_chsh(const std::vector<MeasurementRecord>& records,
                        CountsMode mode = CountsMode::net);

/// Simulate the three-detector CHSH measurement and analyze it.
ChshResult run_chsh(const ExperimentModel& model, const ChshSettingPair& pair,
                    double duration, CountsMode mode = CountsMode::net);

} // namespace polpair
