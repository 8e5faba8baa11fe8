#pragma once

#include "polpair/histogram.hpp"
#include "polpair/optics.hpp"

#include <vector>

namespace polpair {

/// One analyzed acquisition: settings plus the reduced counting statistics.
/// window_s and noise_span_s carry the acquisition geometry so records can
/// be re-analyzed (e.g. variance propagation) without the histogram.
struct MeasurementRecord {
  JointSetting setting;
  double n_raw = 0.0;      // window integral (fractional edge bin allowed)
  double n_net = 0.0;      // n_raw - window * tau_acc
  double tau_acc = 0.0;    // accidental coincidences per second of delay
  double duration = 0.0;   // seconds
  std::int64_t singles_A = 0;
  bool low_signal = false; // set when n_net came out negative
  double window_s = 0.0;   // t_f - t_i
  double noise_span_s = 0.0; // t_max - t_f
  std::string label;
};

/// Result of net_counts: the subtracted value plus a low-signal flag for
/// negative outcomes (reported as-is).
struct NetCount {
  double value = 0.0;
  bool low_signal = false;
};

/// Sinusoidal fringe fit c0 (1 + V cos(k theta + phase)).
struct FringeFit {
  double mean_level = 0.0;
  double visibility = 0.0;       // clamped to [0, 1]
  double phase = 0.0;            // radians
  double residual_norm = 0.0;
  double visibility_sigma = 0.0; // Poisson-propagated 1-sigma on V
};

/// Integral of the histogram over the signal window [t_i, t_f). Bins that
/// only partially overlap the window contribute their overlap fraction, so
/// the value matches the continuous-time integral the counting identities
/// assume. t_i must sit on a bin edge; a misaligned window is an error.
double integrate_window(const Histogram& h);

/// Mean accidental counts per second of delay, estimated on (t_f, t_max].
double accidental_rate(const Histogram& h);

/// n_raw - window_length * tau_acc. Negative values are kept and flagged.
NetCount net_counts(double n_raw, double tau_acc, double window_length);

/// Coincidence-to-accidental ratio N_net / (window * tau_acc). Returns +inf
/// when there are no accidentals; negative values mean noise-only data.
double car(double n_raw, double tau_acc, double window_length);

/// Reduce a histogram to a MeasurementRecord.
MeasurementRecord reduce_histogram(const Histogram& h, const JointSetting& setting);

/// Linear least-squares fit of c0 + c1 cos(k theta) + c2 sin(k theta).
/// `variances` (optional, same length as counts) feed the visibility error
/// estimate only; the fit itself is unweighted. Throws on a degenerate
/// design matrix or a nonpositive fitted mean level.
FringeFit fit_fringe(const std::vector<double>& angles, const std::vector<double>& counts,
                     int harmonic, const std::vector<double>& variances = {});

/// Fringe fits for one coincidence channel of a sweep.
struct ChannelVisibility {
  std::string channel;
  FringeFit raw;
  FringeFit net;
};

/// Visibility analysis of a single-angle sweep: per-channel raw/net fringe
/// fits plus the Alice singles fringe.
struct VisibilityReport {
  std::vector<ChannelVisibility> channels;
  FringeFit singles;
  std::vector<double> angles; // Alice HWP angles, radians
};

VisibilityReport visibility_report(const std::vector<MeasurementRecord>& records);

} // namespace polpair
