#include "polpair/counting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace polpair {

void Histogram::validate() const {
  if (bin_width <= 0.0) throw std::invalid_argument("Histogram: bin_width must be positive");
  if (!(0.0 <= t_i && t_i < t_f && t_f <= t_max))
    throw std::invalid_argument("Histogram: need 0 <= t_i < t_f <= t_max");
  const double bins = t_max / bin_width;
  if (std::abs(bins - std::round(bins)) > 1e-9)
    throw std::invalid_argument("Histogram: t_max must be a whole number of bins");
  if (counts.size() != static_cast<std::size_t>(std::llround(bins)))
    throw std::invalid_argument("Histogram: counts length does not match t_max / bin_width");
  for (auto c : counts)
    if (c < 0) throw std::invalid_argument("Histogram: negative count");
}

namespace {

// Overlap fraction of bin b with the interval [lo, hi].
double bin_overlap(const Histogram& h, std::size_t b, double lo, double hi) {
  const double b0 = static_cast<double>(b) * h.bin_width;
  const double b1 = b0 + h.bin_width;
  const double o = std::min(b1, hi) - std::max(b0, lo);
  return std::max(0.0, o) / h.bin_width;
}

} // namespace

double integrate_window(const Histogram& h) {
  h.validate();
  const double start_bin = h.t_i / h.bin_width;
  if (std::abs(start_bin - std::round(start_bin)) > 1e-9)
    throw std::invalid_argument("integrate_window: misaligned window (t_i not on a bin edge)");
  double sum = 0.0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double w = bin_overlap(h, b, h.t_i, h.t_f);
    if (w > 0.0) sum += w * static_cast<double>(h.counts[b]);
  }
  return sum;
}

double accidental_rate(const Histogram& h) {
  h.validate();
  const double len = h.t_max - h.t_f;
  if (len <= 0.0) throw std::invalid_argument("accidental_rate: empty noise region");
  double sum = 0.0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double w = bin_overlap(h, b, h.t_f, h.t_max);
    if (w > 0.0) sum += w * static_cast<double>(h.counts[b]);
  }
  return sum / len;
}

NetCount net_counts(double n_raw, double tau_acc, double window_length) {
  if (n_raw < 0.0 || tau_acc < 0.0 || window_length < 0.0)
    throw std::invalid_argument("net_counts: inputs must be nonnegative");
  const double value = n_raw - window_length * tau_acc;
  return NetCount{value, value < 0.0};
}

double car(double n_raw, double tau_acc, double window_length) {
  const double accidentals = tau_acc * window_length;
  if (accidentals == 0.0) return std::numeric_limits<double>::infinity();
  if (accidentals < 0.0) throw std::invalid_argument("car: negative accidentals");
  return net_counts(n_raw, tau_acc, window_length).value / accidentals;
}

MeasurementRecord reduce_histogram(const Histogram& h, const JointSetting& setting) {
  MeasurementRecord r;
  r.setting = setting;
  r.n_raw = integrate_window(h);
  r.tau_acc = accidental_rate(h);
  const NetCount net = net_counts(r.n_raw, r.tau_acc, h.window_length());
  r.n_net = net.value;
  r.low_signal = net.low_signal;
  r.duration = h.duration;
  r.singles_A = h.singles_A;
  r.window_s = h.window_length();
  r.noise_span_s = h.t_max - h.t_f;
  r.label = h.label;
  return r;
}

FringeFit fit_fringe(const std::vector<double>& angles, const std::vector<double>& counts,
                     int harmonic, const std::vector<double>& variances) {
  const std::size_t n = angles.size();
  if (n < 4 || counts.size() != n)
    throw std::invalid_argument("fit_fringe: need at least 4 (angle, count) pairs");
  if (harmonic < 1) throw std::invalid_argument("fit_fringe: harmonic must be >= 1");
  if (!variances.empty() && variances.size() != n)
    throw std::invalid_argument("fit_fringe: variances length mismatch");

  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = std::cos(harmonic * angles[i]);
    x(i, 2) = std::sin(harmonic * angles[i]);
    y(i) = counts[i];
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(2) < 1e-9 * svd.singularValues()(0))
    throw std::invalid_argument("fit_fringe: degenerate design matrix (angles collapse)");
  const Eigen::Vector3d c = svd.solve(y);
  if (c(0) <= 0.0) throw std::invalid_argument("fit_fringe: nonpositive mean level");

  FringeFit fit;
  fit.mean_level = c(0);
  const double amplitude = std::hypot(c(1), c(2));
  fit.visibility = std::clamp(amplitude / c(0), 0.0, 1.0);
  fit.phase = std::atan2(-c(2), c(1));
  fit.residual_norm = (y - x * c).norm();

  // Sandwich covariance of the unweighted estimator under per-point
  // variances (Poisson by default), then the delta method for V = |c1,c2|/c0.
  Eigen::VectorXd var(n);
  for (std::size_t i = 0; i < n; ++i)
    var(i) = variances.empty() ? std::max(1.0, counts[i]) : std::max(1.0, variances[i]);
  const Eigen::Matrix3d xtx_inv = (x.transpose() * x).inverse();
  const Eigen::Matrix3d cov =
      xtx_inv * (x.transpose() * var.asDiagonal() * x) * xtx_inv;
  const double safe_amp = std::max(amplitude, 1e-12);
  Eigen::Vector3d jac;
  jac(0) = -amplitude / (c(0) * c(0));
  jac(1) = c(1) / (safe_amp * c(0));
  jac(2) = c(2) / (safe_amp * c(0));
  fit.visibility_sigma = std::sqrt(std::max(0.0, jac.dot(cov * jac)));
  return fit;
}

VisibilityReport visibility_report(const std::vector<MeasurementRecord>& records) {
  if (records.empty()) throw std::invalid_argument("visibility_report: no records");

  // Group by coincidence channel (port pair); the sweep varies Alice's HWP.
  std::map<std::string, std::vector<const MeasurementRecord*>> groups;
  for (const auto& r : records) {
    const std::string key = std::string("A_") + (r.setting.alice.port == Port::V ? "V" : "H") +
                            " B_" + (r.setting.bob.port == Port::V ? "V" : "H");
    groups[key].push_back(&r);
  }

  VisibilityReport report;
  bool singles_done = false;
  for (auto& [key, recs] : groups) {
    std::vector<double> angles, raw, net, singles, raw_var, net_var;
    for (const auto* r : recs) {
      angles.push_back(r->setting.alice.hwp_angle);
      raw.push_back(r->n_raw);
      net.push_back(r->n_net);
      singles.push_back(static_cast<double>(r->singles_A));
      raw_var.push_back(std::max(1.0, r->n_raw));
      // Net counts inherit the raw variance plus the subtraction noise.
      net_var.push_back(std::max(1.0, r->n_raw) + std::max(0.0, r->n_raw - r->n_net));
    }
    ChannelVisibility cv;
    cv.channel = key;
    cv.raw = fit_fringe(angles, raw, 4, raw_var);
    cv.net = fit_fringe(angles, net, 4, net_var);
    report.channels.push_back(std::move(cv));
    if (!singles_done) {
      report.singles = fit_fringe(angles, singles, 4);
      report.angles = angles;
      singles_done = true;
    }
  }
  return report;
}

} // namespace polpair
