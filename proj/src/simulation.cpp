#include "polpair/simulation.hpp"

#include "polpair/rng.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace polpair {

void ExperimentModel::validate() const {
  if (pair_rate < 0.0 || accidental_rate < 0.0 || dark_rate_per_detector < 0.0 ||
      singles_rate_scale < 0.0)
    throw std::invalid_argument("ExperimentModel: rates must be nonnegative");
  if (bin_width <= 0.0) throw std::invalid_argument("ExperimentModel: bin_width must be positive");
  if (!(0.0 <= t_i && t_i < t_f && t_f <= t_max))
    throw std::invalid_argument("ExperimentModel: need 0 <= t_i < t_f <= t_max");
  const double bins = t_max / bin_width;
  if (std::abs(bins - std::round(bins)) > 1e-9)
    throw std::invalid_argument("ExperimentModel: t_max must be a whole number of bins");
  const double start_bin = t_i / bin_width;
  if (std::abs(start_bin - std::round(start_bin)) > 1e-9)
    throw std::invalid_argument("ExperimentModel: t_i must sit on a bin edge");
  if (std::floor(t_f / bin_width + 1e-9) <= std::round(start_bin))
    throw std::invalid_argument("ExperimentModel: window must contain at least one full bin");
  if (pair_rate > 0.0) {
    const double p_ref = coincidence_probability(state_at_analyzers(), reference_setting);
    if (p_ref < 1e-9)
      throw std::invalid_argument("ExperimentModel: reference setting has ~zero probability");
  }
}

DensityMatrix ExperimentModel::state_at_analyzers() const {
  return apply_local_rotation(chip_state, fiber_A, fiber_B);
}

double ExperimentModel::mean_signal(const JointSetting& j, double duration) const {
  if (pair_rate == 0.0) return 0.0;
  const DensityMatrix rho = state_at_analyzers();
  const double p_ref = coincidence_probability(rho, reference_setting);
  return pair_rate * duration * coincidence_probability(rho, j) / p_ref;
}

double ExperimentModel::mean_singles(const AnalyzerSetting& alice, double duration) const {
  const double p = singles_probability(state_at_analyzers(), alice, Arm::A);
  return (singles_rate_scale * p + dark_rate_per_detector) * duration;
}

ExperimentModel paper_reference_model() {
  ExperimentModel m;

  // Source: sqrt(0.6)|HH> + sqrt(0.4)|VV> with partially suppressed HH/VV
  // coherence. The coherence factor sqrt(0.56) puts the state's dominant
  // eigenvalue (equivalently, its best pure-state fidelity) at 0.88 while
  // leaving the computational-basis fringes at full contrast.
  const double a = std::sqrt(0.6);
  const double b = std::sqrt(0.4);
  Matrix4c rho = Matrix4c::Zero();
  rho(0, 0) = a * a;
  rho(3, 3) = b * b;
  rho(0, 3) = kReferenceChipCoherence * a * b;
  rho(3, 0) = kReferenceChipCoherence * a * b;
  m.chip_state = DensityMatrix(rho);

  m.fiber_A = JonesMatrix::identity();
  m.fiber_B = JonesMatrix::identity();

  m.pair_rate = 0.4;                    // Hz, detected, at the reference setting
  m.dark_rate_per_detector = 10.0;      // Hz
  m.singles_rate_scale = 1.0e5;         // Hz at unit probability
  m.bin_width = 250e-12;                // s
  m.t_i = 5.0e-9;                       // s (bin 20)
  m.t_f = m.t_i + 0.8e-9;               // s, 0.8 ns window (3.2 bins)
  m.t_max = 20.0e-9;                    // s (80 bins)
  m.accidental_rate = kReferenceWindowAccidentals / (m.t_f - m.t_i);
  m.seed = 1;
  m.alice_v_only = true;

  // Both analyzers aligned to the state's dominant (H) axis: the brightest
  // constructive setting. Alice reaches it through her V output with the
  // HWP at 45°.
  m.reference_setting = JointSetting{AnalyzerSetting(0.0, kPi / 4.0, Port::V),
                                     AnalyzerSetting(0.0, 0.0, Port::H)};
  return m;
}

Histogram simulate_histogram(const ExperimentModel& model, const JointSetting& j,
                             double duration, std::uint64_t stream_index) {
  model.validate();
  if (duration <= 0.0) throw std::invalid_argument("simulate_histogram: duration must be positive");
  if (model.alice_v_only && j.alice.port == Port::H)
    throw std::invalid_argument("simulate_histogram: Alice's H output is not instrumented");

  Rng rng(derive_seed(model.seed, 0x53494dULL /*'SIM'*/, stream_index));

  Histogram h;
  h.bin_width = model.bin_width;
  h.t_i = model.t_i;
  h.t_f = model.t_f;
  h.t_max = model.t_max;
  h.duration = duration;
  h.label = setting_label(j);
  h.counts.assign(static_cast<std::size_t>(std::llround(model.t_max / model.bin_width)), 0);

  // Signal coincidences land uniformly over the bins fully contained in the
  // window; the partial edge bin carries background only, which keeps
  // N_raw - window * tau_acc an unbiased estimate of the signal.
  const std::size_t first_bin =
      static_cast<std::size_t>(std::llround(model.t_i / model.bin_width));
  const std::size_t end_bin =
      static_cast<std::size_t>(std::floor(model.t_f / model.bin_width + 1e-9));
  const std::int64_t n_signal = rng.poisson(model.mean_signal(j, duration));
  for (std::int64_t k = 0; k < n_signal; ++k) {
    const std::size_t bin = first_bin + rng.uniform_index(end_bin - first_bin);
    ++h.counts[bin];
  }

  const double accidental_mean = model.accidental_rate * duration * model.bin_width;
  for (auto& c : h.counts) c += rng.poisson(accidental_mean);

  h.singles_A = rng.poisson(model.mean_singles(j.alice, duration));
  return h;
}

std::vector<MeasurementRecord> run_campaign(const ExperimentModel& model,
                                            const std::vector<JointSetting>& settings,
                                            double duration_each) {
  return run_campaign_with_histograms(model, settings, duration_each).records;
}

CampaignOutput run_campaign_with_histograms(const ExperimentModel& model,
                                            const std::vector<JointSetting>& settings,
                                            double duration_each) {
  if (settings.empty()) throw std::invalid_argument("run_campaign: empty settings list");
  CampaignOutput out;
  out.histograms.reserve(settings.size());
  out.records.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    Histogram h = simulate_histogram(model, settings[i], duration_each, i);
    out.records.push_back(reduce_histogram(h, settings[i]));
    out.histograms.push_back(std::move(h));
  }
  return out;
}

std::string setting_label(const JointSetting& j) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "A:q=%.10g;h=%.10g;p=%c|B:q=%.10g;h=%.10g;p=%c",
                rad_to_deg(j.alice.qwp_angle), rad_to_deg(j.alice.hwp_angle),
                j.alice.port == Port::V ? 'V' : 'H', rad_to_deg(j.bob.qwp_angle),
                rad_to_deg(j.bob.hwp_angle), j.bob.port == Port::V ? 'V' : 'H');
  return buf;
}

JointSetting parse_setting_label(const std::string& label) {
  double aq, ah, bq, bh;
  char ap, bp;
  if (std::sscanf(label.c_str(), "A:q=%lf;h=%lf;p=%c|B:q=%lf;h=%lf;p=%c", &aq, &ah, &ap, &bq,
                  &bh, &bp) != 6 ||
      (ap != 'H' && ap != 'V') || (bp != 'H' && bp != 'V'))
    throw std::invalid_argument("parse_setting_label: bad label '" + label + "'");
  return JointSetting{AnalyzerSetting::from_degrees(aq, ah, ap == 'V' ? Port::V : Port::H),
                      AnalyzerSetting::from_degrees(bq, bh, bp == 'V' ? Port::V : Port::H)};
}

} // namespace polpair
