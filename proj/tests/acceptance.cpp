// Acceptance suite: end-to-end checks of the toolkit against its contract,
// one printed line per criterion. Exits nonzero if any criterion fails.

#include "oracles.hpp"
#include "polpair/chsh.hpp"
#include "polpair/counting.hpp"
#include "polpair/io.hpp"
#include "polpair/optics.hpp"
#include "polpair/pipeline.hpp"
#include "polpair/quantum.hpp"
#include "polpair/rng.hpp"
#include "polpair/simulation.hpp"
#include "polpair/tomography.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace polpair;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

DensityMatrix phi_plus() {
  Vector4c v;
  v << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  return DensityMatrix::from_pure(PureState(v));
}

DensityMatrix nonmax_target() {
  return DensityMatrix::from_pure(target_state(std::sqrt(0.6), std::sqrt(0.4)));
}

TomographySet exact_counts_set(const DensityMatrix& rho, double flux) {
  const auto settings = james_settings();
  std::vector<MeasurementRecord> records;
  for (int i = 0; i < 16; ++i) {
    MeasurementRecord r;
    r.setting = settings[i];
    r.n_net = flux * coincidence_probability(rho, settings[i]);
    r.n_raw = r.n_net;
    r.duration = 1.0;
    records.push_back(r);
  }
  return TomographySet::from_records(records);
}

bool check_physical(const DensityMatrix& rho) {
  const Matrix4c& m = rho.matrix();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return false;
  if (std::abs(m.trace().real() - 1.0) > 1e-12) return false;
  return rho.eigenvalues().minCoeff() >= -1e-10;
}

// ---------------------------------------------------------------------------

void criterion_1_state_model() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(0xACC1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho(oracles::random_density(rng));
    const DensityMatrix sigma(oracles::random_density(rng));
    const JonesMatrix ja = JonesMatrix::from_angles(rng.uniform(-kPi, kPi),
                                                    rng.uniform(-kPi, kPi),
                                                    rng.uniform(-kPi, kPi));
    const JonesMatrix jb = JonesMatrix::from_angles(rng.uniform(-kPi, kPi),
                                                    rng.uniform(-kPi, kPi),
                                                    rng.uniform(-kPi, kPi));

    worst = std::max(worst, std::abs(fidelity(rho, sigma) -
                                     oracles::fidelity_eigenroute(rho.matrix(), sigma.matrix())));

    const DensityMatrix rotated = apply_local_rotation(rho, ja, jb);
    worst = std::max(worst,
                     (rotated.matrix() -
                      oracles::rotate_loops(rho.matrix(), ja.matrix(), jb.matrix()))
                         .cwiseAbs()
                         .maxCoeff());

    worst = std::max(worst, std::abs(concurrence(rho) -
                                     oracles::concurrence_hermitian_route(rho.matrix())));

    const AnalyzerSetting sa(rng.uniform(0.0, kPi), rng.uniform(0.0, kPi),
                             rng.uniform() < 0.5 ? Port::H : Port::V);
    const AnalyzerSetting sb(rng.uniform(0.0, kPi), rng.uniform(0.0, kPi),
                             rng.uniform() < 0.5 ? Port::H : Port::V);
    worst = std::max(worst, (analyzer_projector(sa) -
                             oracles::projector_loops(sa.qwp_angle, sa.hwp_angle,
                                                      sa.port == Port::V))
                                .cwiseAbs()
                                .maxCoeff());

    const Matrix4c op = oracles::kron_loops(
        oracles::projector_loops(sa.qwp_angle, sa.hwp_angle, sa.port == Port::V),
        oracles::projector_loops(sb.qwp_angle, sb.hwp_angle, sb.port == Port::V));
    const double p_oracle = oracles::trace_product_loops(rho.matrix(), op).real();
    worst = std::max(worst,
                     std::abs(coincidence_probability(rho, JointSetting{sa, sb}) - p_oracle));
  }
  const double dt = seconds_since(t0);
  char buf[180];
  std::snprintf(buf, sizeof(buf),
                "state-model ops vs brute-force oracles, 100 instances: max |delta| = %.2e "
                "(tol 1e-9), %.2f s (limit 5 s)",
                worst, dt);
  report(1, worst < 1e-9 && dt < 5.0, buf);
}

void criterion_2_noiseless_tomography() {
  const auto t0 = std::chrono::steady_clock::now();
  const DensityMatrix states[3] = {phi_plus(), DensityMatrix::from_pure(target_state(1.0, 0.0)),
                                   nonmax_target()};
  double min_fidelity = 1.0, worst_entry = 0.0;
  bool physical = true;
  for (const auto& truth : states) {
    const TomographySet set = exact_counts_set(truth, 1000.0);
    const DensityMatrix rho = mle_reconstruct(set);
    min_fidelity = std::min(min_fidelity, fidelity(rho, truth));
    worst_entry =
        std::max(worst_entry, (rho.matrix() - linear_inversion(set)).cwiseAbs().maxCoeff());
    physical = physical && check_physical(rho);
  }
  const double dt = seconds_since(t0);
  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "noiseless MLE round-trip (Phi+, |HH>, nonmax target): min fidelity %.6f "
                "(>= 0.999), max |MLE - LI| = %.2e (tol 1e-6), physical %s, %.2f s (limit 30 s)",
                min_fidelity, worst_entry, physical ? "yes" : "no", dt);
  report(2, min_fidelity >= 0.999 && worst_entry < 1e-6 && physical && dt < 30.0, buf);
}

void criterion_3_fidelity_headline(std::vector<DensityMatrix>* reconstructions) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> f_net, f_raw;
  for (int trial = 0; trial < 20; ++trial) {
    ExperimentModel m = paper_reference_model();
    m.seed = derive_seed(static_cast<std::uint64_t>(100 + trial), 0x434d50ULL, 2);
    const TomographySet set =
        TomographySet::from_records(run_campaign(m, james_settings(), 1200.0));

    const DensityMatrix rho_net = mle_reconstruct(set);
    f_net.push_back(recover_chip_state(rho_net).fidelity);
    reconstructions->push_back(rho_net);

    TomographyOptions raw_opts;
    raw_opts.mode = CountsMode::raw;
    const DensityMatrix rho_raw = mle_reconstruct(set, raw_opts);
    f_raw.push_back(recover_chip_state(rho_raw).fidelity);
    reconstructions->push_back(rho_raw);
  }
  const double med_net = median(f_net);
  const double med_raw = median(f_raw);
  const double dt = seconds_since(t0);
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "paper headline fidelity, 20 seeded trials: median %.3f (target 0.88 +/- 0.05; "
                "published 0.88), raw-counts median %.3f, subtraction gain %.3f (>= 0.10; "
                "published drop to 0.71), %.1f s (limit 600 s)",
                med_net, med_raw, med_net - med_raw, dt);
  report(3,
         med_net >= 0.83 && med_net <= 0.93 && (med_net - med_raw) >= 0.10 && dt < 600.0,
         buf);
}

void criterion_4_chsh_headline() {
  const auto t0 = std::chrono::steady_clock::now();

  const OptimalSettings opt = optimal_settings(nonmax_target());
  const double c = concurrence(nonmax_target());
  const double s_formula = 2.0 * std::sqrt(1.0 + c * c); // = 2.8 for a² = 0.6
  const bool predict_ok = std::abs(opt.predicted_s - 2.8) < 1e-4 &&
                          std::abs(opt.predicted_s - s_formula) < 1e-4;

  // Coarse grid-search oracle cannot beat the optimizer.
  double grid_best = -1e300;
  constexpr int kSteps = 20;
  static double table[kSteps][kSteps];
  for (int i = 0; i < kSteps; ++i)
    for (int j = 0; j < kSteps; ++j)
      table[i][j] = predicted_correlator(nonmax_target(), i * kPi / kSteps, j * kPi / kSteps);
  for (int a1 = 0; a1 < kSteps; ++a1)
    for (int a2 = 0; a2 < kSteps; ++a2)
      for (int b1 = 0; b1 < kSteps; ++b1)
        for (int b2 = 0; b2 < kSteps; ++b2)
          grid_best = std::max(grid_best, table[a1][b1] + table[a1][b2] + table[a2][b1] -
                                              table[a2][b2]);
  const bool grid_ok = grid_best <= opt.predicted_s + 1e-3;

  std::vector<double> s_values, sigmas;
  int violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ExperimentModel m = paper_reference_model();
    m.seed = derive_seed(static_cast<std::uint64_t>(200 + trial), 0x434d50ULL, 3);
    const ChshResult res = run_chsh(m, opt.pair, 170.0);
    s_values.push_back(res.s);
    sigmas.push_back(res.sigma_s);
    if (res.s > 2.0) ++violations;
  }
  const double med_s = median(s_values);
  const double med_sigma = median(sigmas);
  const double dt = seconds_since(t0);
  char buf[280];
  std::snprintf(buf, sizeof(buf),
                "paper headline CHSH: predicted S(target) = %.5f (2.8 +/- 1e-4, grid <= +1e-3), "
                "simulated median S = %.2f, median sigma_S = %.3f (0.19 +/- 50%%), violations "
                "%d/20 (>= 18), published S = 2.37 +/- 0.19 not reproduced by design, %.1f s "
                "(limit 300 s)",
                opt.predicted_s, med_s, med_sigma, violations, dt);
  report(4,
         predict_ok && grid_ok && med_sigma >= 0.095 && med_sigma <= 0.285 &&
             violations >= 18 && med_s >= 2.1 && med_s <= 2.7 && dt < 300.0,
         buf);
}

void criterion_5_visibility_headline() {
  ExperimentModel m = paper_reference_model();
  m.seed = derive_seed(2, 0x434d50ULL, 1);
  const auto records = run_campaign(m, visibility_sweep_settings(), 1200.0);
  const VisibilityReport rep = visibility_report(records);
  const ChannelVisibility* avbv = nullptr;
  for (const auto& ch : rep.channels)
    if (ch.channel == "A_V B_V") avbv = &ch;
  const double v_net = avbv ? avbv->net.visibility : 0.0;
  const double v_raw = avbv ? avbv->raw.visibility : 0.0;
  const double v_singles = rep.singles.visibility;
  const double sigma_singles = rep.singles.visibility_sigma;
  const bool singles_ok = std::abs(v_singles - 0.2) <= 3.0 * sigma_singles;
  char buf[260];
  std::snprintf(buf, sizeof(buf),
                "paper headline visibilities (12 x 20 min sweep): net A_V B_V %.3f (>= 0.95; "
                "published 0.99), raw %.3f (in [0.7, 0.9]; published ~0.8), singles %.5f vs "
                "|a^2 - b^2| = 0.2 at %.1f sigma (<= 3; published 12%% is out-of-model)",
                v_net, v_raw, v_singles,
                std::abs(v_singles - 0.2) / std::max(sigma_singles, 1e-12));
  report(5, avbv && v_net >= 0.95 && v_raw >= 0.7 && v_raw <= 0.9 && singles_ok, buf);
}

void criterion_6_counting_identities() {
  // Identity decomposition on every histogram of a reference campaign.
  ExperimentModel m = paper_reference_model();
  m.seed = 0xC0;
  const auto settings = james_settings();
  const CampaignOutput out = run_campaign_with_histograms(m, settings, 600.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < out.histograms.size(); ++i) {
    const double n_raw = integrate_window(out.histograms[i]);
    const double tau = accidental_rate(out.histograms[i]);
    const double n_net = net_counts(n_raw, tau, out.histograms[i].window_length()).value;
    worst = std::max(worst,
                     std::abs(n_raw - (n_net + out.histograms[i].window_length() * tau)));
    worst = std::max(worst, std::abs(out.records[i].n_raw - n_raw));
  }

  // Three-detector estimator == full correlator on 10^4 fuzzed integer counts.
  Rng rng(0xC1);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double n00 = static_cast<double>(rng.uniform_index(2000));
    const double n01 = static_cast<double>(rng.uniform_index(2000));
    const double n10 = static_cast<double>(rng.uniform_index(2000));
    const double n11 = static_cast<double>(rng.uniform_index(2000));
    if (n00 + n01 + n10 + n11 == 0.0) continue;
    if (correlator_three_detector(n00 + n10, n01 + n11, n10, n11) !=
        correlator_full(n00, n01, n10, n11))
      ++mismatches;
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "counting identities: max |N_raw - (N_net + window tau_acc)| = %.1e (exact), "
                "three-detector vs full correlator mismatches %d/10000 (exact equality)",
                worst, mismatches);
  report(6, worst < 1e-9 && mismatches == 0, buf);
}

void criterion_7_physicality(const std::vector<DensityMatrix>& reconstructions) {
  bool all_physical = true;
  for (const auto& rho : reconstructions) all_physical = all_physical && check_physical(rho);

  Rng rng(0xF7);
  double worst_s = 0.0;
  bool tsirelson_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const DensityMatrix rho(oracles::random_density(rng));
    const double s = optimal_settings(rho).predicted_s;
    worst_s = std::max(worst_s, s);
    tsirelson_ok = tsirelson_ok && s <= 2.0 * std::sqrt(2.0) + 1e-6;
  }
  double worst_product = 0.0;
  bool product_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho(oracles::random_product_state(rng));
    const double s = optimal_settings(rho).predicted_s;
    worst_product = std::max(worst_product, s);
    product_ok = product_ok && s <= 2.0 + 1e-6;
  }
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "physicality: %zu reconstructed matrices Hermitian/unit-trace/PSD %s; predicted "
                "S <= 2 sqrt(2) + 1e-6 over 1000 random states (max %.6f); 200 product states "
                "<= 2 + 1e-6 (max %.6f)",
                reconstructions.size(), all_physical ? "yes" : "NO", worst_s, worst_product);
  report(7, all_physical && tsirelson_ok && product_ok, buf);
}

void criterion_8_determinism() {
  const fs::path base = fs::temp_directory_path() / "polpair_acceptance_determinism";
  fs::remove_all(base);
  PipelineConfig config;
  config.seed = 5;
  config.visibility_duration = 300.0;
  config.tomography_duration = 300.0;
  config.chsh_duration = 60.0;

  config.output_dir = (base / "run_a").string();
  const Json summary_a = cmd_pipeline(config);
  config.output_dir = (base / "run_b").string();
  const Json summary_b = cmd_pipeline(config);

  bool identical = dump_json(summary_a) == dump_json(summary_b);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(base / "run_a")) {
    const fs::path other = base / "run_b" / entry.path().filename();
    ++files;
    if (!fs::exists(other) ||
        read_text_file(entry.path().string()) != read_text_file(other.string()))
      identical = false;
  }
  fs::remove_all(base);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "determinism: identical config+seed reruns byte-identical across %d output "
                "files: %s",
                files, identical ? "yes" : "NO");
  report(8, identical && files > 0, buf);
}

} // namespace

int main() {
  std::printf("acceptance suite: polarization-entangled pair source toolkit\n");
  criterion_1_state_model();
  criterion_2_noiseless_tomography();
  std::vector<DensityMatrix> reconstructions;
  criterion_3_fidelity_headline(&reconstructions);
  criterion_4_chsh_headline();
  criterion_5_visibility_headline();
  criterion_6_counting_identities();
  criterion_7_physicality(reconstructions);
  criterion_8_determinism();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}
