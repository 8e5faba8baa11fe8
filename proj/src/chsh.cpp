#include "polpair/chsh.hpp"

#include "polpair/optimize.hpp"
#include "polpair/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace polpair {

double CorrelatorCounts::variance(int i, int j) const {
  const double v = (i == 0) ? (j == 0 ? v00 : v01) : (j == 0 ? v10 : v11);
  if (v >= 0.0) return v;
  return (i == 0) ? (j == 0 ? n00 : n01) : (j == 0 ? n10 : n11);
}

double correlator_full(double n00, double n01, double n10, double n11) {
  const double total = n00 + n01 + n10 + n11;
  if (total <= 0.0) throw std::invalid_argument("correlator_full: no counts");
  return ((n00 + n11) - (n01 + n10)) / total;
}

double correlator_three_detector(double nB0, double nB1, double n10, double n11) {
  if (nB0 + nB1 <= 0.0) throw std::invalid_argument("correlator_three_detector: no counts");
  if (n10 > nB0 || n11 > nB1)
    throw std::invalid_argument("correlator_three_detector: N_1j exceeds its Bob-port total");
  return ((nB0 - 2.0 * n10) - (nB1 - 2.0 * n11)) / (nB0 + nB1);
}

double chsh_s(double e11, double e12, double e21, double e22) {
  for (double e : {e11, e12, e21, e22})
    if (std::abs(e) > 1.0 + 1e-9)
      throw std::invalid_argument("chsh_s: correlator outside [-1, 1]");
  return e11 + e12 + e21 - e22;
}

double sigma_s(const std::array<CorrelatorCounts, 4>& combos) {
  double var_s = 0.0;
  for (const auto& c : combos) {
    const double total = c.total();
    if (total <= 0.0) throw std::invalid_argument("sigma_s: combination with no counts");
    const double e = correlator_full(c.n00, c.n01, c.n10, c.n11);
    // dE/dn_ij = (s_ij - E) / total with s_ij the outcome parity.
    double var_e = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double sign = (i == j) ? 1.0 : -1.0;
        const double d = (sign - e) / total;
        var_e += c.variance(i, j) * d * d;
      }
    }
    var_s += var_e;
  }
  return std::sqrt(var_s);
}

double predicted_correlator(const DensityMatrix& rho, double alpha, double beta) {
  // Outcome-parity operator of a linear analyzer at angle phi is
  // [[cos 2phi, sin 2phi], [sin 2phi, -cos 2phi]] up to an overall sign that
  // cancels between the two arms.
  const Matrix4c op = kron(hwp(alpha), hwp(beta));
  return (rho.matrix() * op).trace().real();
}

namespace {

double predicted_s_linear(const DensityMatrix& rho, const Eigen::VectorXd& phi) {
  return chsh_s(predicted_correlator(rho, phi(0), phi(2)),
                predicted_correlator(rho, phi(0), phi(3)),
                predicted_correlator(rho, phi(1), phi(2)),
                predicted_correlator(rho, phi(1), phi(3)));
}

double analyzer_parity_correlator(const DensityMatrix& rho, const AnalyzerSetting& a,
                                  const AnalyzerSetting& b) {
  const auto parity = [](const AnalyzerSetting& s) {
    AnalyzerSetting h = s, v = s;
    h.port = Port::H;
    v.port = Port::V;
    return (analyzer_projector(h) - analyzer_projector(v)).eval();
  };
  return (rho.matrix() * kron(parity(a), parity(b))).trace().real();
}

} // namespace

OptimalSettings optimal_settings(const DensityMatrix& rho, bool full_search) {
  MinimizeOptions mopts;
  mopts.max_iterations = 500;
  mopts.window = 25;
  mopts.min_improvement = 1e-12;

  constexpr int kStarts = 8;
  if (!full_search) {
    const auto objective = [&](const Eigen::VectorXd& phi) {
      return -predicted_s_linear(rho, phi);
    };
    Eigen::VectorXd best_x;
    double best_s = -1e300;
    for (int start = 0; start < kStarts; ++start) {
      Eigen::VectorXd x0(4);
      if (start == 0) {
        x0 << 0.0, kPi / 4.0, kPi / 8.0, -kPi / 8.0;
      } else {
        Rng rng(derive_seed(0x43485348ULL /*'CHSH'*/, static_cast<std::uint64_t>(start)));
        for (int i = 0; i < 4; ++i) x0(i) = rng.uniform(-kPi / 2.0, kPi / 2.0);
      }
      const MinimizeResult r = minimize(objective, x0, mopts);
      if (r.converged && -r.value > best_s) {
        best_s = -r.value;
        best_x = r.x;
      }
    }
    if (best_x.size() == 0) throw std::runtime_error("optimal_settings: optimizer failed");
    OptimalSettings out;
    out.pair.alice = {linear_analyzer_setting(best_x(0)), linear_analyzer_setting(best_x(1))};
    out.pair.bob = {linear_analyzer_setting(best_x(2)), linear_analyzer_setting(best_x(3))};
    out.predicted_s = best_s;
    return out;
  }

  // Full search: both plate angles of all four analyzers.
  const auto settings_from = [](const Eigen::VectorXd& x) {
    ChshSettingPair pair;
    pair.alice = {AnalyzerSetting(x(0), x(1), Port::V), AnalyzerSetting(x(2), x(3), Port::V)};
    pair.bob = {AnalyzerSetting(x(4), x(5), Port::V), AnalyzerSetting(x(6), x(7), Port::V)};
    return pair;
  };
  const auto objective = [&](const Eigen::VectorXd& x) {
    const ChshSettingPair p = settings_from(x);
    return -chsh_s(analyzer_parity_correlator(rho, p.alice[0], p.bob[0]),
                   analyzer_parity_correlator(rho, p.alice[0], p.bob[1]),
                   analyzer_parity_correlator(rho, p.alice[1], p.bob[0]),
                   analyzer_parity_correlator(rho, p.alice[1], p.bob[1]));
  };
  Eigen::VectorXd best_x;
  double best_s = -1e300;
  for (int start = 0; start < kStarts; ++start) {
    Eigen::VectorXd x0(8);
    if (start == 0) {
      // Linear-optimum embedding: QWP tracking each analyzed angle.
      const OptimalSettings lin = optimal_settings(rho, false);
      x0 << lin.pair.alice[0].qwp_angle, lin.pair.alice[0].hwp_angle,
          lin.pair.alice[1].qwp_angle, lin.pair.alice[1].hwp_angle, lin.pair.bob[0].qwp_angle,
          lin.pair.bob[0].hwp_angle, lin.pair.bob[1].qwp_angle, lin.pair.bob[1].hwp_angle;
    } else {
      Rng rng(derive_seed(0x43485346ULL, static_cast<std::uint64_t>(start)));
      for (int i = 0; i < 8; ++i) x0(i) = rng.uniform(0.0, kPi);
    }
    const MinimizeResult r = minimize(objective, x0, mopts);
    if (r.converged && -r.value > best_s) {
      best_s = -r.value;
      best_x = r.x;
    }
  }
  if (best_x.size() == 0) throw std::runtime_error("optimal_settings: optimizer failed");
  OptimalSettings out;
  out.pair = settings_from(best_x);
  out.predicted_s = best_s;
  return out;
}

std::vector<JointSetting> chsh_campaign_settings(const ChshSettingPair& pair) {
  std::vector<JointSetting> settings;
  settings.reserve(16);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      AnalyzerSetting alice = pair.alice[i];
      AnalyzerSetting alice_comp = alice;
      alice_comp.hwp_angle = std::fmod(alice.hwp_angle + kPi / 4.0, kPi);
      AnalyzerSetting bob_v = pair.bob[j], bob_h = pair.bob[j];
      bob_v.port = Port::V;
      bob_h.port = Port::H;
      settings.push_back(JointSetting{alice, bob_v});
      settings.push_back(JointSetting{alice, bob_h});
      settings.push_back(JointSetting{alice_comp, bob_v});
      settings.push_back(JointSetting{alice_comp, bob_h});
    }
  }
  return settings;
}

ChshResult analyze_chsh(const std::vector<MeasurementRecord>& records, CountsMode mode) {
  if (records.size() != 16)
    throw std::invalid_argument("analyze_chsh: need the 16 CHSH campaign records");

  ChshResult result;
  std::array<CorrelatorCounts, 4> combos;
  for (int combo = 0; combo < 4; ++combo) {
    std::array<double, 4> value{}, variance{};
    for (int ch = 0; ch < 4; ++ch) {
      const MeasurementRecord& r = records[4 * combo + ch];
      if (mode == CountsMode::net) {
        value[ch] = std::max(0.0, r.n_net);
        variance[ch] = r.n_raw + (r.noise_span_s > 0.0
                                      ? r.window_s * r.window_s * r.tau_acc / r.noise_span_s
                                      : 0.0);
      } else {
        value[ch] = r.n_raw;
        variance[ch] = r.n_raw;
      }
    }

    // Alice's V output is outcome 1; her complement acquisition realizes
    // outcome 0. Bob's ports map directly (H = 0, V = 1).
    CorrelatorCounts& c = combos[combo];
    c.n11 = value[0];
    c.n10 = value[1];
    c.n01 = value[2];
    c.n00 = value[3];
    c.v11 = variance[0];
    c.v10 = variance[1];
    c.v01 = variance[2];
    c.v00 = variance[3];

    const double nB0 = c.n00 + c.n10;
    const double nB1 = c.n01 + c.n11;
    result.e_values[combo] = correlator_three_detector(nB0, nB1, c.n10, c.n11);
  }

  result.s = chsh_s(result.e_values[0], result.e_values[1], result.e_values[2],
                    result.e_values[3]);
  result.sigma_s = sigma_s(combos);
  return result;
}

ChshResult run_chsh(const ExperimentModel& model, const ChshSettingPair& pair, double duration,
                    CountsMode mode) {
  return analyze_chsh(run_campaign(model, chsh_campaign_settings(pair), duration), mode);
}

} // namespace polpair
