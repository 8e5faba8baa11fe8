#include "polpair/pipeline.hpp"

#include "polpair/rng.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace polpair {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSeedTagVisibility = 1;
constexpr std::uint64_t kSeedTagTomography = 2;
constexpr std::uint64_t kSeedTagChsh = 3;
constexpr std::uint64_t kSeedTagReference = 4;

std::uint64_t campaign_seed_tag(Campaign c) {
  switch (c) {
    case Campaign::visibility_sweep: return kSeedTagVisibility;
    case Campaign::tomography: return kSeedTagTomography;
    case Campaign::chsh: return kSeedTagChsh;
    default: return 0;
  }
}

CountsMode mode_from_string(const std::string& s) {
  if (s == "net") return CountsMode::net;
  if (s == "raw") return CountsMode::raw;
  throw std::invalid_argument("counts_mode must be \"net\" or \"raw\", got \"" + s + "\"");
}

std::string mode_to_string(CountsMode m) { return m == CountsMode::net ? "net" : "raw"; }

void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

std::string padded(int i) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%03d", i);
  return buf;
}

std::vector<MeasurementRecord> load_records(const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("no input files given");
  // A single JSON file holds the whole campaign; otherwise each input is a
  // histogram CSV whose label encodes the setting.
  if (inputs.size() == 1 && inputs[0].size() > 5 &&
      inputs[0].substr(inputs[0].size() - 5) == ".json") {
    Json j;
    try {
      j = Json::parse(read_text_file(inputs[0]));
    } catch (const Json::parse_error& e) {
      throw std::invalid_argument(inputs[0] + ": " + e.what());
    }
    return records_from_json(j);
  }
  std::vector<MeasurementRecord> records;
  for (const auto& path : inputs) {
    Histogram h;
    try {
      h = histogram_from_csv(read_text_file(path));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ": " + e.what());
    }
    records.push_back(reduce_histogram(h, parse_setting_label(h.label)));
  }
  return records;
}

Json fringe_to_json(const FringeFit& f) {
  return Json{{"mean_level", f.mean_level},
              {"visibility", f.visibility},
              {"visibility_sigma", f.visibility_sigma},
              {"phase_deg", rad_to_deg(f.phase)},
              {"residual_norm", f.residual_norm}};
}

Json visibility_report_json(const std::vector<MeasurementRecord>& records) {
  const VisibilityReport rep = visibility_report(records);
  Json channels = Json::array();
  for (const auto& ch : rep.channels) {
    Json points = Json::array();
    for (const auto& r : records) {
      const std::string key =
          std::string("A_") + (r.setting.alice.port == Port::V ? "V" : "H") + " B_" +
          (r.setting.bob.port == Port::V ? "V" : "H");
      if (key != ch.channel) continue;
      points.push_back(Json{{"hwp_deg", rad_to_deg(r.setting.alice.hwp_angle)},
                            {"n_raw", r.n_raw},
                            {"n_net", r.n_net},
                            {"singles", r.singles_A}});
    }
    channels.push_back(Json{{"channel", ch.channel},
                            {"visibility_raw", ch.raw.visibility},
                            {"visibility_net", ch.net.visibility},
                            {"visibility_net_sigma", ch.net.visibility_sigma},
                            {"visibility_raw_sigma", ch.raw.visibility_sigma},
                            {"phase_deg", rad_to_deg(ch.net.phase)},
                            {"points", points}});
  }
  return Json{{"channels", channels},
              {"singles", fringe_to_json(rep.singles)}};
}

std::string visibility_plot_csv(const std::vector<MeasurementRecord>& records) {
  // Sweep records are angle-major with Bob's V then H port.
  std::string csv = "hwp_deg,raw_AVBV,net_AVBV,raw_AVBH,net_AVBH,singles\n";
  char buf[256];
  for (std::size_t i = 0; i + 1 < records.size(); i += 2) {
    const auto& v = records[i];
    const auto& h = records[i + 1];
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%lld\n",
                  rad_to_deg(v.setting.alice.hwp_angle), v.n_raw, v.n_net, h.n_raw, h.n_net,
                  static_cast<long long>(v.singles_A));
    csv += buf;
  }
  return csv;
}

Json tomography_report_json(const std::vector<MeasurementRecord>& records, CountsMode mode) {
  const TomographySet set = TomographySet::from_records(records);
  TomographyOptions opts;
  opts.mode = mode;
  const MleResult mle = mle_reconstruct_detailed(set, opts);
  const RecoveryResult rec = recover_chip_state(mle.rho);
  const double f_max = fidelity_to_maximal(rec.rho_in);
  const auto ang_a = euler_angles(rec.j_A);
  const auto ang_b = euler_angles(rec.j_B);
  return Json{{"rho", to_json(mle.rho)},
              {"rho_in", to_json(rec.rho_in)},
              {"fidelity", rec.fidelity},
              {"recovered_a2", rec.a * rec.a},
              {"fidelity_to_maximal", f_max},
              {"concurrence", concurrence(rec.rho_in)},
              {"jones_A_deg", Json::array({rad_to_deg(ang_a[0]), rad_to_deg(ang_a[1]),
                                           rad_to_deg(ang_a[2])})},
              {"jones_B_deg", Json::array({rad_to_deg(ang_b[0]), rad_to_deg(ang_b[1]),
                                           rad_to_deg(ang_b[2])})},
              {"optimizer", Json{{"starts", mle.starts},
                                 {"iterations", mle.iterations},
                                 {"objective", mle.objective},
                                 {"evaluations", mle.evaluations},
                                 {"clamped_records", mle.clamped_records}}},
              {"mode", mode_to_string(mode)}};
}

std::string tomography_plot_csv(const Json& report) {
  // Bar-chart data: Re/Im of the unrotated reconstruction next to the
  // recovered target-family state.
  const DensityMatrix rho = density_matrix_from_json(report.at("rho_in"));
  const double a2 = report.at("recovered_a2").get<double>();
  const double a = std::sqrt(std::clamp(a2, 0.0, 1.0));
  const DensityMatrix target =
      DensityMatrix::from_pure(target_state(a, std::sqrt(std::max(0.0, 1.0 - a * a))));
  const char* names[4] = {"HH", "HV", "VH", "VV"};
  std::string csv = "row,col,re_reconstructed,im_reconstructed,re_target,im_target\n";
  char buf[256];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.10g,%.10g,%.10g\n", names[i], names[j],
                    rho(i, j).real(), rho(i, j).imag(), target(i, j).real(),
                    target(i, j).imag());
      csv += buf;
    }
  }
  return csv;
}

Json chsh_report_json(const std::vector<MeasurementRecord>& records, CountsMode mode) {
  const ChshResult res = analyze_chsh(records, mode);
  // The campaign layout fixes where each arm's two settings appear.
  const Json settings = Json{
      {"alice", Json::array({to_json(records[0].setting.alice), to_json(records[8].setting.alice)})},
      {"bob", Json::array({to_json(records[0].setting.bob), to_json(records[4].setting.bob)})}};
  return Json{{"settings", settings},
              {"E", Json::array({res.e_values[0], res.e_values[1], res.e_values[2],
                                 res.e_values[3]})},
              {"S", res.s},
              {"sigma_S", res.sigma_s},
              {"violation_sigmas", res.sigma_s > 0.0 ? (res.s - 2.0) / res.sigma_s : 0.0},
              {"mode", mode_to_string(mode)}};
}

struct SimulatedCampaign {
  std::vector<std::string> histogram_files;
  std::string records_file;
  std::vector<MeasurementRecord> records;
};

SimulatedCampaign simulate_one(const PipelineConfig& config, Campaign c,
                               const std::vector<JointSetting>& settings, double duration) {
  const ExperimentModel model = config.build_model(c);
  const CampaignOutput out = run_campaign_with_histograms(model, settings, duration);
  SimulatedCampaign sim;
  sim.records = out.records;
  if (config.dry_run) return sim;
  // Manifest entries are relative to the output directory so reruns into
  // different directories stay byte-identical.
  const std::string prefix = campaign_to_string(c);
  for (std::size_t i = 0; i < out.histograms.size(); ++i) {
    const std::string file = prefix + "_" + padded(static_cast<int>(i)) + ".csv";
    write_text_file(config.output_dir + "/" + file, histogram_to_csv(out.histograms[i]));
    sim.histogram_files.push_back(file);
  }
  sim.records_file = prefix + "_campaign.json";
  write_text_file(config.output_dir + "/" + sim.records_file,
                  dump_json(to_json(out.records)));
  return sim;
}

ChshSettingPair chsh_pair_for(const ExperimentModel& model) {
  return optimal_settings(model.chip_state).pair;
}

} // namespace

Campaign campaign_from_string(const std::string& s) {
  if (s == "visibility-sweep") return Campaign::visibility_sweep;
  if (s == "tomography") return Campaign::tomography;
  if (s == "chsh") return Campaign::chsh;
  if (s == "full") return Campaign::full;
  throw std::invalid_argument("campaign must be one of visibility-sweep, tomography, chsh, "
                              "full; got \"" + s + "\"");
}

std::string campaign_to_string(Campaign c) {
  switch (c) {
    case Campaign::visibility_sweep: return "visibility-sweep";
    case Campaign::tomography: return "tomography";
    case Campaign::chsh: return "chsh";
    default: return "full";
  }
}

AnalysisKind analysis_kind_from_string(const std::string& s) {
  if (s == "visibility") return AnalysisKind::visibility;
  if (s == "tomography" || s == "tomo") return AnalysisKind::tomography;
  if (s == "chsh") return AnalysisKind::chsh;
  throw std::invalid_argument("analysis kind must be visibility, tomography or chsh; got \"" +
                              s + "\"");
}

PipelineConfig PipelineConfig::from_json(const Json& j) {
  PipelineConfig c;
  if (j.contains("model")) c.model_spec = j.at("model");
  if (c.model_spec.is_string() && c.model_spec.get<std::string>() != "paper-reference")
    throw std::invalid_argument("config field 'model': unknown preset \"" +
                                c.model_spec.get<std::string>() + "\"");
  if (!c.model_spec.is_string()) model_from_json(c.model_spec); // validate early
  if (j.contains("campaign")) c.campaign = campaign_from_string(j.at("campaign").get<std::string>());
  if (j.contains("durations")) {
    const Json& d = j.at("durations");
    if (d.is_number()) {
      c.visibility_duration = c.tomography_duration = c.chsh_duration = d.get<double>();
    } else {
      c.visibility_duration = d.value("visibility", c.visibility_duration);
      c.tomography_duration = d.value("tomography", c.tomography_duration);
      c.chsh_duration = d.value("chsh", c.chsh_duration);
    }
  }
  if (c.visibility_duration <= 0.0 || c.tomography_duration <= 0.0 || c.chsh_duration <= 0.0)
    throw std::invalid_argument("config field 'durations': must be positive");
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("counts_mode"))
    c.counts_mode = mode_from_string(j.at("counts_mode").get<std::string>());
  if (j.contains("dry_run")) c.dry_run = j.at("dry_run").get<bool>();
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

ExperimentModel PipelineConfig::build_model(Campaign c) const {
  ExperimentModel model = model_spec.is_string() ? paper_reference_model()
                                                 : model_from_json(model_spec);
  model.seed = derive_seed(seed, 0x434d50ULL /*'CMP'*/, campaign_seed_tag(c));
  model.validate();
  return model;
}

std::vector<JointSetting> visibility_sweep_settings() {
  std::vector<JointSetting> settings;
  const AnalyzerSetting bob_v(0.0, 0.0, Port::V);
  const AnalyzerSetting bob_h(0.0, 0.0, Port::H);
  for (int i = 0; i < 12; ++i) {
    const AnalyzerSetting alice(0.0, deg_to_rad(15.0 * i), Port::V);
    settings.push_back(JointSetting{alice, bob_v});
    settings.push_back(JointSetting{alice, bob_h});
  }
  return settings;
}

Json cmd_simulate(const PipelineConfig& config) {
  if (!config.dry_run) ensure_output_dir(config.output_dir);

  Json campaigns = Json::object();
  const auto record_campaign = [&](Campaign c, const SimulatedCampaign& sim, Json extra = {}) {
    Json entry{{"records", sim.records_file}, {"histograms", sim.histogram_files},
               {"n_records", sim.records.size()}};
    if (!extra.is_null()) entry.update(extra);
    campaigns[campaign_to_string(c)] = entry;
  };

  const bool all = config.campaign == Campaign::full;
  if (all || config.campaign == Campaign::visibility_sweep) {
    record_campaign(Campaign::visibility_sweep,
                    simulate_one(config, Campaign::visibility_sweep,
                                 visibility_sweep_settings(), config.visibility_duration));
  }
  if (all || config.campaign == Campaign::tomography) {
    record_campaign(Campaign::tomography,
                    simulate_one(config, Campaign::tomography, james_settings(),
                                 config.tomography_duration));
  }
  if (all || config.campaign == Campaign::chsh) {
    const ExperimentModel model = config.build_model(Campaign::chsh);
    const OptimalSettings opt = optimal_settings(model.chip_state);
    record_campaign(Campaign::chsh,
                    simulate_one(config, Campaign::chsh, chsh_campaign_settings(opt.pair),
                                 config.chsh_duration),
                    Json{{"predicted_S", opt.predicted_s},
                         {"settings",
                          Json{{"alice", Json::array({to_json(opt.pair.alice[0]),
                                                      to_json(opt.pair.alice[1])})},
                               {"bob", Json::array({to_json(opt.pair.bob[0]),
                                                    to_json(opt.pair.bob[1])})}}}});
  }

  Json manifest{{"campaigns", campaigns},
                {"seed", config.seed},
                {"counts_mode", mode_to_string(config.counts_mode)},
                {"dry_run", config.dry_run}};
  if (!config.dry_run)
    write_text_file(config.output_dir + "/manifest.json", dump_json(manifest));
  return manifest;
}

Json cmd_analyze(const std::vector<std::string>& inputs, AnalysisKind kind,
                 const std::string& out_dir, CountsMode mode) {
  const std::vector<MeasurementRecord> records = load_records(inputs);
  ensure_output_dir(out_dir);
  switch (kind) {
    case AnalysisKind::visibility: {
      const Json report = visibility_report_json(records);
      write_text_file(out_dir + "/visibility_report.json", dump_json(report));
      write_text_file(out_dir + "/visibility_fringe.csv", visibility_plot_csv(records));
      return report;
    }
    case AnalysisKind::tomography: {
      const Json report = tomography_report_json(records, mode);
      write_text_file(out_dir + "/tomography_report.json", dump_json(report));
      write_text_file(out_dir + "/tomography_matrix.csv", tomography_plot_csv(report));
      return report;
    }
    default: {
      const Json report = chsh_report_json(records, mode);
      write_text_file(out_dir + "/chsh_report.json", dump_json(report));
      return report;
    }
  }
}

Json cmd_pipeline(const PipelineConfig& config) {
  if (config.dry_run) {
    config.build_model(Campaign::full); // validates the model spec
    return Json{{"dry_run", true},
                {"campaign", campaign_to_string(config.campaign)},
                {"output_dir", config.output_dir},
                {"seed", config.seed}};
  }
  ensure_output_dir(config.output_dir);

  // Reference acquisition: CAR and detected rate at the model's anchor
  // setting.
  ExperimentModel ref_model = config.build_model(Campaign::full);
  ref_model.seed = derive_seed(config.seed, 0x434d50ULL, kSeedTagReference);
  const Histogram ref_hist =
      simulate_histogram(ref_model, ref_model.reference_setting, config.tomography_duration, 0);
  const MeasurementRecord ref_record =
      reduce_histogram(ref_hist, ref_model.reference_setting);
  const double measured_car = car(ref_record.n_raw, ref_record.tau_acc, ref_record.window_s);

  // Visibility sweep.
  Json visibility;
  {
    PipelineConfig c = config;
    c.campaign = Campaign::visibility_sweep;
    cmd_simulate(c);
    visibility = cmd_analyze({config.output_dir + "/visibility-sweep_campaign.json"},
                             AnalysisKind::visibility, config.output_dir, config.counts_mode);
  }

  // Tomography, analyzed both with and without noise subtraction.
  Json tomo_net, tomo_raw;
  {
    PipelineConfig c = config;
    c.campaign = Campaign::tomography;
    cmd_simulate(c);
    const std::string file = config.output_dir + "/tomography_campaign.json";
    tomo_net = cmd_analyze({file}, AnalysisKind::tomography, config.output_dir, CountsMode::net);
    tomo_raw = tomography_report_json(records_from_json(Json::parse(read_text_file(file))),
                                      CountsMode::raw);
    write_text_file(config.output_dir + "/tomography_report_raw.json", dump_json(tomo_raw));
  }

  // CHSH.
  Json chsh_report, chsh_manifest;
  {
    PipelineConfig c = config;
    c.campaign = Campaign::chsh;
    chsh_manifest = cmd_simulate(c);
    chsh_report = cmd_analyze({config.output_dir + "/chsh_campaign.json"}, AnalysisKind::chsh,
                              config.output_dir, config.counts_mode);
  }

  const Json& selected_tomo = (config.counts_mode == CountsMode::net) ? tomo_net : tomo_raw;
  double net_vis = 0.0, raw_vis = 0.0;
  for (const auto& ch : visibility.at("channels")) {
    if (ch.at("channel").get<std::string>() == "A_V B_V") {
      net_vis = ch.at("visibility_net").get<double>();
      raw_vis = ch.at("visibility_raw").get<double>();
    }
  }

  Json summary{
      {"seed", config.seed},
      {"counts_mode", mode_to_string(config.counts_mode)},
      {"car", measured_car},
      {"pair_rate_hz", ref_record.n_net / ref_record.duration},
      {"visibility_net_AVBV", net_vis},
      {"visibility_raw_AVBV", raw_vis},
      {"singles_visibility", visibility.at("singles").at("visibility").get<double>()},
      {"fidelity", selected_tomo.at("fidelity").get<double>()},
      {"fidelity_net", tomo_net.at("fidelity").get<double>()},
      {"fidelity_raw", tomo_raw.at("fidelity").get<double>()},
      {"recovered_a2", selected_tomo.at("recovered_a2").get<double>()},
      {"fidelity_to_maximal", selected_tomo.at("fidelity_to_maximal").get<double>()},
      {"S", chsh_report.at("S").get<double>()},
      {"sigma_S", chsh_report.at("sigma_S").get<double>()},
      {"violation_sigmas", chsh_report.at("violation_sigmas").get<double>()},
      {"predicted_S",
       chsh_manifest.at("campaigns").at("chsh").at("predicted_S").get<double>()},
      {"paper_S", kPublishedS},
      {"paper_fidelity", kPublishedFidelity},
      {"paper_car", kPublishedCar}};
  write_text_file(config.output_dir + "/summary.json", dump_json(summary));
  return summary;
}

} // namespace polpair
