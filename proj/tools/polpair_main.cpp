#include "polpair/io.hpp"
#include "polpair/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

using polpair::AnalysisKind;
using polpair::Campaign;
using polpair::CountsMode;
using polpair::Json;
using polpair::PipelineConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::int64_t seed = -1;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON configuration file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "root seed (overrides config)");
  cmd->add_option("--mode", flags.mode, "counts mode: raw|net")
      ->check(CLI::IsMember({"raw", "net"}));
  cmd->add_flag("--dry-run", flags.dry_run, "validate configuration, write nothing");
}

PipelineConfig make_config(const CommonFlags& flags, Campaign campaign) {
  PipelineConfig config = flags.config_path.empty()
                              ? PipelineConfig{}
                              : PipelineConfig::from_file(flags.config_path);
  if (flags.config_path.empty() || campaign != Campaign::full) config.campaign = campaign;
  if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.mode.empty())
    config.counts_mode = (flags.mode == "raw") ? CountsMode::raw : CountsMode::net;
  if (flags.dry_run) config.dry_run = true;
  return config;
}

int run_campaign_command(const CommonFlags& flags, Campaign campaign, AnalysisKind kind) {
  PipelineConfig config = make_config(flags, campaign);
  const Json manifest = polpair::cmd_simulate(config);
  if (config.dry_run) {
    std::cout << polpair::dump_json(manifest);
    return 0;
  }
  const std::string campaign_file =
      config.output_dir + "/" + polpair::campaign_to_string(campaign) + "_campaign.json";
  const Json report =
      polpair::cmd_analyze({campaign_file}, kind, config.output_dir, config.counts_mode);
  std::cout << polpair::dump_json(report);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization-entangled photon-pair bench: simulation and analysis"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string analyze_kind;
  std::vector<std::string> analyze_inputs;

  CLI::App* simulate = app.add_subcommand("simulate", "simulate campaigns, write histograms");
  add_common(simulate, flags);

  CLI::App* analyze = app.add_subcommand("analyze", "analyze measurement files");
  add_common(analyze, flags);
  analyze->add_option("--kind", analyze_kind, "visibility|tomography|chsh")->required();
  analyze->add_option("inputs", analyze_inputs, "campaign JSON or histogram CSV files")
      ->required();

  CLI::App* tomo = app.add_subcommand("tomo", "simulate + reconstruct a tomography run");
  add_common(tomo, flags);
  CLI::App* chsh = app.add_subcommand("chsh", "simulate + evaluate a CHSH run");
  add_common(chsh, flags);
  CLI::App* visibility = app.add_subcommand("visibility", "simulate + fit an interference sweep");
  add_common(visibility, flags);
  CLI::App* pipeline = app.add_subcommand("pipeline", "full campaign with consolidated summary");
  add_common(pipeline, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const Json manifest = polpair::cmd_simulate(make_config(flags, Campaign::full));
      std::cout << polpair::dump_json(manifest);
      return 0;
    }
    if (analyze->parsed()) {
      const CountsMode mode = (flags.mode == "raw") ? CountsMode::raw : CountsMode::net;
      const std::string out = flags.out_dir.empty() ? "out" : flags.out_dir;
      const Json report = polpair::cmd_analyze(
          analyze_inputs, polpair::analysis_kind_from_string(analyze_kind), out, mode);
      std::cout << polpair::dump_json(report);
      return 0;
    }
    if (tomo->parsed())
      return run_campaign_command(flags, Campaign::tomography, AnalysisKind::tomography);
    if (chsh->parsed()) return run_campaign_command(flags, Campaign::chsh, AnalysisKind::chsh);
    if (visibility->parsed())
      return run_campaign_command(flags, Campaign::visibility_sweep, AnalysisKind::visibility);
    if (pipeline->parsed()) {
      const Json summary = polpair::cmd_pipeline(make_config(flags, Campaign::full));
      std::cout << polpair::dump_json(summary);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
