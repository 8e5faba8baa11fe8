#pragma once

#include "polpair/chsh.hpp"
#include "polpair/io.hpp"
#include "polpair/simulation.hpp"
#include "polpair/tomography.hpp"

#include <string>
#include <vector>

namespace polpair {

enum class Campaign { visibility_sweep, tomography, chsh, full };

Campaign campaign_from_string(const std::string& s);
std::string campaign_to_string(Campaign c);

/// Configuration for the simulation/analysis commands. Parsed from JSON:
/// model is either the string "paper-reference" or a full model object;
/// durations is a number (applied everywhere) or a per-campaign object.
struct PipelineConfig {
  Json model_spec = "paper-reference";
  Campaign campaign = Campaign::full;
  double visibility_duration = 1200.0;  // s per sweep point
  double tomography_duration = 1200.0;  // s per setting
  double chsh_duration = 170.0;         // s per acquisition
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  CountsMode counts_mode = CountsMode::net;
  bool dry_run = false;

  static PipelineConfig from_json(const Json& j);
  static PipelineConfig from_file(const std::string& path);

  /// Model with its stream seed derived from (config seed, campaign).
  ExperimentModel build_model(Campaign c) const;
};

/// The Alice-HWP sweep realizing the two-photon interference measurement:
/// 12 angles (15° apart), Bob idle, both Bob ports per angle.
std::vector<JointSetting> visibility_sweep_settings();

/// Simulate the configured campaign(s); write one histogram CSV per record,
/// a campaign JSON (array of records) per campaign and a manifest listing
/// all outputs. Returns the manifest.
Json cmd_simulate(const PipelineConfig& config);

enum class AnalysisKind { visibility, tomography, chsh };
AnalysisKind analysis_kind_from_string(const std::string& s);

/// Analyze measurement files (campaign JSON or histogram CSVs): writes a
/// report JSON and a plot-ready CSV into out_dir and returns the report.
Json cmd_analyze(const std::vector<std::string>& inputs, AnalysisKind kind,
                 const std::string& out_dir, CountsMode mode);

/// Simulate + analyze everything; returns the consolidated summary JSON
/// (written as summary.json) with the published reference values inlined
/// for side-by-side comparison.
Json cmd_pipeline(const PipelineConfig& config);

/// Published values the pipeline summary quotes next to simulated ones.
inline constexpr double kPublishedS = 2.37;
inline constexpr double kPublishedFidelity = 0.88;
inline constexpr double kPublishedCar = 8.0;

} // namespace polpair
