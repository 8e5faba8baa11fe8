#pragma once

#include "polpair/chsh.hpp"
#include "polpair/counting.hpp"
#include "polpair/quantum.hpp"
#include "polpair/simulation.hpp"
#include "polpair/tomography.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace polpair {

using Json = nlohmann::json;

// JSON codecs. Angles cross the boundary in degrees; the core works in
// radians throughout.

Json to_json(const AnalyzerSetting& s);
AnalyzerSetting analyzer_setting_from_json(const Json& j);

Json to_json(const JointSetting& s);
JointSetting joint_setting_from_json(const Json& j);

Json to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const Json& j);

Json to_json(const JonesMatrix& m);
JonesMatrix jones_from_json(const Json& j);

Json to_json(const MeasurementRecord& r);
MeasurementRecord record_from_json(const Json& j);

Json to_json(const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> records_from_json(const Json& j);

Json to_json(const ExperimentModel& m);
ExperimentModel model_from_json(const Json& j);

/// Histogram CSV: one header line
/// `# bin_width_s,t_i_s,t_f_s,t_max_s,duration_s,singles_A,label`
/// followed by one count per line.
std::string histogram_to_csv(const Histogram& h);
Histogram histogram_from_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Serialize with a stable layout (sorted keys, fixed indentation) so
/// identical inputs produce byte-identical files.
std::string dump_json(const Json& j);

} // namespace polpair
