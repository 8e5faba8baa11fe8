#include "polpair/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polpair {

namespace {

Port port_from_string(const std::string& s) {
  if (s == "H") return Port::H;
  if (s == "V") return Port::V;
  throw std::invalid_argument("port must be \"H\" or \"V\", got \"" + s + "\"");
}

std::string port_to_string(Port p) { return p == Port::V ? "V" : "H"; }

template <int N>
Json complex_matrix_to_json(const Eigen::Matrix<Complex, N, N>& m) {
  Json re = Json::array(), im = Json::array();
  for (int i = 0; i < N; ++i) {
    Json rrow = Json::array(), irow = Json::array();
    for (int j = 0; j < N; ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(rrow);
    im.push_back(irow);
  }
  return Json{{"re", re}, {"im", im}};
}

template <int N>
Eigen::Matrix<Complex, N, N> complex_matrix_from_json(const Json& j) {
  Eigen::Matrix<Complex, N, N> m;
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != N || im.size() != N)
    throw std::invalid_argument("matrix JSON has wrong dimensions");
  for (int i = 0; i < N; ++i) {
    if (re[i].size() != N || im[i].size() != N)
      throw std::invalid_argument("matrix JSON has wrong dimensions");
    for (int k = 0; k < N; ++k)
      m(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
  }
  return m;
}

} // namespace

Json to_json(const AnalyzerSetting& s) {
  return Json{{"qwp_deg", rad_to_deg(s.qwp_angle)},
              {"hwp_deg", rad_to_deg(s.hwp_angle)},
              {"port", port_to_string(s.port)}};
}

AnalyzerSetting analyzer_setting_from_json(const Json& j) {
  return AnalyzerSetting::from_degrees(j.at("qwp_deg").get<double>(),
                                       j.at("hwp_deg").get<double>(),
                                       port_from_string(j.at("port").get<std::string>()));
}

Json to_json(const JointSetting& s) {
  return Json{{"alice", to_json(s.alice)}, {"bob", to_json(s.bob)}};
}

JointSetting joint_setting_from_json(const Json& j) {
  return JointSetting{analyzer_setting_from_json(j.at("alice")),
                      analyzer_setting_from_json(j.at("bob"))};
}

Json to_json(const DensityMatrix& rho) {
  Json j = complex_matrix_to_json<4>(rho.matrix());
  j["basis"] = Json::array({"HH", "HV", "VH", "VV"});
  return j;
}

DensityMatrix density_matrix_from_json(const Json& j) {
  if (j.contains("basis")) {
    const Json expected = Json::array({"HH", "HV", "VH", "VV"});
    if (j.at("basis") != expected)
      throw std::invalid_argument("density matrix JSON uses an unexpected basis ordering");
  }
  return DensityMatrix(complex_matrix_from_json<4>(j));
}

Json to_json(const JonesMatrix& m) { return complex_matrix_to_json<2>(m.matrix()); }

JonesMatrix jones_from_json(const Json& j) {
  return JonesMatrix(complex_matrix_from_json<2>(j));
}

Json to_json(const MeasurementRecord& r) {
  return Json{{"setting", to_json(r.setting)},
              {"n_raw", r.n_raw},
              {"n_net", r.n_net},
              {"tau_acc", r.tau_acc},
              {"duration", r.duration},
              {"singles_A", r.singles_A},
              {"low_signal", r.low_signal},
              {"window_s", r.window_s},
              {"noise_span_s", r.noise_span_s},
              {"label", r.label}};
}

MeasurementRecord record_from_json(const Json& j) {
  MeasurementRecord r;
  r.setting = joint_setting_from_json(j.at("setting"));
  r.n_raw = j.at("n_raw").get<double>();
  r.n_net = j.at("n_net").get<double>();
  r.tau_acc = j.at("tau_acc").get<double>();
  r.duration = j.at("duration").get<double>();
  r.singles_A = j.at("singles_A").get<std::int64_t>();
  r.low_signal = j.value("low_signal", false);
  r.window_s = j.value("window_s", 0.0);
  r.noise_span_s = j.value("noise_span_s", 0.0);
  r.label = j.value("label", std::string());
  return r;
}

Json to_json(const std::vector<MeasurementRecord>& records) {
  Json arr = Json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  return arr;
}

std::vector<MeasurementRecord> records_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("campaign JSON must be an array of records");
  std::vector<MeasurementRecord> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(record_from_json(item));
  return out;
}

Json to_json(const ExperimentModel& m) {
  return Json{{"chip_state", to_json(m.chip_state)},
              {"fiber_A", to_json(m.fiber_A)},
              {"fiber_B", to_json(m.fiber_B)},
              {"pair_rate_hz", m.pair_rate},
              {"accidental_rate", m.accidental_rate},
              {"dark_rate_hz", m.dark_rate_per_detector},
              {"singles_rate_scale_hz", m.singles_rate_scale},
              {"bin_width_s", m.bin_width},
              {"t_i_s", m.t_i},
              {"t_f_s", m.t_f},
              {"t_max_s", m.t_max},
              {"seed", m.seed},
              {"alice_v_only", m.alice_v_only},
              {"reference_setting", to_json(m.reference_setting)}};
}

ExperimentModel model_from_json(const Json& j) {
  ExperimentModel m;
  m.chip_state = density_matrix_from_json(j.at("chip_state"));
  if (j.contains("fiber_A")) m.fiber_A = jones_from_json(j.at("fiber_A"));
  if (j.contains("fiber_B")) m.fiber_B = jones_from_json(j.at("fiber_B"));
  m.pair_rate = j.at("pair_rate_hz").get<double>();
  m.accidental_rate = j.value("accidental_rate", 0.0);
  m.dark_rate_per_detector = j.value("dark_rate_hz", 0.0);
  m.singles_rate_scale = j.value("singles_rate_scale_hz", 0.0);
  m.bin_width = j.at("bin_width_s").get<double>();
  m.t_i = j.at("t_i_s").get<double>();
  m.t_f = j.at("t_f_s").get<double>();
  m.t_max = j.at("t_max_s").get<double>();
  m.seed = j.value("seed", std::uint64_t{0});
  m.alice_v_only = j.value("alice_v_only", false);
  if (j.contains("reference_setting"))
    m.reference_setting = joint_setting_from_json(j.at("reference_setting"));
  m.validate();
  return m;
}

std::string histogram_to_csv(const Histogram& h) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "# %.17g,%.17g,%.17g,%.17g,%.17g,%lld,", h.bin_width, h.t_i,
                h.t_f, h.t_max, h.duration, static_cast<long long>(h.singles_A));
  out += buf;
  out += h.label;
  out += '\n';
  for (const auto c : h.counts) {
    std::snprintf(buf, sizeof(buf), "%lld\n", static_cast<long long>(c));
    out += buf;
  }
  return out;
}

Histogram histogram_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw std::invalid_argument("histogram CSV: missing header line");
  Histogram h;
  const std::string header = line.substr(2);
  // First six comma-separated fields are numeric; the remainder is the label
  // (which may itself contain separators other than comma).
  std::size_t pos = 0;
  double fields[5];
  long long singles = 0;
  for (int f = 0; f < 6; ++f) {
    const std::size_t comma = header.find(',', pos);
    if (comma == std::string::npos)
      throw std::invalid_argument("histogram CSV: malformed header");
    const std::string tok = header.substr(pos, comma - pos);
    try {
      if (f < 5)
        fields[f] = std::stod(tok);
      else
        singles = std::stoll(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument("histogram CSV: bad header field '" + tok + "'");
    }
    pos = comma + 1;
  }
  h.bin_width = fields[0];
  h.t_i = fields[1];
  h.t_f = fields[2];
  h.t_max = fields[3];
  h.duration = fields[4];
  h.singles_A = singles;
  h.label = header.substr(pos);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      h.counts.push_back(std::stoll(line));
    } catch (const std::exception&) {
      throw std::invalid_argument("histogram CSV: bad count at line " +
                                  std::to_string(line_no));
    }
  }
  h.validate();
  return h;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

} // namespace polpair
