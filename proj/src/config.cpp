#include "jrc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "jrc/csv.hpp"
#include "jrc/errors.hpp"

namespace jrc {

namespace {

// One field list drives both parsing and serialization.
template <class Visitor>
void visit_fields(ExperimentConfig& c, Visitor& v) {
  v.field("scenario", c.scenario);
  v.field("seed", c.seed);
  v.field("output_dir", c.output_dir);
  v.section("layout", [&] {
    v.field("num_aps", c.layout.num_aps);
    v.field("num_ues", c.layout.num_ues);
    v.field("area_side_m", c.layout.area_side_m);
  });
  v.section("channel", [&] {
    v.field("upsilon_db", c.channel.upsilon_db);
    v.field("alpha", c.channel.alpha);
    v.field("d_ref_m", c.channel.d_ref_m);
    v.field("sigma_db", c.channel.sigma_db);
    v.field("antennas", c.channel.antennas);
    v.field("correlation", c.channel.correlation);
    v.field("angular_std_deg", c.channel.angular_std_deg);
    v.field("bandwidth_hz", c.channel.bandwidth_hz);
    v.field("noise_figure_db", c.channel.noise_figure_db);
  });
  v.section("estimation", [&] {
    v.field("tau_p", c.estimation.tau_p);
    v.field("pilot_power_w", c.estimation.pilot_power_w);
  });
  v.section("comms", [&] {
    v.field("n_mc", c.comms.n_mc);
    v.field("combiner", c.comms.combiner);
    v.field("weights", c.comms.weights);
    v.field("equal_ap_power", c.comms.equal_ap_power);
    v.field("tau_c", c.comms.tau_c);
    v.field("topologies", c.comms.topologies);
    v.field("ap_counts", c.comms.ap_counts);
  });
  v.section("association", [&] {
    v.field("tolerance_m", c.association.tolerance_m);
    v.field("clutter_intensity", c.association.clutter_intensity);
    v.field("capture_radius_m", c.association.capture_radius_m);
    v.field("position_noise_m", c.association.position_noise_m);
    v.field("aoa_noise_deg", c.association.aoa_noise_deg);
  });
  v.section("coverage", [&] {
    v.field("gamma", c.coverage.gamma);
    v.field("q", c.coverage.q);
    v.field("z", c.coverage.z);
    v.field("noise_w", c.coverage.noise_w);
    v.field("upsilon_t_avg", c.coverage.upsilon_t_avg);
    v.field("upsilon_c_avg", c.coverage.upsilon_c_avg);
    v.field("rho", c.coverage.rho);
    v.field("delta_r_m", c.coverage.delta_r_m);
    v.field("alpha_prime", c.coverage.alpha_prime);
    v.field("integrand", c.coverage.integrand);
    v.field("trials", c.coverage.trials);
    v.field("ranges_m", c.coverage.ranges_m);
    v.field("rhos", c.coverage.rhos);
    v.field("upsilon_c_values", c.coverage.upsilon_c_values);
    v.field("snr_db", c.coverage.snr_db);
    v.field("snr_sweep_range_m", c.coverage.snr_sweep_range_m);
  });
  v.section("aoa", [&] {
    v.field("noise_std_deg", c.aoa.noise_std_deg);
    v.field("trials", c.aoa.trials);
    v.field("measurements", c.aoa.measurements);
    v.field("aps_per_ue", c.aoa.aps_per_ue);
    v.field("method", c.aoa.method);
  });
  v.section("detector", [&] {
    v.field("target_pfa", c.detector.target_pfa);
    v.field("calibration_trials", c.detector.calibration_trials);
    v.field("trials", c.detector.trials);
    v.field("antennas", c.detector.antennas);
    v.field("num_aps", c.detector.num_aps);
    v.field("cnr_db", c.detector.cnr_db);
    v.field("scnr_db", c.detector.scnr_db);
    v.field("snr_db", c.detector.snr_db);
    v.field("pointing_errors_deg", c.detector.pointing_errors_deg);
    v.field("ue_range_m", c.detector.ue_range_m);
    v.field("scatterer_range_m", c.detector.scatterer_range_m);
    v.field("scatterer_excess_db", c.detector.scatterer_excess_db);
  });
}

class Parser {
 public:
  explicit Parser(YAML::Node root) : node_(std::move(root)) {}

  template <class F>
  void section(const std::string& name, F&& body) {
    known_.insert(name);
    const YAML::Node saved = node_;
    const std::string saved_prefix = prefix_;
    auto saved_known = std::move(known_);
    known_.clear();
    YAML::Node sub = saved[name];
    if (sub && !sub.IsMap()) {
      problems_.push_back(name + ": expected a mapping");
    } else {
      // Node assignment writes through; reset() rebinds.
      node_.reset(sub ? sub : YAML::Node(YAML::NodeType::Map));
      prefix_ = name + ".";
      body();
      check_unknown();
    }
    node_.reset(saved);
    prefix_ = saved_prefix;
    known_ = std::move(saved_known);
  }

  template <class T>
  void field(const std::string& name, T& value) {
    known_.insert(name);
    const YAML::Node n = node_[name];
    if (!n) {
      if (prefix_.empty() && name == "seed") problems_.push_back("seed: required (no wall-clock default)");
      return;
    }
    read(prefix_ + name, n, value);
  }

  void check_unknown() {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!known_.count(key)) problems_.push_back(prefix_ + key + ": unknown field");
    }
  }

  std::vector<std::string> problems_;

 private:
  void read(const std::string& path, const YAML::Node& n, std::string& out) {
    if (!n.IsScalar()) {
      problems_.push_back(path + ": expected a string");
      return;
    }
    out = n.Scalar();
  }
  void read(const std::string& path, const YAML::Node& n, bool& out) {
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, out)) problems_.push_back(path + ": expected true or false");
  }
  void read(const std::string& path, const YAML::Node& n, double& out) {
    try {
      if (!n.IsScalar()) throw std::invalid_argument("not scalar");
      out = csv::parse_double(n.Scalar());
      if (!std::isfinite(out)) throw std::invalid_argument("not finite");
    } catch (const std::exception&) {
      problems_.push_back(path + ": expected a finite number, got '" + (n.IsScalar() ? n.Scalar() : "?") + "'");
    }
  }
  template <class U>
    requires std::is_unsigned_v<U>
  void read(const std::string& path, const YAML::Node& n, U& out) {
    const std::string s = n.IsScalar() ? n.Scalar() : "";
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      problems_.push_back(path + ": expected a nonnegative integer, got '" + s + "'");
      return;
    }
    out = static_cast<U>(v);
  }
  template <class T>
  void read(const std::string& path, const YAML::Node& n, std::vector<T>& out) {
    if (!n.IsSequence()) {
      problems_.push_back(path + ": expected a list");
      return;
    }
    std::vector<T> values(n.size());
    const auto before = problems_.size();
    for (std::size_t i = 0; i < n.size(); ++i) read(path + "[" + std::to_string(i) + "]", n[i], values[i]);
    if (problems_.size() == before) out = std::move(values);
  }

  YAML::Node node_;
  std::string prefix_;
  std::set<std::string> known_;
};

class Emitter {
 public:
  Emitter() { out_ << YAML::BeginMap; }

  template <class F>
  void section(const std::string& name, F&& body) {
    out_ << YAML::Key << name << YAML::Value << YAML::BeginMap;
    body();
    out_ << YAML::EndMap;
  }

  template <class T>
  void field(const std::string& name, T& value) {
    out_ << YAML::Key << name << YAML::Value;
    write(value);
  }

  std::string finish() {
    out_ << YAML::EndMap;
    return std::string(out_.c_str()) + "\n";
  }

 private:
  void write(const std::string& s) { out_ << YAML::DoubleQuoted << s; }
  void write(bool b) { out_ << (b ? "true" : "false"); }
  void write(double d) { out_ << csv::format_double(d); }
  template <class U>
    requires std::is_unsigned_v<U>
  void write(U u) {
    out_ << std::to_string(u);
  }
  template <class T>
  void write(const std::vector<T>& v) {
    out_ << YAML::Flow << YAML::BeginSeq;
    for (const auto& x : v) write(x);
    out_ << YAML::EndSeq;
  }

  YAML::Emitter out_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text, std::optional<std::uint64_t> seed) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  if (seed) root["seed"] = *seed;
  ExperimentConfig cfg;
  Parser parser(root);
  visit_fields(cfg, parser);
  parser.check_unknown();
  auto problems = std::move(parser.problems_);
  if (problems.empty()) {
    auto domain = validate_config(cfg);
    problems.insert(problems.end(), domain.begin(), domain.end());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), seed);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  Emitter emitter;
  visit_fields(copy, emitter);
  return emitter.finish();
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> p;
  const auto need = [&](bool ok, const std::string& msg) {
    if (!ok) p.push_back(msg);
  };
  need(c.layout.num_aps >= 1, "layout.num_aps must be >= 1");
  need(c.layout.num_ues >= 1, "layout.num_ues must be >= 1");
  need(c.layout.area_side_m > 0.0, "layout.area_side_m must be > 0");
  need(c.channel.alpha > 0.0, "channel.alpha must be > 0");
  need(c.channel.d_ref_m > 0.0, "channel.d_ref_m must be > 0");
  need(c.channel.sigma_db >= 0.0, "channel.sigma_db must be >= 0");
  need(c.channel.antennas >= 1, "channel.antennas must be >= 1");
  need(c.channel.correlation == "uncorrelated" || c.channel.correlation == "local-scattering",
       "channel.correlation must be uncorrelated or local-scattering");
  need(c.channel.angular_std_deg > 0.0, "channel.angular_std_deg must be > 0");
  need(c.channel.bandwidth_hz > 0.0, "channel.bandwidth_hz must be > 0");
  need(c.estimation.tau_p >= 1, "estimation.tau_p must be >= 1");
  need(c.estimation.pilot_power_w > 0.0, "estimation.pilot_power_w must be > 0");
  need(c.estimation.tau_p < c.comms.tau_c, "comms.tau_c must exceed estimation.tau_p");
  need(c.comms.n_mc >= 1, "comms.n_mc must be >= 1");
  need(c.comms.combiner == "lp-mmse" || c.comms.combiner == "mr", "comms.combiner must be lp-mmse or mr");
  need(c.comms.weights == "equal" || c.comms.weights == "optimal", "comms.weights must be equal or optimal");
  need(c.comms.topologies >= 1, "comms.topologies must be >= 1");
  need(!c.comms.ap_counts.empty(), "comms.ap_counts must not be empty");
  for (auto l : c.comms.ap_counts) need(l >= 2, "comms.ap_counts entries must be >= 2");
  need(c.association.tolerance_m > 0.0, "association.tolerance_m must be > 0");
  need(c.association.clutter_intensity >= 0.0, "association.clutter_intensity must be >= 0");
  need(c.association.capture_radius_m > 0.0, "association.capture_radius_m must be > 0");
  need(c.association.position_noise_m >= 0.0, "association.position_noise_m must be >= 0");
  need(c.association.aoa_noise_deg >= 0.0, "association.aoa_noise_deg must be >= 0");
  need(c.coverage.gamma > 0.0, "coverage.gamma must be > 0");
  need(c.coverage.q > 0.0, "coverage.q must be > 0");
  need(c.coverage.z > 0.0, "coverage.z must be > 0");
  need(c.coverage.noise_w > 0.0, "coverage.noise_w must be > 0");
  need(c.coverage.upsilon_t_avg > 0.0, "coverage.upsilon_t_avg must be > 0");
  need(c.coverage.upsilon_c_avg > 0.0, "coverage.upsilon_c_avg must be > 0");
  need(c.coverage.rho >= 0.0, "coverage.rho must be >= 0");
  need(c.coverage.delta_r_m > 0.0, "coverage.delta_r_m must be > 0");
  need(c.coverage.alpha_prime >= 0.0, "coverage.alpha_prime must be >= 0");
  need(c.coverage.integrand == "polar-measure" || c.coverage.integrand == "no-polar-measure",
       "coverage.integrand must be polar-measure or no-polar-measure");
  need(c.coverage.trials >= 1, "coverage.trials must be >= 1");
  need(!c.coverage.ranges_m.empty(), "coverage.ranges_m must not be empty");
  for (double r : c.coverage.ranges_m) need(r > 0.0, "coverage.ranges_m entries must be > 0");
  for (double r : c.coverage.rhos) need(r >= 0.0, "coverage.rhos entries must be >= 0");
  for (double u : c.coverage.upsilon_c_values) need(u > 0.0, "coverage.upsilon_c_values entries must be > 0");
  need(c.coverage.snr_sweep_range_m > 0.0, "coverage.snr_sweep_range_m must be > 0");
  for (double s : c.aoa.noise_std_deg) need(s >= 0.0, "aoa.noise_std_deg entries must be >= 0");
  need(c.aoa.trials >= 1, "aoa.trials must be >= 1");
  need(c.aoa.measurements >= 1, "aoa.measurements must be >= 1");
  need(c.aoa.aps_per_ue >= 2, "aoa.aps_per_ue must be >= 2");
  need(c.aoa.aps_per_ue <= c.layout.num_aps, "aoa.aps_per_ue must not exceed layout.num_aps");
  need(c.aoa.method == "pairwise" || c.aoa.method == "bearing-lines", "aoa.method must be pairwise or bearing-lines");
  need(c.detector.target_pfa > 0.0 && c.detector.target_pfa < 1.0, "detector.target_pfa must lie in (0, 1)");
  need(c.detector.calibration_trials >= 1000, "detector.calibration_trials must be >= 1000");
  need(c.detector.trials >= 1, "detector.trials must be >= 1");
  need(c.detector.antennas >= 1, "detector.antennas must be >= 1");
  need(c.detector.num_aps >= 1, "detector.num_aps must be >= 1");
  need(c.detector.ue_range_m > 0.0, "detector.ue_range_m must be > 0");
  need(c.detector.scatterer_range_m > 0.0, "detector.scatterer_range_m must be > 0");
  return p;
}

void apply_full_scale(ExperimentConfig& cfg) {
  cfg.scenario = "full";
  cfg.layout.num_aps = 100;
  cfg.layout.num_ues = 50;
  cfg.channel.antennas = 4;
  cfg.estimation.tau_p = 10;
  cfg.comms.n_mc = 1000;
  cfg.comms.ap_counts = {25, 50, 75, 100};
}

}  // namespace jrc
