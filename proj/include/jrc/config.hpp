#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace jrc {

struct LayoutSection {
  std::size_t num_aps = 25;
  std::size_t num_ues = 10;
  double area_side_m = 500.0;
  bool operator==(const LayoutSection&) const = default;
};

struct ChannelSection {
  double upsilon_db = -148.1;
  double alpha = 3.76;
  double d_ref_m = 1000.0;
  double sigma_db = 10.0;
  std::size_t antennas = 2;
  std::string correlation = "uncorrelated";  // uncorrelated | local-scattering
  double angular_std_deg = 15.0;
  double bandwidth_hz = 20e6;
  double noise_figure_db = 7.0;
  bool operator==(const ChannelSection&) const = default;
};

struct EstimationSection {
  std::size_t tau_p = 2;
  double pilot_power_w = 0.1;
  bool operator==(const EstimationSection&) const = default;
};

struct CommsSection {
  std::size_t n_mc = 500;
  std::string combiner = "lp-mmse";  // lp-mmse | mr
  std::string weights = "equal";     // equal | optimal
  bool equal_ap_power = true;
  std::size_t tau_c = 200;
  std::size_t topologies = 50;
  std::vector<std::size_t> ap_counts{10, 15, 20, 25, 30};
  bool operator==(const CommsSection&) const = default;
};

struct AssociationSection {
  double tolerance_m = 7.5;
  double clutter_intensity = 2e-4;  // scatterers per m^2 over the whole map
  double capture_radius_m = 1.0;
  double position_noise_m = 1.0;    // std of the coarse UE position
  double aoa_noise_deg = 0.5;
  bool operator==(const AssociationSection&) const = default;
};

struct CoverageSection {
  double gamma = 10.0;
  double q = 2.0;
  double z = 1e-6;
  double noise_w = 1e-12;
  double upsilon_t_avg = 1.0;
  double upsilon_c_avg = 0.01;
  double rho = 0.01;
  double delta_r_m = 7.5;
  double alpha_prime = 0.01;
  std::string integrand = "polar-measure";  // polar-measure | no-polar-measure
  std::size_t trials = 20000;
  std::vector<double> ranges_m{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  std::vector<double> rhos{0.0, 0.01, 0.05, 0.1};
  std::vector<double> upsilon_c_values{0.005, 0.01, 0.05, 0.1};
  std::vector<double> snr_db{-10, -5, 0, 5, 10, 15, 20, 25, 30};
  double snr_sweep_range_m = 20.0;
  bool operator==(const CoverageSection&) const = default;
};

struct AoaSection {
  std::vector<double> noise_std_deg{0, 1, 2, 4, 8};
  std::size_t trials = 500;
  std::size_t measurements = 10;
  std::size_t aps_per_ue = 3;
  std::string method = "pairwise";  // pairwise | bearing-lines
  bool operator==(const AoaSection&) const = default;
};

struct DetectorSection {
  double target_pfa = 0.1;
  std::size_t calibration_trials = 20000;
  std::size_t trials = 20000;
  std::size_t antennas = 4;
  std::size_t num_aps = 4;
  double cnr_db = 0.0;
  std::vector<double> scnr_db{-10, -5, 0, 5, 10, 15, 20};
  std::vector<double> snr_db{-10, -5, 0, 5, 10, 15, 20, 25, 30};
  std::vector<double> pointing_errors_deg{0, 4, 8, 12};
  double ue_range_m = 15.0;
  double scatterer_range_m = 45.0;
  double scatterer_excess_db = 20.0;
  bool operator==(const DetectorSection&) const = default;
};

struct ExperimentConfig {
  std::string scenario = "desk";
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  LayoutSection layout;
  ChannelSection channel;
  EstimationSection estimation;
  CommsSection comms;
  AssociationSection association;
  CoverageSection coverage;
  AoaSection aoa;
  DetectorSection detector;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses YAML text. The top-level `seed` is mandatory unless `seed` overrides it;
/// every other field defaults. Throws ConfigError naming every bad or unknown field.
ExperimentConfig parse_config(const std::string& yaml_text, std::optional<std::uint64_t> seed = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed = std::nullopt);

/// Full YAML form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Domain problems of a parsed config (empty when valid).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// Full evaluation scale: L=100, K=50, N=4, tau_p=10, n_mc=1000.
void apply_full_scale(ExperimentConfig& cfg);

}  // namespace jrc
