#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jrc/association.hpp"
#include "jrc/comms.hpp"
#include "jrc/config.hpp"
#include "jrc/coverage.hpp"

namespace jrc {

/// One rendered CSV table; the header carries the units.
struct Dataset {
  std::string name;  // file stem
  std::string csv;
};

struct ExperimentOutput {
  std::vector<Dataset> datasets;
  std::vector<std::string> summary;  // human-readable lines
};

/// Figure ids accepted by run_figure.
const std::vector<std::string>& figure_ids();

/// Reproduces one figure's data. Throws ConfigError for an unknown id.
ExperimentOutput run_figure(const ExperimentConfig& cfg, const std::string& id);

/// Subcommand drivers.
ExperimentOutput run_layout(const ExperimentConfig& cfg);
ExperimentOutput run_se(const ExperimentConfig& cfg);
ExperimentOutput run_associate(const ExperimentConfig& cfg);
ExperimentOutput run_pdc(const ExperimentConfig& cfg);
ExperimentOutput run_aoa(const ExperimentConfig& cfg);
ExperimentOutput run_detect(const ExperimentConfig& cfg);

enum class Scheme { Clustered, AllServeAll, NearestAp };
const char* scheme_name(Scheme s);

struct SchemeSummary {
  std::string scheme;
  std::size_t samples = 0;
  double mean = 0.0;
  double mean_ci_low = 0.0;
  double mean_ci_high = 0.0;
  double median = 0.0;
  double median_ci_low = 0.0;
  double median_ci_high = 0.0;
};

/// Per-UE SE for each scheme over comms.topologies random topologies, summarized
/// with 95% percentile-bootstrap intervals.
struct Comparison {
  std::vector<SchemeSummary> table;
  std::vector<std::vector<double>> per_topology_mean;  // [scheme][topology]
  ExperimentOutput output;
};

Comparison compare_schemes(const ExperimentConfig& cfg, const std::vector<Scheme>& schemes);

/// Everything derived from one topology seed.
struct Scenario {
  NetworkLayout layout;
  ChannelSet channels;
  PilotAssignment pilots;
  EstimationSet estimators;
  double sigma2 = 0.0;
};

Scenario build_scenario(const ExperimentConfig& cfg, std::uint64_t seed);

/// Association for a scheme; the clustered scheme applies the initial phase then the
/// sensing-aware refinement against a whole-map clutter draw.
/// Refinement failures fall back to the initial phase and are noted in `notes`.
AssociationMatrix associate(const ExperimentConfig& cfg, const Scenario& sc, Scheme scheme, std::uint64_t seed,
                            std::vector<std::string>* notes = nullptr);

std::vector<double> scheme_se(const ExperimentConfig& cfg, const Scenario& sc, const AssociationMatrix& s,
                              std::uint64_t seed);

CoverageParams coverage_params(const ExperimentConfig& cfg);

/// Writes every dataset as <dir>/<name>.csv.
void write_datasets(const ExperimentOutput& out, const std::filesystem::path& dir);

}  // namespace jrc
