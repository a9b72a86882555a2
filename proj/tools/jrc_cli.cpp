// Command-line front end for the simulation experiments.
#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "jrc/config.hpp"
#include "jrc/errors.hpp"
#include "jrc/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool full_scale = false;
  std::string figure;
  std::string schemes = "clustered,all-serve-all,nearest-ap";
};

jrc::ExperimentConfig resolve_config(const Options& opt) {
  jrc::ExperimentConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = jrc::load_config(opt.config_path, opt.seed);
  } else {
    if (!opt.seed) throw jrc::ConfigError("seed: required (pass --seed or set it in --config)");
    cfg = jrc::parse_config("{}", opt.seed);
  }
  if (opt.full_scale) {
    jrc::apply_full_scale(cfg);
    auto problems = jrc::validate_config(cfg);
    if (!problems.empty()) throw jrc::ConfigError(std::move(problems));
  }
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  return cfg;
}

std::vector<jrc::Scheme> parse_schemes(const std::string& list) {
  std::vector<jrc::Scheme> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto end = std::min(list.find(',', start), list.size());
    const auto name = list.substr(start, end - start);
    bool found = false;
    for (auto s : {jrc::Scheme::Clustered, jrc::Scheme::AllServeAll, jrc::Scheme::NearestAp}) {
      if (name == jrc::scheme_name(s)) {
        out.push_back(s);
        found = true;
      }
    }
    if (!found) throw jrc::ConfigError("--schemes: unknown scheme '" + name + "'");
    start = end + 1;
  }
  return out;
}

jrc::ExperimentOutput dispatch(const std::string& cmd, const Options& opt, const jrc::ExperimentConfig& cfg) {
  if (cmd == "layout") return jrc::run_layout(cfg);
  if (cmd == "se") return jrc::run_se(cfg);
  if (cmd == "associate") return jrc::run_associate(cfg);
  if (cmd == "pdc") return jrc::run_pdc(cfg);
  if (cmd == "aoa") return jrc::run_aoa(cfg);
  if (cmd == "detect") return jrc::run_detect(cfg);
  if (cmd == "figure") return jrc::run_figure(cfg, opt.figure);
  return jrc::compare_schemes(cfg, parse_schemes(opt.schemes)).output;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free joint radar-communication simulator"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config_path, "YAML experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", opt.seed, "master seed (overrides the config)");
  app.add_option("--out", opt.out_dir, "output directory for CSV files");
  app.add_flag("--full-scale", opt.full_scale, "use the full evaluation scale instead of desk scale");
  app.fallthrough();

  app.add_subcommand("layout", "AP/UE/scatterer positions");
  app.add_subcommand("se", "uplink spectral efficiency per UE");
  app.add_subcommand("associate", "initial and sensing-refined association");
  app.add_subcommand("pdc", "detection coverage probability, closed form and Monte Carlo");
  app.add_subcommand("aoa", "AOA intersection RMSE versus angle noise");
  app.add_subcommand("detect", "detector ROC points versus SCNR");
  auto* fig = app.add_subcommand("figure", "data for one figure");
  std::string ids;
  for (const auto& id : jrc::figure_ids()) ids += (ids.empty() ? "" : "|") + id;
  fig->add_option("id", opt.figure, ids)->required()->check(CLI::IsMember(jrc::figure_ids()));
  auto* cmp = app.add_subcommand("compare", "SE summary per association scheme");
  cmp->add_option("--schemes", opt.schemes, "comma-separated: clustered,all-serve-all,nearest-ap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const auto cfg = resolve_config(opt);
    const auto out = dispatch(cmd, opt, cfg);
    jrc::write_datasets(out, cfg.output_dir);
    for (const auto& d : out.datasets) std::cout << "wrote " << (std::filesystem::path(cfg.output_dir) / (d.name + ".csv")).string() << "\n";
    for (const auto& line : out.summary) std::cout << line << "\n";
  } catch (const jrc::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kExitConfig;
  } catch (const jrc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const jrc::DegenerateGeometryError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const jrc::InfeasibleError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const jrc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
