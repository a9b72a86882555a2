// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jrc/aoa.hpp"
#include "jrc/association.hpp"
#include "jrc/channel.hpp"
#include "jrc/config.hpp"
#include "jrc/coverage.hpp"
#include "jrc/detector.hpp"
#include "jrc/errors.hpp"
#include "jrc/estimation.hpp"
#include "jrc/experiment.hpp"
#include "jrc/rng.hpp"

using namespace jrc;

namespace {

constexpr double kDeg = kPi / 180.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream o;
  o.precision(precision);
  o << v;
  return o.str();
}

// Column-name keyed rows of a rendered CSV.
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::istringstream r(line);
    std::string cell;
    std::map<std::string, std::string> row;
    for (const auto& name : header) {
      std::getline(r, cell, ',');
      row[name] = cell;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

const Dataset& dataset(const ExperimentOutput& out, const std::string& name) {
  for (const auto& d : out.datasets) {
    if (d.name == name) return d;
  }
  throw ContractViolation("missing dataset " + name);
}

CMat random_psd(std::size_t n, Rng& rng) {
  CMat a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.cn01();
  return a * a.adjoint() / static_cast<double>(n);
}

ExperimentConfig desk_config() {
  ExperimentConfig c;
  c.seed = 2024;
  return c;
}

Outcome coverage_oracles() {
  Outcome o;
  Timer t;
  const std::vector<double> ranges{5, 10, 20, 30, 50};
  const std::vector<double> rhos{0, 0.01, 0.02, 0.05, 0.1};
  const auto base = coverage_params(desk_config());
  int points = 0;
  int bad = 0;
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (double r : ranges) {
    for (double rho : rhos) {
      for (double alpha : {-1.0, 0.0, 0.01}) {
        CoverageParams p = base;
        p.rho = rho;
        p.alpha_prime = std::max(alpha, 0.0);
        const bool los = alpha < 0.0;
        const double closed = los ? pdc_los(r, p) : pdc_nlos(r, p);
        const auto mc = pdc_monte_carlo(r, p, los ? PathMode::LoS : PathMode::NLoS, 100000, seed++);
        const double gap = std::abs(closed - mc.p);
        worst = std::max(worst, gap);
        ++points;
        if (gap > 0.01 + 3.0 * mc.stderr_) {
          ++bad;
          o.detail += " miss(R=" + fmt(r) + ",rho=" + fmt(rho) + (los ? ",LoS" : ",a'=" + fmt(alpha)) + ")";
        }
      }
    }
  }
  const double secs = t.seconds();
  o.pass = bad == 0 && secs < 120.0;
  o.detail = std::to_string(points - bad) + "/" + std::to_string(points) + " points within 0.01+3se, worst gap " +
             fmt(worst) + ", " + fmt(secs, 3) + " s" + o.detail;
  return o;
}

Outcome clutter_free() {
  Outcome o;
  CoverageParams p = coverage_params(desk_config());
  p.rho = 0.0;
  // alpha' is proportional to the clutter density, so it vanishes with it.
  p.alpha_prime = effective_attenuation(1.0, p.rho, 1.0);
  const ClutterField none;
  double worst_scnr = 0.0;
  double worst_pdc = 0.0;
  for (double r : {5.0, 10.0, 20.0, 30.0, 50.0}) {
    for (double ut : {0.3, 1.0, 2.5}) {
      const double snr = (p.z * ut / std::pow(r, 2.0 * p.q)) / p.noise;  // received power over noise
      worst_scnr = std::max(worst_scnr, std::abs(scnr_realization(r, ut, none, p) - snr) / snr);
    }
    const double expected = std::exp(-p.gamma * p.noise * std::pow(r, 2.0 * p.q) / (p.z * p.upsilon_t_avg));
    worst_pdc = std::max({worst_pdc, std::abs(pdc_los(r, p) - expected), std::abs(pdc_nlos(r, p) - expected)});
  }
  o.pass = worst_scnr == 0.0 && worst_pdc <= 1e-12;
  o.detail = "max relative SCNR-SNR gap " + fmt(worst_scnr) + ", max P_dc gap " + fmt(worst_pdc);
  return o;
}

Outcome estimation_identities() {
  Outcome o;
  Rng rng(31);
  double worst_sum = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_index(4));
    const CMat r = random_psd(n, rng);
    const std::vector<CMat> rs{r, random_psd(n, rng), random_psd(n, rng)};
    const std::vector<double> powers{0.1, rng.uniform(0.01, 0.1), rng.uniform(0.01, 0.1)};
    const auto s = estimator_statistics(r, pilot_correlation(rs, powers, 4, rng.uniform(1e-3, 1.0)), 4, 0.1);
    worst_sum = std::max(worst_sum, (s.b + s.c - r).norm());
  }
  double worst_recovery = 0.0;
  {
    const CMat r = random_psd(3, rng) + 0.1 * CMat::Identity(3, 3);
    const std::vector<CMat> rs{r};
    const std::vector<double> powers{0.1};
    const CMat phi = pilot_correlation(rs, powers, 4, 0.0);
    for (int i = 0; i < 20; ++i) {
      const CVec h = sample_channel(r, rng);
      const std::vector<CVec> hs{h};
      const auto est = mmse_estimate(pilot_observation(hs, powers, 4, 0.0, rng), r, phi, 4, 0.1);
      worst_recovery = std::max(worst_recovery, (est.h_hat - h).norm() / h.norm());
    }
  }
  double cov_gap = 0.0;
  {
    const CMat r1 = random_psd(2, rng) + 0.2 * CMat::Identity(2, 2);
    const CMat r2 = random_psd(2, rng);
    const std::vector<CMat> rs{r1, r2};
    const std::vector<double> powers{0.1, 0.1};
    const auto stats = estimator_statistics(r1, pilot_correlation(rs, powers, 2, 0.02), 2, 0.1);
    const CMat f1 = covariance_factor(r1);
    const CMat f2 = covariance_factor(r2);
    CMat cov = CMat::Zero(2, 2);
    constexpr int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i) {
      const std::vector<CVec> hs{sample_with_factor(f1, rng), sample_with_factor(f2, rng)};
      const CVec h_hat = stats.gain * pilot_observation(hs, powers, 2, 0.02, rng);
      cov += h_hat * h_hat.adjoint();
    }
    cov_gap = (cov / kDraws - stats.b).norm();
  }
  o.pass = worst_sum <= 1e-10 && worst_recovery <= 1e-10 && cov_gap <= 0.02;
  o.detail = "max |B+C-R| " + fmt(worst_sum) + ", noiseless recovery error " + fmt(worst_recovery) +
             ", |cov - B| over 1e5 draws " + fmt(cov_gap);
  return o;
}

Outcome association_constraints() {
  Outcome o;
  Rng rng(41);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t tau_p = 1 + rng.uniform_index(4);
    const std::size_t l = 2 + rng.uniform_index(20);
    const std::size_t k_max = l * tau_p / 2;
    const std::size_t k = 1 + rng.uniform_index(std::max<std::size_t>(k_max, 1));
    RMat beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    for (Eigen::Index j = 0; j < beta.size(); ++j) beta.data()[j] = std::pow(10.0, rng.uniform(-14.0, -9.0));
    if (!constraint_violations(initial_association(beta, tau_p), tau_p).empty()) ++violations;
  }
  // Exhaustive versus heuristic on every small shape, with the Monte Carlo sum-SE
  // on common random numbers so each candidate is evaluated deterministically.
  ExperimentConfig cfg = desk_config();
  cfg.estimation.tau_p = 2;
  cfg.comms.n_mc = 40;
  cfg.layout.area_side_m = 200.0;
  int instances = 0;
  int negative = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  std::uint64_t seed = 0;
  for (std::size_t l = 2; l <= 4; ++l) {
    for (std::size_t k = 1; k <= 3 && k <= l; ++k) {
      for (int rep = 0; rep < 2; ++rep) {
        cfg.layout.num_aps = l;
        cfg.layout.num_ues = k;
        const auto sc = build_scenario(cfg, ++seed);
        const auto se = [&](const AssociationMatrix& s) {
          const auto v = scheme_se(cfg, sc, s, 77);
          double total = 0.0;
          for (double x : v) total += x;
          return total;
        };
        const auto best = exhaustive_p1(sc.channels.beta, 2, se);
        const double gap = best.best_sum_se - se(initial_association(sc.channels.beta, 2));
        min_gap = std::min(min_gap, gap);
        max_gap = std::max(max_gap, gap);
        if (gap < 0.0) ++negative;
        ++instances;
      }
    }
  }
  o.pass = violations == 0 && negative == 0;
  o.detail = "constraint violations " + std::to_string(violations) + "/100; exhaustive minus heuristic sum-SE over " +
             std::to_string(instances) + " instances in [" + fmt(min_gap) + ", " + fmt(max_gap) + "] bit/s/Hz";
  return o;
}

Outcome scalability() {
  Outcome o;
  Timer t;
  ExperimentConfig cfg = desk_config();
  cfg.layout.num_aps = 25;
  cfg.layout.num_ues = 10;
  cfg.channel.antennas = 2;
  cfg.comms.topologies = 200;
  cfg.comms.n_mc = 500;
  const auto cmp = compare_schemes(cfg, {Scheme::Clustered, Scheme::AllServeAll});
  const auto& c = cmp.table[0];
  const auto& a = cmp.table[1];
  o.pass = c.mean > a.mean;
  o.detail = "clustered mean " + fmt(c.mean) + " [" + fmt(c.mean_ci_low) + ", " + fmt(c.mean_ci_high) +
             "] vs all-serve-all " + fmt(a.mean) + " [" + fmt(a.mean_ci_low) + ", " + fmt(a.mean_ci_high) +
             "] bit/s/Hz, ratio " + fmt(c.mean / a.mean, 3) + " (reported, not asserted), " + fmt(t.seconds(), 3) +
             " s";
  return o;
}

Outcome aoa_geometry() {
  Outcome o;
  Rng rng(61);
  double worst_recovery = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<Point2> aps(2 + rng.uniform_index(4));
    for (auto& p : aps) p = Point2(rng.uniform(0, 500), rng.uniform(0, 500));
    const Point2 ue(rng.uniform(0, 500), rng.uniform(0, 500));
    std::vector<AoaReport> reports;
    for (std::size_t j = 0; j < aps.size(); ++j) reports.push_back({j, bearing(aps[j], ue), std::nullopt});
    try {
      worst_recovery = std::max(worst_recovery, (intersect_aoa(aps, reports).point - ue).norm());
    } catch (const DegenerateGeometryError&) {
    }
  }
  const double symmetric = (baseline_intersection(45 * kDeg, 45 * kDeg, 100.0) - Point2(50, 50)).norm();
  double worst_area = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a1 = rng.uniform(0.2, 1.3);
    const double a2 = rng.uniform(0.2, 1.3);
    const double len = rng.uniform(20, 300);
    const double h = 1e-6;
    Eigen::Matrix2d fd;
    fd.col(0) = (baseline_intersection(a1 + h, a2, len) - baseline_intersection(a1 - h, a2, len)) / (2 * h);
    fd.col(1) = (baseline_intersection(a1, a2 + h, len) - baseline_intersection(a1, a2 - h, len)) / (2 * h);
    const double area = intersection_error_area(a1, a2, 1.0, 1.0, len);
    worst_area = std::max(worst_area, std::abs(area - std::abs(fd.determinant())) / area);
  }
  ExperimentConfig cfg = desk_config();
  cfg.aoa.trials = 500;
  const auto rows = parse_csv(run_figure(cfg, "5e").datasets[0].csv);
  std::map<double, double> mean;
  for (const auto& r : rows) mean[std::stod(r.at("noise_std_deg"))] += std::stod(r.at("rmse_m")) / 500.0;
  bool monotone = true;
  std::string curve;
  double prev = -1.0;
  for (const auto& [deg, e] : mean) {
    monotone = monotone && e >= prev;
    prev = e;
    curve += " " + fmt(deg) + "deg:" + fmt(e) + "m";
  }
  o.pass = worst_recovery <= 1e-9 && symmetric <= 1e-12 && worst_area <= 1e-6 && monotone;
  o.detail = "noiseless error " + fmt(worst_recovery) + " m, symmetric error " + fmt(symmetric) +
             ", Jacobian area rel. error " + fmt(worst_area) + ", RMSE" + curve;
  return o;
}

Outcome detector_calibration() {
  Outcome o;
  ExperimentConfig cfg = desk_config();
  cfg.detector.trials = 100000;
  const auto rows = parse_csv(dataset(run_detect(cfg), "detect_roc").csv);
  double worst_pfa = 0.0;
  bool monotone = true;
  double prev_pd = -1.0;
  std::string curve;
  for (const auto& r : rows) {
    const double pfa = std::stod(r.at("pfa"));
    const double pd = std::stod(r.at("pd"));
    worst_pfa = std::max(worst_pfa, std::abs(pfa - cfg.detector.target_pfa));
    monotone = monotone && pd >= prev_pd;
    prev_pd = pd;
    curve += " " + r.at("scnr_db") + "dB:" + fmt(pd, 3);
  }
  // |theta_k|^2 of each AP on its own, under H0.
  std::vector<EchoModel> models;
  Rng geo(5);
  for (std::size_t k = 0; k < cfg.detector.num_aps; ++k) {
    EchoModel m;
    m.steering = array_response(geo.uniform(-1.0, 1.0), 0.0, cfg.detector.antennas);
    m.sigma2_target = 2.0;
    m.sigma2_clutter = 1.0;
    m.noise_cov = CMat::Identity(static_cast<Eigen::Index>(cfg.detector.antennas),
                                 static_cast<Eigen::Index>(cfg.detector.antennas));
    models.push_back(std::move(m));
  }
  bool ks_ok = true;
  double worst_ks = 0.0;
  double critical = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    std::vector<double> w(models.size(), 0.0);
    w[k] = 1.0;
    const auto s = sample_statistic(models, w, Hypothesis::H0, 100000, 100 + k);
    const double d = ks_distance_exp1(s);
    critical = ks_critical_1pct(s.size());
    worst_ks = std::max(worst_ks, d);
    ks_ok = ks_ok && d < critical;
  }
  o.pass = worst_pfa <= 0.02 && ks_ok && monotone;
  o.detail = "max |P_fa - 0.1| " + fmt(worst_pfa) + " on 1e5 fresh trials, max KS " + fmt(worst_ks) + " (crit " +
             fmt(critical) + "), P_d" + curve;
  return o;
}

Outcome range_bias() {
  Outcome o;
  RangeDemoConfig cfg;
  const auto with = range_estimate_bias_demo(cfg);
  cfg.with_scatterer = false;
  const auto without = range_estimate_bias_demo(cfg);
  const bool locks = std::abs(with.estimated_range_m - cfg.scatterer_range_m) <= cfg.delta_r_m;
  const bool restored = std::abs(without.estimated_range_m - cfg.ue_range_m) <= cfg.delta_r_m;
  o.pass = locks && restored;
  o.detail = "true range " + fmt(cfg.ue_range_m) + " m; with scatterer at " + fmt(cfg.scatterer_range_m) +
             " m the estimate is " + fmt(with.estimated_range_m) + " m, without it " +
             fmt(without.estimated_range_m) + " m (cell " + fmt(cfg.delta_r_m) + " m)";
  return o;
}

Outcome monotonicity() {
  Outcome o;
  const ExperimentConfig cfg = desk_config();
  const auto base = coverage_params(cfg);
  const auto& ranges = cfg.coverage.ranges_m;
  const auto& rhos = cfg.coverage.rhos;
  const auto& ucs = cfg.coverage.upsilon_c_values;
  const std::vector<double> alphas{0.0, 0.005, 0.01, 0.02};
  // value[r][rho][uc][alpha]; alpha = 0 is the line-of-sight closed form.
  const auto at = [&](std::size_t ir, std::size_t irho, std::size_t iuc, std::size_t ia) {
    CoverageParams p = base;
    p.rho = rhos[irho];
    p.upsilon_c_avg = ucs[iuc];
    p.alpha_prime = alphas[ia];
    return ia == 0 ? pdc_los(ranges[ir], p) : pdc_nlos(ranges[ir], p);
  };
  std::vector<double> v(ranges.size() * rhos.size() * ucs.size() * alphas.size());
  const auto idx = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return ((a * rhos.size() + b) * ucs.size() + c) * alphas.size() + d;
  };
  for (std::size_t a = 0; a < ranges.size(); ++a)
    for (std::size_t b = 0; b < rhos.size(); ++b)
      for (std::size_t c = 0; c < ucs.size(); ++c)
        for (std::size_t d = 0; d < alphas.size(); ++d) v[idx(a, b, c, d)] = at(a, b, c, d);
  constexpr double kTol = 1e-12;
  int bad_r = 0, bad_rho = 0, bad_uc = 0, bad_alpha = 0, pairs = 0;
  double worst_alpha = 0.0;
  for (std::size_t a = 0; a < ranges.size(); ++a)
    for (std::size_t b = 0; b < rhos.size(); ++b)
      for (std::size_t c = 0; c < ucs.size(); ++c)
        for (std::size_t d = 0; d < alphas.size(); ++d) {
          const double x = v[idx(a, b, c, d)];
          ++pairs;
          if (a + 1 < ranges.size() && v[idx(a + 1, b, c, d)] > x + kTol) ++bad_r;
          if (b + 1 < rhos.size() && v[idx(a, b + 1, c, d)] > x + kTol) ++bad_rho;
          if (c + 1 < ucs.size() && v[idx(a, b, c + 1, d)] > x + kTol) ++bad_uc;
          if (d + 1 < alphas.size() && v[idx(a, b, c, d + 1)] > x + kTol) {
            ++bad_alpha;
            worst_alpha = std::max(worst_alpha, v[idx(a, b, c, d + 1)] - x);
          }
        }
  // P_dc against SNR at a fixed range: with clutter below clutter-free.
  int bad_curve = 0;
  int curve_points = 0;
  const double r = cfg.coverage.snr_sweep_range_m;
  for (double snr_db : cfg.coverage.snr_db) {
    CoverageParams p = base;
    p.noise = p.z * p.upsilon_t_avg / (std::pow(r, 2.0 * p.q) * db_to_linear(snr_db));
    for (double alpha : {0.0, base.alpha_prime}) {
      p.alpha_prime = alpha;
      CoverageParams clean = p;
      clean.rho = 0.0;
      const double with = alpha == 0.0 ? pdc_los(r, p) : pdc_nlos(r, p);
      const double without = alpha == 0.0 ? pdc_los(r, clean) : pdc_nlos(r, clean);
      ++curve_points;
      if (with > without + kTol) ++bad_curve;
    }
  }
  o.pass = bad_r + bad_rho + bad_uc + bad_alpha + bad_curve == 0;
  o.detail = "grid of " + std::to_string(pairs) + " points; increases along distance " + std::to_string(bad_r) +
             ", rho " + std::to_string(bad_rho) + ", upsilon_c " + std::to_string(bad_uc) + ", alpha' " +
             std::to_string(bad_alpha) + " (largest rise " + fmt(worst_alpha) + "); clutter curve above clean " +
             std::to_string(bad_curve) + "/" + std::to_string(curve_points);
  if (bad_alpha > 0) o.detail += "; the alpha' rises come from clutter attenuated more than the target (see README)";
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(JRC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "jrc_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ExperimentConfig cfg = desk_config();
  cfg.comms.n_mc = 60;
  cfg.comms.topologies = 3;
  cfg.comms.ap_counts = {15, 25};
  cfg.coverage.trials = 5000;
  cfg.aoa.trials = 50;
  cfg.detector.calibration_trials = 5000;
  cfg.detector.trials = 5000;
  std::ofstream(dir / "config.yaml") << serialize_config(cfg);
  int files = 0;
  int differing = 0;
  int failed = 0;
  for (const auto& id : figure_ids()) {
    for (const char* run : {"a", "b"}) {
      if (run_cli("figure " + id + " --config " + (dir / "config.yaml").string() + " --out " + (dir / run / id).string()) != 0) {
        ++failed;
      }
    }
    for (const auto& entry : fs::directory_iterator(dir / "a" / id)) {
      ++files;
      if (slurp(entry.path()) != slurp(dir / "b" / id / entry.path().filename())) ++differing;
    }
  }
  fs::remove_all(dir);
  o.pass = failed == 0 && differing == 0 && files > 0;
  o.detail = std::to_string(figure_ids().size()) + " figure commands run twice: " + std::to_string(files) +
             " CSVs, " + std::to_string(differing) + " differ, " + std::to_string(failed) + " runs failed";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"coverage oracle agreement", coverage_oracles},
      {"clutter-free reductions", clutter_free},
      {"estimation identities", estimation_identities},
      {"association constraints", association_constraints},
      {"scalability direction", scalability},
      {"AOA geometry", aoa_geometry},
      {"detector calibration", detector_calibration},
      {"range-bias demo", range_bias},
      {"monotonicity suite", monotonicity},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << out.detail
              << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failures) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
