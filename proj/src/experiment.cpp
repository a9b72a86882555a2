#include "jrc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "jrc/aoa.hpp"
#include "jrc/csv.hpp"
#include "jrc/detector.hpp"
#include "jrc/errors.hpp"
#include "jrc/rng.hpp"

namespace jrc {

namespace {

// Stream ids below a scenario or topology seed.
enum Stream : std::uint64_t {
  kChannelStream = 1,
  kPilotStream = 2,
  kClutterStream = 3,
  kReportStream = 4,
  kSinrStream = 5,
  kBootstrapStream = 6,
  kCoverageStream = 7,
  kAoaStream = 8,
  kDetectorStream = 9,
  kRangeStream = 10,
};

constexpr double kDeg = kPi / 180.0;

std::string fmt(double v) { return csv::format_double(v); }

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<csv::Cell>>& rows) {
  std::ostringstream out;
  csv::Writer w(out, header);
  for (const auto& r : rows) w.row(r);
  return out.str();
}

template <class F>
std::string render(F&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

LayoutConfig layout_config(const ExperimentConfig& cfg) {
  return {cfg.layout.num_aps, cfg.layout.num_ues, Rect::square(cfg.layout.area_side_m)};
}

ChannelConfig channel_config(const ExperimentConfig& cfg) {
  ChannelConfig cc;
  cc.lsfc = {cfg.channel.upsilon_db, cfg.channel.alpha, cfg.channel.d_ref_m, cfg.channel.sigma_db};
  cc.antennas = cfg.channel.antennas;
  cc.correlation.kind = cfg.channel.correlation == "local-scattering" ? CorrelationKind::LocalScattering
                                                                      : CorrelationKind::Uncorrelated;
  cc.correlation.angular_std_rad = cfg.channel.angular_std_deg * kDeg;
  return cc;
}

ClutterField map_clutter(const ExperimentConfig& cfg, std::uint64_t seed) {
  ClutterConfig cc;
  cc.intensity = cfg.association.clutter_intensity;
  cc.region = Rect::square(cfg.layout.area_side_m);
  cc.mean_rcs = cfg.coverage.upsilon_c_avg;
  return sample_clutter(cc, stream_seed(seed, kClutterStream));
}

// Expected SCNR of the (k, l) sensing link: clutter from the scatterers inside the
// UE's range cell of AP l; a blocked ray also suffers the through-clutter attenuation.
LinkScnr link_scnr(const ExperimentConfig& cfg, const NetworkLayout& layout, const ClutterField& clutter) {
  auto params = coverage_params(cfg);
  return [&cfg, &layout, &clutter, params](std::size_t k, std::size_t l) {
    const Point2& ap = layout.aps[l];
    const double r = std::max(layout.distance(k, l), 1.0);
    ClutterField cell;
    for (const auto& c : clutter.scatterers) {
      const double rc = (c.position - ap).norm();
      if (rc >= r && rc <= r + params.delta_r) cell.scatterers.push_back(c);
    }
    CoverageParams p = params;
    const bool blocked = first_blocking_scatterer(ap, layout.ues[k], clutter, cfg.association.capture_radius_m).has_value();
    if (!blocked) p.alpha_prime = 0.0;
    return scnr_realization(r, p.upsilon_t_avg, cell, p, ap);
  };
}

struct Refinement {
  AssociationMatrix initial;
  RefineResult refined;
  ClutterField clutter;
  std::vector<std::size_t> unsatisfied;
};

Refinement refine_clustered(const ExperimentConfig& cfg, const Scenario& sc, std::uint64_t seed) {
  Refinement out;
  out.initial = initial_association(sc.channels.beta, cfg.estimation.tau_p);
  out.refined.s = out.initial;
  if (cfg.association.clutter_intensity <= 0.0) return out;
  out.clutter = map_clutter(cfg, seed);

  const auto num_ues = sc.layout.num_ues();
  AoaReports reports(num_ues, sc.layout.num_aps());
  std::vector<Point2> coarse(num_ues);
  Rng rng(stream_seed(seed, kReportStream));
  // Every AP reports an echo bearing, so refill candidates can be screened as well.
  std::vector<std::size_t> all_aps(sc.layout.num_aps());
  std::iota(all_aps.begin(), all_aps.end(), 0);
  for (std::size_t k = 0; k < num_ues; ++k) {
    const auto synth = synthesize_reports(sc.layout, sc.layout.ues[k], out.clutter, all_aps,
                                          cfg.association.aoa_noise_deg * kDeg, rng, cfg.association.capture_radius_m);
    for (const auto& r : synth) reports.set(k, r.ap, r.angle);
    coarse[k] = sc.layout.ues[k] + cfg.association.position_noise_m * Point2(rng.normal(), rng.normal());
  }
  RefineOptions opts;
  opts.tau_p = cfg.estimation.tau_p;
  opts.tolerance_m = cfg.association.tolerance_m;
  try {
    out.refined = refine_association(out.initial, reports, coarse, sc.layout, link_scnr(cfg, sc.layout, out.clutter), opts);
  } catch (const UnsatisfiableLosError& e) {
    out.unsatisfied = e.ues();
    out.refined = RefineResult{out.initial, {}, {}};
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

SchemeSummary summarize(const std::string& name, const std::vector<double>& samples, std::uint64_t seed) {
  constexpr std::size_t kResamples = 1000;
  SchemeSummary s;
  s.scheme = name;
  s.samples = samples.size();
  s.mean = mean_of(samples);
  s.median = median_of(samples);
  if (samples.empty()) return s;
  std::vector<double> means(kResamples);
  std::vector<double> medians(kResamples);
  Rng rng(seed);
  std::vector<double> draw(samples.size());
  for (std::size_t b = 0; b < kResamples; ++b) {
    for (auto& x : draw) x = samples[rng.uniform_index(samples.size())];
    means[b] = mean_of(draw);
    medians[b] = median_of(draw);
  }
  std::sort(means.begin(), means.end());
  std::sort(medians.begin(), medians.end());
  const auto lo = static_cast<std::size_t>(0.025 * kResamples);
  const auto hi = static_cast<std::size_t>(0.975 * kResamples) - 1;
  s.mean_ci_low = means[lo];
  s.mean_ci_high = means[hi];
  s.median_ci_low = medians[lo];
  s.median_ci_high = medians[hi];
  return s;
}

std::string summary_csv(const std::vector<SchemeSummary>& table) {
  std::vector<std::vector<csv::Cell>> rows;
  for (const auto& s : table) {
    rows.push_back({s.scheme, static_cast<std::uint64_t>(s.samples), s.mean, s.mean_ci_low, s.mean_ci_high, s.median,
                    s.median_ci_low, s.median_ci_high});
  }
  return to_csv({"scheme", "samples", "mean_se_bits_per_hz", "mean_ci_low_bits_per_hz", "mean_ci_high_bits_per_hz",
                 "median_se_bits_per_hz", "median_ci_low_bits_per_hz", "median_ci_high_bits_per_hz"},
                rows);
}

// Coverage rows over a (range, parameter) grid.
CoverageRow coverage_point(const CoverageParams& p, double r, PathMode mode, std::size_t trials, std::uint64_t seed,
                           Integrand integrand) {
  QuadratureOptions q;
  q.integrand = integrand;
  CoverageRow row;
  row.r_m = r;
  row.rho = p.rho;
  row.upsilon_c_avg = p.upsilon_c_avg;
  row.alpha_prime = mode == PathMode::NLoS ? p.alpha_prime : 0.0;
  row.pdc_closed = mode == PathMode::NLoS ? pdc_nlos(r, p, q) : pdc_los(r, p, q);
  const auto mc = pdc_monte_carlo(r, p, mode, trials, seed);
  row.pdc_mc = mc.p;
  row.stderr_ = mc.stderr_;
  return row;
}

Integrand integrand_of(const ExperimentConfig& cfg) {
  return cfg.coverage.integrand == "no-polar-measure" ? Integrand::NoPolarMeasure : Integrand::PolarMeasure;
}

std::uint64_t grid_seed(const ExperimentConfig& cfg, std::size_t index) {
  return stream_seed(stream_seed(cfg.seed, kCoverageStream), index);
}

std::vector<EchoModel> detector_models(const ExperimentConfig& cfg, double scnr_linear) {
  const auto& d = cfg.detector;
  Rng rng(stream_seed(cfg.seed, kDetectorStream));
  const double cnr = db_to_linear(d.cnr_db);
  std::vector<EchoModel> models;
  for (std::size_t k = 0; k < d.num_aps; ++k) {
    EchoModel m;
    m.steering = array_response(rng.uniform(-kPi / 3.0, kPi / 3.0), 0.0, d.antennas);
    m.sigma2_clutter = cnr;
    m.sigma2_target = scnr_linear * (cnr + 1.0);
    m.noise_cov = CMat::Identity(static_cast<Eigen::Index>(d.antennas), static_cast<Eigen::Index>(d.antennas));
    models.push_back(std::move(m));
  }
  return models;
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Clustered:
      return "clustered";
    case Scheme::AllServeAll:
      return "all-serve-all";
    case Scheme::NearestAp:
      return "nearest-ap";
  }
  return "unknown";
}

CoverageParams coverage_params(const ExperimentConfig& cfg) {
  CoverageParams p;
  p.gamma = cfg.coverage.gamma;
  p.q = cfg.coverage.q;
  p.z = cfg.coverage.z;
  p.noise = cfg.coverage.noise_w;
  p.upsilon_t_avg = cfg.coverage.upsilon_t_avg;
  p.upsilon_c_avg = cfg.coverage.upsilon_c_avg;
  p.rho = cfg.coverage.rho;
  p.delta_r = cfg.coverage.delta_r_m;
  p.alpha_prime = cfg.coverage.alpha_prime;
  return p;
}

Scenario build_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
  Scenario sc;
  sc.layout = generate_layout(layout_config(cfg), seed);
  sc.channels = build_channels(sc.layout, channel_config(cfg), stream_seed(seed, kChannelStream));
  sc.pilots = assign_pilots(cfg.layout.num_ues, cfg.estimation.tau_p, stream_seed(seed, kPilotStream),
                            cfg.estimation.pilot_power_w);
  sc.sigma2 = noise_power_watts(cfg.channel.bandwidth_hz, cfg.channel.noise_figure_db);
  sc.estimators = build_estimators(sc.channels, sc.pilots, sc.sigma2);
  return sc;
}

AssociationMatrix associate(const ExperimentConfig& cfg, const Scenario& sc, Scheme scheme, std::uint64_t seed,
                            std::vector<std::string>* notes) {
  switch (scheme) {
    case Scheme::AllServeAll:
      return AssociationMatrix::all_ones(sc.layout.num_ues(), sc.layout.num_aps());
    case Scheme::NearestAp:
      return nearest_ap_association(sc.channels.beta);
    case Scheme::Clustered:
      break;
  }
  auto r = refine_clustered(cfg, sc, seed);
  if (!r.unsatisfied.empty() && notes) {
    notes->push_back("refinement unsatisfiable for " + std::to_string(r.unsatisfied.size()) +
                     " UE(s); initial association kept");
  }
  return std::move(r.refined.s);
}

std::vector<double> scheme_se(const ExperimentConfig& cfg, const Scenario& sc, const AssociationMatrix& s,
                              std::uint64_t seed) {
  SinrOptions opts;
  opts.combiner = cfg.comms.combiner == "mr" ? CombinerKind::MR : CombinerKind::LpMmse;
  opts.equal_ap_power = cfg.comms.equal_ap_power;
  opts.n_mc = cfg.comms.n_mc;
  const auto terms =
      estimate_sinr_terms(sc.channels, sc.pilots, sc.estimators, s, sc.sigma2, opts, stream_seed(seed, kSinrStream));
  const auto weights = cfg.comms.weights == "optimal" ? WeightScheme::Optimal : WeightScheme::Equal;
  return uplink_se(terms, weights, cfg.estimation.tau_p, cfg.comms.tau_c);
}

Comparison compare_schemes(const ExperimentConfig& cfg, const std::vector<Scheme>& schemes) {
  Comparison cmp;
  std::vector<std::vector<double>> pooled(schemes.size());
  cmp.per_topology_mean.resize(schemes.size());
  std::vector<std::vector<csv::Cell>> sample_rows;
  std::vector<std::string> notes;
  for (std::size_t t = 0; t < cfg.comms.topologies; ++t) {
    const auto seed = stream_seed(cfg.seed, t);
    const Scenario sc = build_scenario(cfg, seed);
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      const auto s = associate(cfg, sc, schemes[i], seed, &notes);
      const auto se = scheme_se(cfg, sc, s, seed);
      cmp.per_topology_mean[i].push_back(mean_of(se));
      for (std::size_t k = 0; k < se.size(); ++k) {
        pooled[i].push_back(se[k]);
        sample_rows.push_back({std::string(scheme_name(schemes[i])), static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(k), se[k]});
      }
    }
  }
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    cmp.table.push_back(summarize(scheme_name(schemes[i]), pooled[i], stream_seed(cfg.seed, kBootstrapStream)));
  }
  cmp.output.datasets.push_back({"compare", summary_csv(cmp.table)});
  cmp.output.datasets.push_back(
      {"se_samples", to_csv({"scheme", "topology", "ue_id", "se_bits_per_hz"}, sample_rows)});
  for (const auto& s : cmp.table) {
    cmp.output.summary.push_back(s.scheme + ": mean SE " + fmt(s.mean) + " bit/s/Hz (95% CI " + fmt(s.mean_ci_low) +
                                 " .. " + fmt(s.mean_ci_high) + ")");
  }
  if (!notes.empty()) {
    cmp.output.summary.push_back(std::to_string(notes.size()) + " topology(ies) kept the initial association: " +
                                 notes.front());
  }
  return cmp;
}

ExperimentOutput run_layout(const ExperimentConfig& cfg) {
  const auto layout = generate_layout(layout_config(cfg), cfg.seed);
  const auto clutter = map_clutter(cfg, cfg.seed);
  ExperimentOutput out;
  out.datasets.push_back({"layout", render([&](std::ostream& o) { write_entities_csv(o, layout, &clutter); })});
  out.summary.push_back(std::to_string(layout.num_aps()) + " APs, " + std::to_string(layout.num_ues()) + " UEs, " +
                        std::to_string(clutter.size()) + " scatterers");
  return out;
}

ExperimentOutput run_se(const ExperimentConfig& cfg) {
  const Scenario sc = build_scenario(cfg, cfg.seed);
  ExperimentOutput out;
  const auto s = associate(cfg, sc, Scheme::Clustered, cfg.seed, &out.summary);
  const auto se = scheme_se(cfg, sc, s, cfg.seed);
  out.datasets.push_back({"se", render([&](std::ostream& o) { write_se_csv(o, se); })});
  out.summary.push_back("mean uplink SE " + fmt(mean_of(se)) + " bit/s/Hz over " + std::to_string(se.size()) + " UEs");
  return out;
}

ExperimentOutput run_associate(const ExperimentConfig& cfg) {
  const Scenario sc = build_scenario(cfg, cfg.seed);
  const auto r = refine_clustered(cfg, sc, cfg.seed);
  ExperimentOutput out;
  out.datasets.push_back({"association_initial", render([&](std::ostream& o) { write_association_pairs_csv(o, r.initial); })});
  out.datasets.push_back({"association_refined", render([&](std::ostream& o) { write_association_pairs_csv(o, r.refined.s); })});
  out.datasets.push_back({"association_grid", render([&](std::ostream& o) { write_association_grid_csv(o, r.refined.s); })});
  out.datasets.push_back(
      {"association_diff", render([&](std::ostream& o) { write_association_diff_csv(o, r.initial, r.refined.s); })});
  out.summary.push_back("refinement removed " + std::to_string(r.refined.removed.size()) + " and added " +
                        std::to_string(r.refined.added.size()) + " links");
  if (!r.unsatisfied.empty()) {
    out.summary.push_back("no clutter-free AP pair for " + std::to_string(r.unsatisfied.size()) +
                          " UE(s); initial association kept");
  }
  return out;
}

ExperimentOutput run_pdc(const ExperimentConfig& cfg) {
  const auto base = coverage_params(cfg);
  std::vector<CoverageRow> rows;
  std::size_t index = 0;
  for (double rho : cfg.coverage.rhos) {
    for (double r : cfg.coverage.ranges_m) {
      CoverageParams p = base;
      p.rho = rho;
      for (auto mode : {PathMode::LoS, PathMode::NLoS}) {
        rows.push_back(coverage_point(p, r, mode, cfg.coverage.trials, grid_seed(cfg, index++), integrand_of(cfg)));
      }
    }
  }
  ExperimentOutput out;
  out.datasets.push_back({"pdc", render([&](std::ostream& o) { write_coverage_csv(o, rows); })});
  return out;
}

namespace {

ExperimentOutput fig_aoa(const ExperimentConfig& cfg, const std::string& name) {
  const auto method =
      cfg.aoa.method == "bearing-lines" ? IntersectionMethod::BearingLines : IntersectionMethod::PairwiseMean;
  std::vector<RmseRow> rows;
  std::vector<double> sum(cfg.aoa.noise_std_deg.size(), 0.0);
  for (std::size_t trial = 0; trial < cfg.aoa.trials; ++trial) {
    const auto trial_seed = stream_seed(stream_seed(cfg.seed, kAoaStream), trial);
    Rng geo(trial_seed);
    const Rect area = Rect::square(cfg.layout.area_side_m);
    std::vector<Point2> aps(cfg.layout.num_aps);
    for (auto& p : aps) p = sample_uniform(area, geo);
    // Redraw the UE until its serving APs give well-conditioned bearings.
    Point2 ue;
    std::vector<AoaReport> exact;
    for (int attempt = 0;; ++attempt) {
      ue = sample_uniform(area, geo);
      std::vector<std::size_t> order(aps.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return (aps[a] - ue).norm() < (aps[b] - ue).norm(); });
      exact.clear();
      bool ok = true;
      for (std::size_t i = 0; i < cfg.aoa.aps_per_ue && ok; ++i) {
        ok = (aps[order[i]] - ue).norm() > 1.0;
        if (ok) exact.push_back({order[i], bearing(aps[order[i]], ue), std::nullopt});
      }
      for (std::size_t d = 1; d < exact.size() && ok; ++d) {
        const auto ang = baseline_angles(aps[exact[0].ap], exact[0].angle, aps[exact[d].ap], exact[d].angle);
        ok = std::abs(std::sin(ang.alpha1 + ang.alpha_d)) > 0.1;
      }
      if (ok) break;
      if (attempt > 1000) throw DegenerateGeometryError("aoa experiment: no well-conditioned geometry found");
    }
    // Common random numbers: each level scales the same standard-normal draws.
    std::vector<std::vector<double>> z(cfg.aoa.measurements, std::vector<double>(exact.size()));
    for (auto& m : z) {
      for (auto& x : m) x = geo.normal();
    }
    for (std::size_t lvl = 0; lvl < cfg.aoa.noise_std_deg.size(); ++lvl) {
      const double sigma = cfg.aoa.noise_std_deg[lvl] * kDeg;
      std::vector<Point2> estimates;
      for (const auto& m : z) {
        auto noisy = exact;
        for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i].angle = wrap_two_pi(noisy[i].angle + sigma * m[i]);
        estimates.push_back(intersect_aoa(aps, noisy, method).point);
      }
      const double e = rmse(estimates, ue);
      sum[lvl] += e;
      rows.push_back({trial, cfg.aoa.noise_std_deg[lvl], e});
    }
  }
  ExperimentOutput out;
  out.datasets.push_back({name, render([&](std::ostream& o) { write_rmse_csv(o, rows); })});
  for (std::size_t lvl = 0; lvl < sum.size(); ++lvl) {
    out.summary.push_back("noise " + fmt(cfg.aoa.noise_std_deg[lvl]) + " deg: mean RMSE " +
                          fmt(sum[lvl] / static_cast<double>(cfg.aoa.trials)) + " m");
  }
  return out;
}

}  // namespace

ExperimentOutput run_aoa(const ExperimentConfig& cfg) { return fig_aoa(cfg, "aoa_rmse"); }

ExperimentOutput run_detect(const ExperimentConfig& cfg) {
  const auto& d = cfg.detector;
  std::vector<RocRow> rows;
  const auto base = stream_seed(cfg.seed, kDetectorStream);
  for (std::size_t i = 0; i < d.scnr_db.size(); ++i) {
    const auto models = detector_models(cfg, db_to_linear(d.scnr_db[i]));
    const double eta = calibrate_threshold(models, d.target_pfa, d.calibration_trials, stream_seed(base, 3 * i));
    const auto h0 = sample_statistic(models, {}, Hypothesis::H0, d.trials, stream_seed(base, 3 * i + 1));
    const auto h1 = sample_statistic(models, {}, Hypothesis::H1, d.trials, stream_seed(base, 3 * i + 2));
    rows.push_back({d.scnr_db[i], exceedance_rate(h0, eta), exceedance_rate(h1, eta)});
  }
  ExperimentOutput out;
  out.datasets.push_back({"detect_roc", render([&](std::ostream& o) { write_roc_csv(o, rows); })});
  for (const auto& r : rows) {
    out.summary.push_back("SCNR " + fmt(r.scnr_db) + " dB: Pfa " + fmt(r.pfa) + ", Pd " + fmt(r.pd));
  }
  return out;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"5b", "5c", "5d", "5e", "5f", "6b", "6c", "6d", "6a-range"};
  return ids;
}

ExperimentOutput run_figure(const ExperimentConfig& cfg, const std::string& id) {
  if (id == "5b" || id == "5d") {
    const auto schemes = id == "5b" ? std::vector<Scheme>{Scheme::Clustered, Scheme::AllServeAll}
                                    : std::vector<Scheme>{Scheme::Clustered, Scheme::NearestAp};
    auto cmp = compare_schemes(cfg, schemes);
    ExperimentOutput out = std::move(cmp.output);
    out.datasets[0].name = "fig" + id + "_summary";
    out.datasets[1].name = "fig" + id;
    if (cmp.table.size() == 2 && cmp.table[1].mean > 0.0) {
      out.summary.push_back("mean SE ratio " + cmp.table[0].scheme + " / " + cmp.table[1].scheme + ": " +
                            fmt(cmp.table[0].mean / cmp.table[1].mean));
    }
    return out;
  }
  if (id == "5c") {
    std::vector<std::vector<csv::Cell>> rows;
    ExperimentOutput out;
    for (auto l : cfg.comms.ap_counts) {
      ExperimentConfig c = cfg;
      c.layout.num_aps = l;
      if (2 * c.layout.num_ues > l * c.estimation.tau_p) {
        throw ConfigError("comms.ap_counts: L = " + std::to_string(l) + " cannot give every UE two APs");
      }
      const auto cmp = compare_schemes(c, {Scheme::Clustered, Scheme::AllServeAll});
      for (const auto& s : cmp.table) {
        rows.push_back({static_cast<std::uint64_t>(l), s.scheme, s.mean, s.mean_ci_low, s.mean_ci_high});
        out.summary.push_back("L = " + std::to_string(l) + " " + s.scheme + ": mean SE " + fmt(s.mean));
      }
    }
    out.datasets.push_back({"fig5c", to_csv({"num_aps", "scheme", "mean_se_bits_per_hz", "mean_ci_low_bits_per_hz",
                                             "mean_ci_high_bits_per_hz"},
                                            rows)});
    return out;
  }
  if (id == "5e") return fig_aoa(cfg, "fig5e");
  if (id == "5f") {
    std::vector<std::vector<csv::Cell>> rows;
    const double target = 0.3;
    const double clutter = target + 20.0 * kDeg;
    for (double err : cfg.detector.pointing_errors_deg) {
      for (double snr : cfg.detector.snr_db) {
        const double scnr = steered_scnr(db_to_linear(snr), db_to_linear(cfg.detector.cnr_db), err * kDeg,
                                         cfg.detector.antennas, target, clutter);
        rows.push_back({snr, err, linear_to_db(scnr)});
      }
    }
    ExperimentOutput out;
    out.datasets.push_back({"fig5f", to_csv({"snr_db", "pointing_error_deg", "scnr_db"}, rows)});
    return out;
  }
  if (id == "6b") {
    const auto base = coverage_params(cfg);
    const double r = cfg.coverage.snr_sweep_range_m;
    std::vector<std::vector<csv::Cell>> rows;
    std::size_t index = 0;
    for (double rho : {0.0, base.rho}) {
      for (double snr_db : cfg.coverage.snr_db) {
        CoverageParams p = base;
        p.rho = rho;
        // Mean clutter-free SNR Z upsilon_t / (r^{2q} n) set through the noise power.
        p.noise = p.z * p.upsilon_t_avg / (std::pow(r, 2.0 * p.q) * db_to_linear(snr_db));
        const auto row = coverage_point(p, r, PathMode::LoS, cfg.coverage.trials, grid_seed(cfg, index++), integrand_of(cfg));
        rows.push_back({snr_db, rho, row.pdc_closed, row.pdc_mc, row.stderr_});
      }
    }
    ExperimentOutput out;
    out.datasets.push_back({"fig6b", to_csv({"snr_db", "rho_per_m2", "pdc_closed", "pdc_mc", "stderr"}, rows)});
    return out;
  }
  if (id == "6c" || id == "6d") {
    const auto base = coverage_params(cfg);
    std::vector<CoverageRow> rows;
    std::size_t index = 0;
    const auto& sweep = id == "6c" ? cfg.coverage.rhos : cfg.coverage.upsilon_c_values;
    for (double value : sweep) {
      CoverageParams p = base;
      (id == "6c" ? p.rho : p.upsilon_c_avg) = value;
      for (double r : cfg.coverage.ranges_m) {
        rows.push_back(coverage_point(p, r, PathMode::LoS, cfg.coverage.trials, grid_seed(cfg, index++), integrand_of(cfg)));
        if (id == "6d" && p.alpha_prime > 0.0) {
          rows.push_back(coverage_point(p, r, PathMode::NLoS, cfg.coverage.trials, grid_seed(cfg, index++), integrand_of(cfg)));
        }
      }
    }
    ExperimentOutput out;
    out.datasets.push_back({"fig" + id, render([&](std::ostream& o) { write_coverage_csv(o, rows); })});
    return out;
  }
  if (id == "6a-range") {
    RangeDemoConfig rc;
    rc.ue_range_m = cfg.detector.ue_range_m;
    rc.scatterer_range_m = cfg.detector.scatterer_range_m;
    rc.scatterer_excess_db = cfg.detector.scatterer_excess_db;
    rc.delta_r_m = cfg.coverage.delta_r_m;
    rc.antennas = cfg.detector.antennas;
    rc.num_cells = static_cast<std::size_t>(
        std::ceil((std::max(rc.ue_range_m, rc.scatterer_range_m) + 2.0 * rc.delta_r_m) / rc.delta_r_m));
    rc.seed = stream_seed(cfg.seed, kRangeStream);
    const auto with = range_estimate_bias_demo(rc);
    rc.with_scatterer = false;
    const auto without = range_estimate_bias_demo(rc);
    ExperimentOutput out;
    out.datasets.push_back({"fig6a-range_clutter", render([&](std::ostream& o) { write_range_csv(o, with); })});
    out.datasets.push_back({"fig6a-range_clear", render([&](std::ostream& o) { write_range_csv(o, without); })});
    out.summary.push_back("true range " + fmt(with.true_range_m) + " m; estimate with scatterer " +
                          fmt(with.estimated_range_m) + " m, without " + fmt(without.estimated_range_m) + " m");
    return out;
  }
  throw ConfigError("unknown figure id '" + id + "'");
}

void write_datasets(const ExperimentOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& d : out.datasets) {
    const auto path = dir / (d.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << d.csv;
    if (!f) throw Error("write failed for " + path.string());
  }
}

}  // namespace jrc
