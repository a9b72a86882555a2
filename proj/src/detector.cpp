#include "jrc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "jrc/channel.hpp"
#include "jrc/csv.hpp"
#include "jrc/errors.hpp"
#include "jrc/rng.hpp"

namespace jrc {

namespace {

double effective_target_power(const EchoModel& m) {
  return m.sigma2_target * m.path_gain * m.path_gain * m.target_rcs_norm;
}

void check_model(const EchoModel& m) {
  const auto n = m.steering.size();
  if (n < 1) throw DomainError("echo model: empty steering vector");
  if (m.noise_cov.rows() != n || m.noise_cov.cols() != n) throw DomainError("echo model: noise covariance size mismatch");
  if (m.sigma2_target < 0.0 || m.sigma2_clutter < 0.0 || m.target_rcs_norm < 0.0) {
    throw DomainError("echo model: powers must be >= 0");
  }
}

}  // namespace

Whitener make_whitener(const EchoModel& model) {
  check_model(model);
  const CVec& a = model.steering;
  const CMat m = model.sigma2_clutter * a * a.adjoint() + model.noise_cov;
  if (hermitian_defect(m) > 1e-9) throw NumericalError("whitener: covariance is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("whitener: eigendecomposition failed");
  const RVec& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * std::max(1.0, ev.maxCoeff()))) {
    throw NumericalError("whitener: clutter-plus-noise covariance is not positive definite");
  }
  Whitener w;
  w.d = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  const CVec da = w.d * a;
  const double norm = da.norm();
  w.lambda = effective_target_power(model) * da.squaredNorm();
  w.projector = da / norm;
  return w;
}

WhitenedSample whiten(const Whitener& w, const CVec& received) {
  if (received.size() != w.d.rows()) throw DomainError("whiten: received vector size mismatch");
  const CVec x = w.d * received;
  return {w.lambda, w.projector.dot(x)};
}

WhitenedSample whiten(const EchoModel& model, const CVec& received) { return whiten(make_whitener(model), received); }

double test_statistic(std::span<const WhitenedSample> samples) {
  double t = 0.0;
  for (const auto& s : samples) {
    if (s.lambda < 0.0) throw DomainError("test_statistic: lambda must be >= 0");
    t += s.lambda * std::norm(s.theta) / (1.0 + s.lambda);
  }
  return t;
}

Hypothesis detect(double t, double eta) { return t >= eta ? Hypothesis::H1 : Hypothesis::H0; }

DetectionResult run_detector(std::span<const Whitener> whiteners, std::span<const CVec> received, double eta) {
  if (whiteners.size() != received.size()) throw DomainError("run_detector: one snapshot per AP required");
  std::vector<WhitenedSample> samples;
  DetectionResult out;
  for (std::size_t k = 0; k < whiteners.size(); ++k) {
    samples.push_back(whiten(whiteners[k], received[k]));
    out.per_ap.emplace_back(samples.back().lambda, std::norm(samples.back().theta));
  }
  out.statistic = test_statistic(samples);
  out.threshold = eta;
  out.decision = detect(out.statistic, eta);
  return out;
}

namespace {

struct Prepared {
  Whitener whitener;
  CMat noise_factor;
  double clutter_amp = 0.0;
  double target_amp = 0.0;
  CVec steering;
};

std::vector<Prepared> prepare(std::span<const EchoModel> models) {
  std::vector<Prepared> out;
  for (const auto& m : models) {
    Prepared p;
    p.whitener = make_whitener(m);
    p.noise_factor = covariance_factor(m.noise_cov);
    p.clutter_amp = std::sqrt(m.sigma2_clutter);
    p.target_amp = std::sqrt(effective_target_power(m));
    p.steering = m.steering;
    out.push_back(std::move(p));
  }
  return out;
}

CVec draw(const Prepared& p, Hypothesis h, Rng& rng) {
  CVec r = sample_with_factor(p.noise_factor, rng);
  r += (p.clutter_amp * rng.cn01()) * p.steering;
  const cplx s = rng.cn01();
  if (h == Hypothesis::H1) r += (p.target_amp * s) * p.steering;
  return r;
}

}  // namespace

std::vector<CVec> simulate_echo(std::span<const EchoModel> models, Hypothesis h, Rng& rng) {
  std::vector<CVec> out;
  for (const auto& p : prepare(models)) out.push_back(draw(p, h, rng));
  return out;
}

std::vector<double> detector_weights(std::span<const Whitener> whiteners) {
  std::vector<double> w;
  for (const auto& x : whiteners) w.push_back(x.lambda / (1.0 + x.lambda));
  return w;
}

std::vector<double> sample_statistic(std::span<const EchoModel> models, std::span<const double> weights,
                                     Hypothesis h, std::size_t trials, std::uint64_t seed, Execution exec) {
  if (models.empty()) throw DomainError("sample_statistic: no APs");
  const auto prepared = prepare(models);
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) {
    for (const auto& p : prepared) w.push_back(p.whitener.lambda / (1.0 + p.whitener.lambda));
  }
  if (w.size() != prepared.size()) throw DomainError("sample_statistic: one weight per AP required");
  std::vector<double> out(trials);
  for_each_block(trials, exec, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(seed, t);
      double stat = 0.0;
      for (std::size_t k = 0; k < prepared.size(); ++k) {
        const auto s = whiten(prepared[k].whitener, draw(prepared[k], h, rng));
        stat += w[k] * std::norm(s.theta);
      }
      out[t] = stat;
    }
  });
  return out;
}

namespace {

double upper_quantile(std::vector<double> samples, double pfa) {
  const auto n = samples.size();
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - pfa) * static_cast<double>(n)));
  idx = std::clamp<std::size_t>(idx, 1, n) - 1;
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(idx), samples.end());
  return samples[idx];
}

void check_calibration(double pfa, std::size_t trials) {
  std::vector<std::string> problems;
  if (!(pfa > 0.0 && pfa < 1.0)) problems.push_back("detector.target_pfa must lie in (0, 1)");
  if (trials < 1000) problems.push_back("detector.calibration_trials must be >= 1000");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

}  // namespace

double calibrate_threshold(std::span<const EchoModel> models, double target_pfa, std::size_t trials,
                           std::uint64_t seed, Execution exec) {
  check_calibration(target_pfa, trials);
  return upper_quantile(sample_statistic(models, {}, Hypothesis::H0, trials, seed, exec), target_pfa);
}

double calibrate_threshold(std::span<const EchoModel> models, std::span<const double> weights, double target_pfa,
                           std::size_t trials, std::uint64_t seed, Execution exec) {
  check_calibration(target_pfa, trials);
  if (weights.size() != models.size()) throw DomainError("calibrate_threshold: one weight per AP required");
  return upper_quantile(sample_statistic(models, weights, Hypothesis::H0, trials, seed, exec), target_pfa);
}

double exceedance_rate(std::span<const double> samples, double eta) {
  if (samples.empty()) throw DomainError("exceedance_rate: no samples");
  std::size_t hits = 0;
  for (double t : samples) hits += detect(t, eta) == Hypothesis::H1;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

double weighted_exponential_survival(std::span<const double> weights, double t) {
  std::vector<double> w;
  for (double x : weights) {
    if (x < 0.0) throw DomainError("weighted_exponential_survival: weights must be >= 0");
    if (x > 0.0) w.push_back(x);
  }
  if (t < 0.0 || w.empty()) return t < 0.0 ? 1.0 : 0.0;
  std::sort(w.begin(), w.end());
  const auto close = [](double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(a, b); };
  if (close(w.front(), w.back(), 1e-12)) {
    // Erlang(n, w) tail.
    const double x = t / w.front();
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t m = 1; m < w.size(); ++m) {
      term *= x / static_cast<double>(m);
      sum += term;
    }
    return std::exp(-x) * sum;
  }
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (close(w[i - 1], w[i], 1e-6)) {
      throw NumericalError("weighted_exponential_survival: repeated weights need the general hypoexponential form");
    }
  }
  double p = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double coef = 1.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j != k) coef *= w[k] / (w[k] - w[j]);
    }
    p += coef * std::exp(-t / w[k]);
  }
  return std::clamp(p, 0.0, 1.0);
}

double closed_form_threshold(std::span<const double> weights, double pfa) {
  if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("closed_form_threshold: pfa must lie in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  while (weighted_exponential_survival(weights, hi) > pfa) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("closed_form_threshold: no bracket");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (weighted_exponential_survival(weights, mid) > pfa ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ks_distance_exp1(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("ks_distance_exp1: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = samples[i] > 0.0 ? -std::expm1(-samples[i]) : 0.0;
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

RangeDemoResult range_estimate_bias_demo(const RangeDemoConfig& cfg) {
  if (!(cfg.delta_r_m > 0.0) || cfg.num_cells < 1 || cfg.pulses < 1 || cfg.antennas < 1) {
    throw ConfigError("range demo needs delta_r > 0 and at least one cell, pulse and antenna");
  }
  const auto cell_of = [&](double range) {
    return static_cast<std::size_t>(std::floor(range / cfg.delta_r_m));
  };
  const std::size_t ue_cell = cell_of(cfg.ue_range_m);
  const std::size_t sc_cell = cell_of(cfg.scatterer_range_m);
  if (ue_cell >= cfg.num_cells || (cfg.with_scatterer && sc_cell >= cfg.num_cells)) {
    throw ConfigError("range demo: objects lie beyond the last range cell");
  }
  const double ue_power = db_to_linear(cfg.ue_snr_db);
  const double sc_power = ue_power * db_to_linear(cfg.scatterer_excess_db);

  EchoModel model;
  model.steering = array_response(cfg.bearing_rad, 0.0, cfg.antennas);
  model.sigma2_target = ue_power;
  model.noise_cov = CMat::Identity(static_cast<Eigen::Index>(cfg.antennas), static_cast<Eigen::Index>(cfg.antennas));
  const Whitener w = make_whitener(model);

  RangeDemoResult out;
  out.true_range_m = cfg.ue_range_m;
  Rng rng(cfg.seed);
  std::vector<double> score(cfg.num_cells, 0.0);
  for (std::size_t p = 0; p < cfg.pulses; ++p) {
    for (std::size_t c = 0; c < cfg.num_cells; ++c) {
      CVec r(model.steering.size());
      for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = rng.cn01();
      const cplx ue_amp = std::sqrt(ue_power) * rng.cn01();
      const cplx sc_amp = std::sqrt(sc_power) * rng.cn01();
      if (c == ue_cell) r += ue_amp * model.steering;
      if (cfg.with_scatterer && c == sc_cell) r += sc_amp * model.steering;
      const WhitenedSample s = whiten(w, r);
      score[c] += test_statistic(std::span<const WhitenedSample>(&s, 1)) / static_cast<double>(cfg.pulses);
    }
  }
  const auto best = static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
  out.estimated_range_m = (static_cast<double>(best) + 0.5) * cfg.delta_r_m;
  for (std::size_t c = 0; c < cfg.num_cells; ++c) {
    out.cells.emplace_back((static_cast<double>(c) + 0.5) * cfg.delta_r_m, score[c]);
  }
  return out;
}

double steered_scnr(double snr_linear, double cnr_linear, double pointing_error_rad, std::size_t antennas,
                    double target_bearing_rad, double clutter_bearing_rad) {
  const CVec at = array_response(target_bearing_rad, 0.0, antennas);
  const CVec ac = array_response(clutter_bearing_rad, 0.0, antennas);
  const CVec w = array_response(target_bearing_rad + pointing_error_rad, 0.0, antennas);
  const double signal = snr_linear * std::norm(w.dot(at));
  const double interference = cnr_linear * std::norm(w.dot(ac)) + w.squaredNorm();
  return signal / interference;
}

void write_roc_csv(std::ostream& out, std::span<const RocRow> rows) {
  csv::Writer w(out, {"scnr_db", "pfa", "pd"});
  for (const auto& r : rows) w.row({r.scnr_db, r.pfa, r.pd});
}

void write_range_csv(std::ostream& out, const RangeDemoResult& result) {
  csv::Writer w(out, {"range_cell_m", "statistic"});
  for (const auto& [center, stat] : result.cells) w.row({center, stat});
}

}  // namespace jrc
