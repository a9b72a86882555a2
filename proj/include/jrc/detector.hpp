#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "jrc/linalg.hpp"
#include "jrc/parallel.hpp"

namespace jrc {

class Rng;

/// Per-AP echo statistics under the known-covariance hypothesis test:
/// H0: r = c + n, H1: r = s + c + n with s ~ CN(0, sigma2_target a a^H),
/// c ~ CN(0, sigma2_clutter a a^H), n ~ CN(0, noise_cov).
struct EchoModel {
  CVec steering;
  double sigma2_target = 0.0;
  double sigma2_clutter = 0.0;
  CMat noise_cov;
  double path_gain = 1.0;        // echo-path gain of the target return
  double target_rcs_norm = 1.0;  // normalized target RCS
};

/// Precomputed whitening for one AP: D = (sigma_c^2 a a^H + N)^{-1/2}.
struct Whitener {
  CMat d;
  double lambda = 0.0;  // sigma_k^2 a^H D^2 a
  CVec projector;       // D a / |D a|, so theta = projector^H x
};

/// Throws NumericalError when sigma_c^2 a a^H + N is not positive definite.
Whitener make_whitener(const EchoModel& model);

struct WhitenedSample {
  double lambda = 0.0;
  cplx theta;
};

WhitenedSample whiten(const Whitener& w, const CVec& received);
WhitenedSample whiten(const EchoModel& model, const CVec& received);

/// T = sum lambda_k |theta_k|^2 / (1 + lambda_k).
double test_statistic(std::span<const WhitenedSample> samples);

enum class Hypothesis { H0, H1 };

/// H1 iff t >= eta.
Hypothesis detect(double t, double eta);

struct DetectionResult {
  double statistic = 0.0;
  double threshold = 0.0;
  Hypothesis decision = Hypothesis::H0;
  std::vector<std::pair<double, double>> per_ap;  // (lambda_k, |theta_k|^2)
};

DetectionResult run_detector(std::span<const Whitener> whiteners, std::span<const CVec> received, double eta);

/// One received snapshot per AP under the given hypothesis.
std::vector<CVec> simulate_echo(std::span<const EchoModel> models, Hypothesis h, Rng& rng);

/// Statistic weights lambda / (1 + lambda) of each AP.
std::vector<double> detector_weights(std::span<const Whitener> whiteners);

/// Empirical (1 - pfa) quantile of T under H0: the smallest sample whose
/// empirical CDF reaches 1 - pfa. Uses the models' own lambda weights.
double calibrate_threshold(std::span<const EchoModel> models, double target_pfa, std::size_t trials,
                           std::uint64_t seed, Execution exec = Execution::Parallel);

/// Same with fixed statistic weights, so the H0 law no longer depends on the target power.
double calibrate_threshold(std::span<const EchoModel> models, std::span<const double> weights, double target_pfa,
                           std::size_t trials, std::uint64_t seed, Execution exec = Execution::Parallel);

/// Samples of T under hypothesis h with the given weights (models' own when empty).
std::vector<double> sample_statistic(std::span<const EchoModel> models, std::span<const double> weights,
                                     Hypothesis h, std::size_t trials, std::uint64_t seed,
                                     Execution exec = Execution::Parallel);

/// Fraction of trials with T >= eta.
double exceedance_rate(std::span<const double> samples, double eta);

/// P(sum_k w_k E_k > t) for i.i.d. E_k ~ Exp(1). Handles pairwise-distinct or
/// all-equal weights; throws NumericalError for other repeated patterns.
double weighted_exponential_survival(std::span<const double> weights, double t);

/// t with weighted_exponential_survival(weights, t) = pfa (bisection).
double closed_form_threshold(std::span<const double> weights, double pfa);

/// Kolmogorov-Smirnov distance between samples and Exp(1).
double ks_distance_exp1(std::vector<double> samples);

/// Asymptotic KS critical value at the 1% level.
double ks_critical_1pct(std::size_t n);

struct RangeDemoConfig {
  double ue_range_m = 15.0;
  bool with_scatterer = true;
  double scatterer_range_m = 45.0;
  double scatterer_excess_db = 20.0;  // scatterer return over the UE return
  double ue_snr_db = 10.0;            // per-antenna UE return over noise
  double delta_r_m = 7.5;
  std::size_t num_cells = 10;
  std::size_t antennas = 4;
  double bearing_rad = 0.5;
  std::size_t pulses = 16;
  std::uint64_t seed = 1;
};

struct RangeDemoResult {
  double true_range_m = 0.0;
  double estimated_range_m = 0.0;
  std::vector<std::pair<double, double>> cells;  // (cell center m, mean statistic)
};

/// Range-cell bank: each cell's echo is scored with the detector statistic and the
/// estimate is the center of the strongest cell.
RangeDemoResult range_estimate_bias_demo(const RangeDemoConfig& cfg);

/// SCNR after steering toward a bearing that is off by `pointing_error_rad`:
/// sigma_t^2 |w^H a_t|^2 / (sigma_c^2 |w^H a_c|^2 + sigma^2 |w|^2), w = a(phi_t + error).
double steered_scnr(double snr_linear, double cnr_linear, double pointing_error_rad, std::size_t antennas,
                    double target_bearing_rad, double clutter_bearing_rad);

struct RocRow {
  double scnr_db = 0.0;
  double pfa = 0.0;
  double pd = 0.0;
};

/// CSV: scnr_db,pfa,pd.
void write_roc_csv(std::ostream& out, std::span<const RocRow> rows);
/// CSV: range_cell_m,statistic.
void write_range_csv(std::ostream& out, const RangeDemoResult& result);

}  // namespace jrc
