#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jrc/channel.hpp"
#include "jrc/linalg.hpp"

namespace jrc {

class Rng;

/// Pilot index per UE (0-based, < tau_p) plus per-UE pilot powers.
struct PilotAssignment {
  std::vector<std::size_t> pilot_of;
  std::size_t tau_p = 1;
  std::vector<double> pilot_power;  // watts

  std::size_t num_ues() const { return pilot_of.size(); }
  /// V_k: every UE that shares k's pilot, k included, ascending.
  std::vector<std::size_t> sharing_set(std::size_t k) const;
};

/// Uniform random pilots. With `distinct` the UEs get distinct pilots (needs K <= tau_p).
PilotAssignment assign_pilots(std::size_t num_ues, std::size_t tau_p, std::uint64_t seed, double pilot_power = 0.1,
                              bool distinct = false);

/// Phi = sum_i tau_p p_i R_i + sigma2 I over the sharing set.
CMat pilot_correlation(std::span<const CMat> corr, std::span<const double> powers, std::size_t tau_p,
                       double sigma2);

struct EstimateStats {
  CVec h_hat;
  CMat b;  // covariance of the estimate
  CMat c;  // covariance of the error
};

/// MMSE estimate sqrt(tau_p p) R Phi^-1 y with its second-order statistics.
EstimateStats mmse_estimate(const CVec& y_pilot, const CMat& r, const CMat& phi, std::size_t tau_p, double power);

/// Deterministic part of the MMSE estimator: h_hat = gain * y.
struct EstimatorStats {
  CMat gain;
  CMat b;
  CMat c;
};

EstimatorStats estimator_statistics(const CMat& r, const CMat& phi, std::size_t tau_p, double power);

/// Estimator statistics for every (k, l) plus the pilot correlations per (pilot, AP).
struct EstimationSet {
  std::size_t num_ues = 0;
  std::size_t num_aps = 0;
  std::vector<EstimatorStats> stats;  // row-major (k, l)
  std::vector<CMat> phi;              // row-major (pilot, l)

  const EstimatorStats& at(std::size_t k, std::size_t l) const { return stats[k * num_aps + l]; }
};

EstimationSet build_estimators(const ChannelSet& channels, const PilotAssignment& pilots, double sigma2);

/// y_{t,l} = sum_{i in V} sqrt(tau_p p_i) h_il + n for one AP.
CVec pilot_observation(std::span<const CVec> channels, std::span<const double> powers, std::size_t tau_p,
                       double sigma2, Rng& rng);

}  // namespace jrc
