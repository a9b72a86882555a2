#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "jrc/association.hpp"
#include "jrc/channel.hpp"
#include "jrc/estimation.hpp"
#include "jrc/linalg.hpp"
#include "jrc/parallel.hpp"

namespace jrc {

/// Downlink MR precoder sqrt(p) h_hat / sqrt(E{|h_hat|^2}).
/// Throws DegenerateGeometryError when the expected energy is not positive.
CVec mr_precoder(const CVec& h_hat, double power, double expected_energy);

/// Scales one AP's precoders so that sum_k |w_k|^2 <= 1. Returns the factor applied.
double normalize_ap_power(std::span<CVec> precoders);

/// LP-MMSE combiner p_k (sum_{i in D_l} p_i (h_i h_i^H + C_i) + sigma2 I)^-1 h_k.
/// h_hat, err_cov and powers are indexed by UE id. Throws ContractViolation if k is not in `served`.
CVec lp_mmse_combiner(std::size_t k, std::span<const std::size_t> served, std::span<const CVec> h_hat,
                      std::span<const CMat> err_cov, std::span<const double> powers, double sigma2);

enum class CombinerKind { MR, LpMmse };
enum class WeightScheme { Equal, Optimal };

struct SinrOptions {
  CombinerKind combiner = CombinerKind::LpMmse;
  /// Rescale every a_kl by 1 / sqrt(|D_l| E{|a_kl|^2}) so each AP spends the
  /// same total combining energy regardless of how many UEs it serves.
  bool equal_ap_power = false;
  std::size_t n_mc = 1000;
  Execution exec = Execution::Parallel;
};

/// Monte Carlo estimates of the effective-SINR expectations, per UE and
/// restricted to the serving set M_k (entries outside M_k are zero by the D_kl mask).
struct SinrTerms {
  std::size_t num_aps = 0;
  std::vector<std::vector<std::size_t>> serving;  // M_k
  std::vector<CVec> v;                            // E{a_kl^H h_kl}, l in M_k
  std::vector<CMat> interference;                 // sum_i p_i Lambda1_ki on M_k x M_k
  std::vector<RVec> lambda2;                      // E{|a_kl|^2}, l in M_k
  std::vector<double> powers;
  double sigma2 = 0.0;

  std::size_t num_ues() const { return serving.size(); }
};

SinrTerms estimate_sinr_terms(const ChannelSet& channels, const PilotAssignment& pilots, const EstimationSet& est,
                              const AssociationMatrix& s, double sigma2, const SinrOptions& options,
                              std::uint64_t seed);

/// CPU weights for UE k as a full L-vector (zero outside M_k).
CVec cpu_weights(WeightScheme scheme, const SinrTerms& terms, std::size_t k);

/// Effective SINR of UE k for full-length weights w.
/// Throws NumericalError when the denominator is not positive.
double sinr(const SinrTerms& terms, std::size_t k, const CVec& w);

/// (1 - tau_p / tau_c) log2(1 + sinr). Throws ConfigError unless 0 < tau_p < tau_c.
double spectral_efficiency(double sinr_linear, std::size_t tau_p, std::size_t tau_c);

/// Per-UE uplink SE.
std::vector<double> uplink_se(const SinrTerms& terms, WeightScheme scheme, std::size_t tau_p, std::size_t tau_c);

/// CSV: ue_id,se_bits_per_hz.
void write_se_csv(std::ostream& out, std::span<const double> se);

}  // namespace jrc
