#pragma once

#include <cstdint>
#include <vector>

#include "jrc/linalg.hpp"
#include "jrc/topology.hpp"

namespace jrc {

class Rng;

/// Large-scale fading: beta_dB = upsilon - 10 alpha log10(d / d_ref) + shadow.
struct LsfcParams {
  double upsilon_db = -148.1;  // path loss at d_ref
  double alpha = 3.76;         // path-loss exponent
  double d_ref = 1000.0;       // m
  double sigma_db = 10.0;      // shadowing std
};

double lsfc_db(const LsfcParams& params, double distance_m, double shadow_db);

enum class CorrelationKind { Uncorrelated, LocalScattering };

struct CorrelationModel {
  CorrelationKind kind = CorrelationKind::Uncorrelated;
  /// Angular standard deviation of the Gaussian local-scattering model.
  double angular_std_rad = 15.0 * kPi / 180.0;
};

/// N x N spatial correlation with trace / N == beta_linear. `nominal_azimuth`
/// is only used by the local-scattering model (half-wavelength ULA).
CMat correlation_matrix(double beta_linear, std::size_t n, const CorrelationModel& model,
                        double nominal_azimuth = 0.0);

/// F with F F^H = R, built from the Hermitian eigendecomposition.
/// Throws NumericalError when R is not Hermitian PSD (relative tolerance 1e-9).
CMat covariance_factor(const CMat& r);

/// One draw of h ~ CN(0, R).
CVec sample_channel(const CMat& r, Rng& rng);
CVec sample_channel(const CMat& r, std::uint64_t seed);
/// Draw using a precomputed factor (hot loops).
CVec sample_with_factor(const CMat& factor, Rng& rng);

/// ULA response: entry n equals exp(j n pi sin(phi) cos(theta)).
CVec array_response(double azimuth, double elevation, std::size_t n);

/// Thermal noise power in watts: psd + 10 log10(B) + noise figure.
double noise_power_watts(double bandwidth_hz, double noise_figure_db = 7.0, double psd_dbm_per_hz = -174.0);

/// All (UE, AP) statistics for one layout.
struct ChannelSet {
  std::size_t num_ues = 0;
  std::size_t num_aps = 0;
  std::size_t antennas = 0;
  RMat beta;                  // K x L, linear
  std::vector<CMat> corr;     // row-major (k, l)
  std::vector<CMat> factors;  // covariance factors, same indexing

  const CMat& r(std::size_t k, std::size_t l) const { return corr[k * num_aps + l]; }
  const CMat& factor(std::size_t k, std::size_t l) const { return factors[k * num_aps + l]; }
};

struct ChannelConfig {
  LsfcParams lsfc;
  std::size_t antennas = 4;
  CorrelationModel correlation;
};

/// LSFCs from geometry with i.i.d. shadowing per (k, l), then correlation matrices.
ChannelSet build_channels(const NetworkLayout& layout, const ChannelConfig& cfg, std::uint64_t seed);

/// Channel set from given linear LSFCs (no geometry, bearing 0).
ChannelSet channels_from_beta(const RMat& beta, std::size_t antennas, const CorrelationModel& model = {});

}  // namespace jrc
