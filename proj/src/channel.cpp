#include "jrc/channel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "jrc/errors.hpp"
#include "jrc/rng.hpp"

namespace jrc {

double lsfc_db(const LsfcParams& params, double distance_m, double shadow_db) {
  if (!(distance_m > 0.0)) throw DomainError("lsfc_db: distance must be > 0");
  return params.upsilon_db - 10.0 * params.alpha * std::log10(distance_m / params.d_ref) + shadow_db;
}

namespace {

// E{exp(j pi delta_n sin(phi + d))} for d ~ N(0, sigma^2), composite Gauss-Legendre on +-8 sigma.
cplx local_scattering_entry(int delta_n, double phi, double sigma) {
  using Quad = boost::math::quadrature::gauss<double, 30>;
  constexpr int kPanels = 16;
  const double lo = -8.0 * sigma;
  const double width = 16.0 * sigma / kPanels;
  const double norm = 1.0 / (std::sqrt(2.0 * kPi) * sigma);
  double re = 0.0;
  double im = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double a = lo + p * width;
    const double b = a + width;
    const auto pdf = [&](double d) { return norm * std::exp(-0.5 * d * d / (sigma * sigma)); };
    re += Quad::integrate([&](double d) { return pdf(d) * std::cos(kPi * delta_n * std::sin(phi + d)); }, a, b);
    im += Quad::integrate([&](double d) { return pdf(d) * std::sin(kPi * delta_n * std::sin(phi + d)); }, a, b);
  }
  return {re, im};
}

}  // namespace

CMat correlation_matrix(double beta_linear, std::size_t n, const CorrelationModel& model, double nominal_azimuth) {
  if (!(beta_linear > 0.0)) throw DomainError("correlation_matrix: beta must be > 0");
  if (n < 1) throw DomainError("correlation_matrix: N must be >= 1");
  if (model.kind == CorrelationKind::Uncorrelated || n == 1) {
    return CMat::Identity(n, n) * beta_linear;
  }
  if (!(model.angular_std_rad > 0.0)) throw DomainError("correlation_matrix: angular std must be > 0");
  // Toeplitz in (m - n).
  std::vector<cplx> first_col(n);
  for (std::size_t d = 0; d < n; ++d) {
    first_col[d] = local_scattering_entry(static_cast<int>(d), nominal_azimuth, model.angular_std_rad);
  }
  CMat r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r(i, j) = i >= j ? first_col[i - j] : std::conj(first_col[j - i]);
    }
  }
  const double tr = r.trace().real();
  r *= beta_linear * static_cast<double>(n) / tr;
  for (std::size_t i = 0; i < n; ++i) r(i, i) = beta_linear;
  return r;
}

CMat covariance_factor(const CMat& r) {
  if (r.rows() != r.cols()) throw NumericalError("covariance_factor: matrix not square");
  const double scale = r.cwiseAbs().maxCoeff();
  if (scale == 0.0) return CMat::Zero(r.rows(), r.cols());
  if (hermitian_defect(r) > 1e-9) throw NumericalError("covariance_factor: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(r);
  if (es.info() != Eigen::Success) throw NumericalError("covariance_factor: eigendecomposition failed");
  const RVec& ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-9 * std::max(scale, ev.maxCoeff())) {
    throw NumericalError("covariance_factor: matrix not positive semidefinite");
  }
  const RVec root = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

CVec sample_with_factor(const CMat& factor, Rng& rng) {
  CVec z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.cn01();
  return factor * z;
}

CVec sample_channel(const CMat& r, Rng& rng) {
  // Diagonal covariances keep null directions exactly zero.
  if (r.isDiagonal(0.0)) {
    CVec h(r.rows());
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      const double var = r(i, i).real();
      if (var < 0.0) throw NumericalError("sample_channel: negative variance on the diagonal");
      h(i) = std::sqrt(var) * rng.cn01();
    }
    return h;
  }
  return sample_with_factor(covariance_factor(r), rng);
}

CVec sample_channel(const CMat& r, std::uint64_t seed) {
  Rng rng(seed);
  return sample_channel(r, rng);
}

CVec array_response(double azimuth, double elevation, std::size_t n) {
  CVec a(n);
  const double phase = kPi * std::sin(azimuth) * std::cos(elevation);
  for (std::size_t i = 0; i < n; ++i) a(i) = std::polar(1.0, phase * static_cast<double>(i));
  return a;
}

double noise_power_watts(double bandwidth_hz, double noise_figure_db, double psd_dbm_per_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("noise_power_watts: bandwidth must be > 0");
  const double dbm = psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
  return db_to_linear(dbm - 30.0);
}

ChannelSet channels_from_beta(const RMat& beta, std::size_t antennas, const CorrelationModel& model) {
  ChannelSet set;
  set.num_ues = static_cast<std::size_t>(beta.rows());
  set.num_aps = static_cast<std::size_t>(beta.cols());
  set.antennas = antennas;
  set.beta = beta;
  set.corr.reserve(set.num_ues * set.num_aps);
  set.factors.reserve(set.num_ues * set.num_aps);
  for (std::size_t k = 0; k < set.num_ues; ++k) {
    for (std::size_t l = 0; l < set.num_aps; ++l) {
      set.corr.push_back(correlation_matrix(beta(k, l), antennas, model));
      set.factors.push_back(covariance_factor(set.corr.back()));
    }
  }
  return set;
}

ChannelSet build_channels(const NetworkLayout& layout, const ChannelConfig& cfg, std::uint64_t seed) {
  if (cfg.antennas < 1) throw ConfigError("channel.antennas must be >= 1");
  if (!(cfg.lsfc.alpha > 0.0) || !(cfg.lsfc.d_ref > 0.0) || !(cfg.lsfc.sigma_db >= 0.0)) {
    throw ConfigError("channel.lsfc needs alpha > 0, d_ref > 0, sigma_db >= 0");
  }
  ChannelSet set;
  set.num_ues = layout.num_ues();
  set.num_aps = layout.num_aps();
  set.antennas = cfg.antennas;
  set.beta.resize(static_cast<Eigen::Index>(set.num_ues), static_cast<Eigen::Index>(set.num_aps));
  Rng shadow(seed, 0x5AD0);
  for (std::size_t k = 0; k < set.num_ues; ++k) {
    for (std::size_t l = 0; l < set.num_aps; ++l) {
      // Floor at 1 m keeps co-located nodes finite.
      const double d = std::max(layout.distance(k, l), 1.0);
      const double z = cfg.lsfc.sigma_db * shadow.normal();
      set.beta(k, l) = db_to_linear(lsfc_db(cfg.lsfc, d, z));
    }
  }
  set.corr.reserve(set.num_ues * set.num_aps);
  set.factors.reserve(set.num_ues * set.num_aps);
  for (std::size_t k = 0; k < set.num_ues; ++k) {
    for (std::size_t l = 0; l < set.num_aps; ++l) {
      double phi = 0.0;
      if (cfg.correlation.kind == CorrelationKind::LocalScattering && layout.distance(k, l) > 0.0) {
        phi = bearing(layout.aps[l], layout.ues[k]);
      }
      set.corr.push_back(correlation_matrix(set.beta(k, l), cfg.antennas, cfg.correlation, phi));
      set.factors.push_back(covariance_factor(set.corr.back()));
    }
  }
  return set;
}

}  // namespace jrc
