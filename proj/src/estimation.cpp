#include "jrc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jrc/errors.hpp"
#include "jrc/rng.hpp"

namespace jrc {

std::vector<std::size_t> PilotAssignment::sharing_set(std::size_t k) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pilot_of.size(); ++i) {
    if (pilot_of[i] == pilot_of[k]) out.push_back(i);
  }
  return out;
}

PilotAssignment assign_pilots(std::size_t num_ues, std::size_t tau_p, std::uint64_t seed, double pilot_power,
                              bool distinct) {
  if (tau_p < 1) throw ConfigError("estimation.tau_p must be >= 1");
  if (!(pilot_power >= 0.0)) throw ConfigError("estimation.pilot_power must be >= 0");
  if (distinct && num_ues > tau_p) throw ConfigError("distinct pilots need K <= tau_p");
  PilotAssignment pa;
  pa.tau_p = tau_p;
  pa.pilot_power.assign(num_ues, pilot_power);
  pa.pilot_of.resize(num_ues);
  Rng rng(seed);
  if (distinct) {
    std::vector<std::size_t> pool(tau_p);
    std::iota(pool.begin(), pool.end(), 0);
    // Fisher-Yates with our own index draws, so the result is stdlib independent.
    for (std::size_t i = tau_p; i > 1; --i) std::swap(pool[i - 1], pool[rng.uniform_index(i)]);
    std::copy_n(pool.begin(), num_ues, pa.pilot_of.begin());
  } else {
    for (auto& t : pa.pilot_of) t = rng.uniform_index(tau_p);
  }
  return pa;
}

CMat pilot_correlation(std::span<const CMat> corr, std::span<const double> powers, std::size_t tau_p,
                       double sigma2) {
  if (corr.empty()) throw DomainError("pilot_correlation: empty sharing set");
  if (corr.size() != powers.size()) throw DomainError("pilot_correlation: powers/correlations size mismatch");
  const auto n = corr.front().rows();
  CMat phi = CMat::Identity(n, n) * sigma2;
  for (std::size_t i = 0; i < corr.size(); ++i) {
    if (corr[i].rows() != n || corr[i].cols() != n) {
      throw DomainError("pilot_correlation: correlation matrices differ in dimension");
    }
    phi += static_cast<double>(tau_p) * powers[i] * corr[i];
  }
  return phi;
}

EstimatorStats estimator_statistics(const CMat& r, const CMat& phi, std::size_t tau_p, double power) {
  if (phi.rows() != r.rows()) throw DomainError("estimator_statistics: dimension mismatch");
  Eigen::LDLT<CMat> ldlt(phi);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().real().minCoeff() <= 1e-14 * ldlt.vectorD().real().cwiseAbs().maxCoeff()) {
    throw NumericalError("mmse: pilot correlation matrix is singular");
  }
  const double scale = std::sqrt(static_cast<double>(tau_p) * power);
  EstimatorStats st;
  // R Phi^-1 = (Phi^-1 R)^H since both are Hermitian.
  const CMat phi_inv_r = ldlt.solve(r);
  st.gain = scale * phi_inv_r.adjoint();
  st.b = static_cast<double>(tau_p) * power * r * phi_inv_r;
  st.b = 0.5 * (st.b + st.b.adjoint()).eval();
  st.c = r - st.b;
  return st;
}

EstimateStats mmse_estimate(const CVec& y_pilot, const CMat& r, const CMat& phi, std::size_t tau_p, double power) {
  if (y_pilot.size() != r.rows()) throw DomainError("mmse_estimate: y dimension mismatch");
  auto st = estimator_statistics(r, phi, tau_p, power);
  return {st.gain * y_pilot, std::move(st.b), std::move(st.c)};
}

EstimationSet build_estimators(const ChannelSet& channels, const PilotAssignment& pilots, double sigma2) {
  if (pilots.num_ues() != channels.num_ues) throw DomainError("build_estimators: pilot assignment size mismatch");
  EstimationSet set;
  set.num_ues = channels.num_ues;
  set.num_aps = channels.num_aps;
  set.phi.resize(pilots.tau_p * channels.num_aps);
  for (std::size_t t = 0; t < pilots.tau_p; ++t) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < pilots.num_ues(); ++i) {
      if (pilots.pilot_of[i] == t) members.push_back(i);
    }
    if (members.empty()) continue;
    for (std::size_t l = 0; l < channels.num_aps; ++l) {
      std::vector<CMat> rs;
      std::vector<double> ps;
      for (auto i : members) {
        rs.push_back(channels.r(i, l));
        ps.push_back(pilots.pilot_power[i]);
      }
      set.phi[t * channels.num_aps + l] = pilot_correlation(rs, ps, pilots.tau_p, sigma2);
    }
  }
  set.stats.reserve(channels.num_ues * channels.num_aps);
  for (std::size_t k = 0; k < channels.num_ues; ++k) {
    for (std::size_t l = 0; l < channels.num_aps; ++l) {
      set.stats.push_back(estimator_statistics(channels.r(k, l), set.phi[pilots.pilot_of[k] * channels.num_aps + l],
                                               pilots.tau_p, pilots.pilot_power[k]));
    }
  }
  return set;
}

CVec pilot_observation(std::span<const CVec> channels, std::span<const double> powers, std::size_t tau_p,
                       double sigma2, Rng& rng) {
  if (channels.empty()) throw DomainError("pilot_observation: no transmitting UEs");
  const auto n = channels.front().size();
  CVec y(n);
  const double noise_std = std::sqrt(sigma2);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = noise_std * rng.cn01();
  for (std::size_t i = 0; i < channels.size(); ++i) {
    y += std::sqrt(static_cast<double>(tau_p) * powers[i]) * channels[i];
  }
  return y;
}

}  // namespace jrc
