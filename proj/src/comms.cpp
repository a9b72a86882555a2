#include "jrc/comms.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "jrc/csv.hpp"
#include "jrc/errors.hpp"
#include "jrc/rng.hpp"

namespace jrc {

CVec mr_precoder(const CVec& h_hat, double power, double expected_energy) {
  if (!(expected_energy > 0.0)) throw DegenerateGeometryError("mr_precoder: estimate has zero expected energy");
  if (!(power >= 0.0)) throw DomainError("mr_precoder: power must be >= 0");
  return std::sqrt(power / expected_energy) * h_hat;
}

double normalize_ap_power(std::span<CVec> precoders) {
  double total = 0.0;
  for (const auto& w : precoders) total += w.squaredNorm();
  if (total <= 1.0) return 1.0;
  const double factor = 1.0 / std::sqrt(total);
  for (auto& w : precoders) w *= factor;
  return factor;
}

namespace {

CMat lp_mmse_gram(std::span<const std::size_t> served, std::span<const CVec> h_hat, std::span<const CMat> err_cov,
                  std::span<const double> powers, double sigma2, Eigen::Index n) {
  CMat m = sigma2 * CMat::Identity(n, n);
  for (auto i : served) {
    m.noalias() += powers[i] * (h_hat[i] * h_hat[i].adjoint() + err_cov[i]);
  }
  return m;
}

}  // namespace

CVec lp_mmse_combiner(std::size_t k, std::span<const std::size_t> served, std::span<const CVec> h_hat,
                      std::span<const CMat> err_cov, std::span<const double> powers, double sigma2) {
  if (std::find(served.begin(), served.end(), k) == served.end()) {
    throw ContractViolation("lp_mmse_combiner: UE " + std::to_string(k) + " is not served by this AP");
  }
  if (h_hat.size() != err_cov.size() || h_hat.size() != powers.size()) {
    throw DomainError("lp_mmse_combiner: per-UE inputs differ in length");
  }
  const CMat m = lp_mmse_gram(served, h_hat, err_cov, powers, sigma2, h_hat[k].size());
  Eigen::LDLT<CMat> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw NumericalError("lp_mmse_combiner: singular regularized Gram matrix");
  return powers[k] * ldlt.solve(h_hat[k]);
}

namespace {

struct Moments {
  std::vector<CVec> v;
  std::vector<CMat> interference;
  std::vector<RVec> lambda2;

  Moments& operator+=(const Moments& o) {
    if (v.empty()) return *this = o;
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] += o.v[k];
      interference[k] += o.interference[k];
      lambda2[k] += o.lambda2[k];
    }
    return *this;
  }
};

Moments zero_moments(const std::vector<std::vector<std::size_t>>& serving) {
  Moments m;
  for (const auto& mk : serving) {
    const auto n = static_cast<Eigen::Index>(mk.size());
    m.v.push_back(CVec::Zero(n));
    m.interference.push_back(CMat::Zero(n, n));
    m.lambda2.push_back(RVec::Zero(n));
  }
  return m;
}

class TrialKernel {
 public:
  TrialKernel(const ChannelSet& ch, const PilotAssignment& pilots, const EstimationSet& est, const AssociationMatrix& s,
              double sigma2, CombinerKind combiner)
      : ch_(ch), pilots_(pilots), est_(est), sigma2_(sigma2), combiner_(combiner) {
    for (std::size_t k = 0; k < ch.num_ues; ++k) serving_.push_back(s.serving_aps(k));
    for (std::size_t l = 0; l < ch.num_aps; ++l) served_.push_back(s.served_ues(l));
    for (std::size_t i = 0; i < ch.num_ues; ++i) {
      for (std::size_t l = 0; l < ch.num_aps; ++l) err_cov_.push_back(est.at(i, l).c);
    }
  }

  const std::vector<std::vector<std::size_t>>& serving() const { return serving_; }

  void run(Rng& rng, Moments& acc) const {
    const auto num_ues = ch_.num_ues;
    const auto num_aps = ch_.num_aps;
    const auto n = static_cast<Eigen::Index>(ch_.antennas);
    const auto& p = pilots_.pilot_power;

    std::vector<CMat> h(num_aps, CMat(n, static_cast<Eigen::Index>(num_ues)));
    for (std::size_t l = 0; l < num_aps; ++l) {
      for (std::size_t i = 0; i < num_ues; ++i) h[l].col(static_cast<Eigen::Index>(i)) = sample_with_factor(ch_.factor(i, l), rng);
    }

    // Pilot-matched observations and the resulting estimates.
    const double noise_std = std::sqrt(sigma2_);
    std::vector<CVec> h_hat(num_ues * num_aps);
    for (std::size_t l = 0; l < num_aps; ++l) {
      std::vector<CVec> y(pilots_.tau_p);
      for (std::size_t t = 0; t < pilots_.tau_p; ++t) {
        y[t].resize(n);
        for (Eigen::Index a = 0; a < n; ++a) y[t](a) = noise_std * rng.cn01();
      }
      for (std::size_t i = 0; i < num_ues; ++i) {
        y[pilots_.pilot_of[i]] += std::sqrt(static_cast<double>(pilots_.tau_p) * p[i]) * h[l].col(static_cast<Eigen::Index>(i));
      }
      for (std::size_t i = 0; i < num_ues; ++i) h_hat[i * num_aps + l] = est_.at(i, l).gain * y[pilots_.pilot_of[i]];
    }

    // Combiners a_kl for k in D_l.
    std::vector<CVec> a(num_ues * num_aps);
    for (std::size_t l = 0; l < num_aps; ++l) {
      if (served_[l].empty()) continue;
      if (combiner_ == CombinerKind::MR) {
        for (auto k : served_[l]) a[k * num_aps + l] = h_hat[k * num_aps + l];
        continue;
      }
      CMat m = sigma2_ * CMat::Identity(n, n);
      for (auto i : served_[l]) {
        const auto& hh = h_hat[i * num_aps + l];
        m.noalias() += p[i] * (hh * hh.adjoint() + err_cov_[i * num_aps + l]);
      }
      Eigen::LDLT<CMat> ldlt(m);
      if (ldlt.info() != Eigen::Success) throw NumericalError("sinr terms: singular LP-MMSE Gram matrix");
      for (auto k : served_[l]) a[k * num_aps + l] = p[k] * ldlt.solve(h_hat[k * num_aps + l]);
    }

    Eigen::RowVectorXcd sqrt_p(static_cast<Eigen::Index>(num_ues));
    for (std::size_t i = 0; i < num_ues; ++i) sqrt_p(static_cast<Eigen::Index>(i)) = std::sqrt(p[i]);
    for (std::size_t k = 0; k < num_ues; ++k) {
      const auto& mk = serving_[k];
      if (mk.empty()) continue;
      CMat g(static_cast<Eigen::Index>(mk.size()), static_cast<Eigen::Index>(num_ues));
      for (std::size_t m = 0; m < mk.size(); ++m) {
        const auto l = mk[m];
        const auto& akl = a[k * num_aps + l];
        const auto row = static_cast<Eigen::Index>(m);
        g.row(row) = akl.adjoint() * h[l];
        acc.v[k](row) += g(row, static_cast<Eigen::Index>(k));
        acc.lambda2[k](row) += akl.squaredNorm();
      }
      g.array().rowwise() *= sqrt_p.array();
      acc.interference[k].noalias() += g * g.adjoint();
    }
  }

 private:
  const ChannelSet& ch_;
  const PilotAssignment& pilots_;
  const EstimationSet& est_;
  double sigma2_;
  CombinerKind combiner_;
  std::vector<std::vector<std::size_t>> serving_;
  std::vector<std::vector<std::size_t>> served_;
  std::vector<CMat> err_cov_;
};

}  // namespace

SinrTerms estimate_sinr_terms(const ChannelSet& channels, const PilotAssignment& pilots, const EstimationSet& est,
                              const AssociationMatrix& s, double sigma2, const SinrOptions& options,
                              std::uint64_t seed) {
  if (options.n_mc < 1) throw ConfigError("comms.n_mc must be >= 1");
  if (s.num_ues() != channels.num_ues || s.num_aps() != channels.num_aps || pilots.num_ues() != channels.num_ues) {
    throw DomainError("estimate_sinr_terms: inconsistent K or L across inputs");
  }
  const TrialKernel kernel(channels, pilots, est, s, sigma2, options.combiner);
  std::vector<Moments> partial(block_count(options.n_mc));
  for_each_block(options.n_mc, options.exec, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Moments acc = zero_moments(kernel.serving());
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(seed, t);
      kernel.run(rng, acc);
    }
    partial[b] = std::move(acc);
  });
  Moments total = pairwise_reduce(std::move(partial));

  SinrTerms terms;
  terms.num_aps = channels.num_aps;
  terms.serving = kernel.serving();
  terms.powers = pilots.pilot_power;
  terms.sigma2 = sigma2;
  const double inv_n = 1.0 / static_cast<double>(options.n_mc);
  for (std::size_t k = 0; k < terms.num_ues(); ++k) {
    CVec v = total.v[k] * inv_n;
    CMat interference = total.interference[k] * inv_n;
    RVec l2 = total.lambda2[k] * inv_n;
    if (options.equal_ap_power) {
      RVec c(l2.size());
      for (Eigen::Index m = 0; m < l2.size(); ++m) {
        const auto load = static_cast<double>(s.load(terms.serving[k][static_cast<std::size_t>(m)]));
        c(m) = l2(m) > 0.0 ? 1.0 / std::sqrt(load * l2(m)) : 0.0;
      }
      v = v.cwiseProduct(c.cast<cplx>());
      interference = c.asDiagonal() * interference * c.asDiagonal();
      l2 = l2.cwiseProduct(c).cwiseProduct(c);
    }
    terms.v.push_back(std::move(v));
    terms.interference.push_back(std::move(interference));
    terms.lambda2.push_back(std::move(l2));
  }
  return terms;
}

namespace {

CMat denominator_matrix(const SinrTerms& terms, std::size_t k) {
  const auto& v = terms.v[k];
  CMat a = terms.interference[k] - terms.powers[k] * v * v.adjoint();
  a.diagonal() += (terms.sigma2 * terms.lambda2[k]).cast<cplx>();
  return 0.5 * (a + a.adjoint());
}

}  // namespace

CVec cpu_weights(WeightScheme scheme, const SinrTerms& terms, std::size_t k) {
  const auto& mk = terms.serving[k];
  CVec w = CVec::Zero(static_cast<Eigen::Index>(terms.num_aps));
  if (mk.empty()) return w;
  CVec sub;
  if (scheme == WeightScheme::Equal) {
    sub = CVec::Ones(static_cast<Eigen::Index>(mk.size()));
  } else {
    // Generalized Rayleigh quotient |w^H v|^2 / w^H A w is maximized by A^-1 v.
    const CMat a = denominator_matrix(terms, k);
    Eigen::LDLT<CMat> ldlt(a);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      sub = ldlt.solve(terms.v[k]);
    } else {
      sub = a.completeOrthogonalDecomposition().solve(terms.v[k]);
    }
    if (!sub.allFinite() || sub.squaredNorm() == 0.0) sub = CVec::Ones(static_cast<Eigen::Index>(mk.size()));
  }
  for (std::size_t m = 0; m < mk.size(); ++m) w(static_cast<Eigen::Index>(mk[m])) = sub(static_cast<Eigen::Index>(m));
  return w;
}

double sinr(const SinrTerms& terms, std::size_t k, const CVec& w) {
  if (static_cast<std::size_t>(w.size()) != terms.num_aps) throw DomainError("sinr: weight vector must have length L");
  const auto& mk = terms.serving[k];
  if (mk.empty() || terms.powers[k] == 0.0) return 0.0;
  CVec sub(static_cast<Eigen::Index>(mk.size()));
  for (std::size_t m = 0; m < mk.size(); ++m) sub(static_cast<Eigen::Index>(m)) = w(static_cast<Eigen::Index>(mk[m]));
  const double num = terms.powers[k] * std::norm(sub.dot(terms.v[k]));
  const double den = sub.dot(denominator_matrix(terms, k) * sub).real();
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw NumericalError("sinr: nonpositive denominator for UE " + std::to_string(k));
  }
  return num / den;
}

double spectral_efficiency(double sinr_linear, std::size_t tau_p, std::size_t tau_c) {
  if (tau_p == 0 || tau_p >= tau_c) throw ConfigError("spectral efficiency needs 0 < tau_p < tau_c");
  if (!(sinr_linear >= 0.0)) throw DomainError("spectral_efficiency: SINR must be >= 0");
  return (1.0 - static_cast<double>(tau_p) / static_cast<double>(tau_c)) * std::log2(1.0 + sinr_linear);
}

std::vector<double> uplink_se(const SinrTerms& terms, WeightScheme scheme, std::size_t tau_p, std::size_t tau_c) {
  std::vector<double> se(terms.num_ues());
  for (std::size_t k = 0; k < se.size(); ++k) {
    se[k] = spectral_efficiency(sinr(terms, k, cpu_weights(scheme, terms, k)), tau_p, tau_c);
  }
  return se;
}

void write_se_csv(std::ostream& out, std::span<const double> se) {
  csv::Writer w(out, {"ue_id", "se_bits_per_hz"});
  for (std::size_t k = 0; k < se.size(); ++k) w.row({static_cast<std::uint64_t>(k), se[k]});
}

}  // namespace jrc
