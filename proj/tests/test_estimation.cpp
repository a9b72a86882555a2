#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "jrc/estimation.hpp"
#include "jrc/rng.hpp"

using namespace jrc;

namespace {

CMat random_psd(std::size_t n, Rng& rng) {
  CMat a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.cn01();
  return a * a.adjoint() / static_cast<double>(n);
}

}  // namespace

TEST_CASE("pilot assignment") {
  SUBCASE("distinct pilots share with nobody") {
    const auto p = assign_pilots(3, 3, 1, 0.1, true);
    for (std::size_t k = 0; k < 3; ++k) CHECK(p.sharing_set(k) == std::vector<std::size_t>{k});
  }
  SUBCASE("K=50, tau_p=10 covers every UE") {
    const auto p = assign_pilots(50, 10, 2);
    std::set<std::size_t> covered;
    for (std::size_t k = 0; k < 50; ++k) {
      CHECK(p.pilot_of[k] < 10);
      const auto v = p.sharing_set(k);
      CHECK(std::find(v.begin(), v.end(), k) != v.end());
      covered.insert(v.begin(), v.end());
      for (auto i : v) CHECK(p.sharing_set(i) == v);
    }
    CHECK(covered.size() == 50);
  }
  SUBCASE("default power is 100 mW") {
    const auto p = assign_pilots(4, 2, 3);
    for (double w : p.pilot_power) CHECK(w == 0.1);
  }
}

TEST_CASE("pilot correlation") {
  const std::vector<CMat> r{CMat::Identity(2, 2)};
  SUBCASE("single UE, tau_p p = 10, sigma2 = 1 gives 11 I") {
    const std::vector<double> power{1.0};
    CHECK((pilot_correlation(r, power, 10, 1.0) - 11.0 * CMat::Identity(2, 2)).norm() < 1e-12);
  }
  SUBCASE("noiseless single term") {
    const std::vector<double> power{0.25};
    CHECK((pilot_correlation(r, power, 4, 0.0) - r[0]).norm() < 1e-12);
  }
  SUBCASE("Phi dominates sigma2 I") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
      const std::vector<CMat> rs{random_psd(3, rng), random_psd(3, rng)};
      const std::vector<double> powers{0.1, 0.3};
      const double sigma2 = 0.5;
      const CMat phi = pilot_correlation(rs, powers, 2, sigma2);
      CHECK(min_eigenvalue(phi - sigma2 * CMat::Identity(3, 3)) > -1e-12);
    }
  }
}

TEST_CASE("B + C = R on random instances") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const CMat r = random_psd(4, rng);
    const std::vector<CMat> rs{r, random_psd(4, rng)};
    const std::vector<double> powers{0.1, 0.2};
    const CMat phi = pilot_correlation(rs, powers, 3, 0.05);
    const auto s = estimator_statistics(r, phi, 3, 0.1);
    CHECK((s.b + s.c - r).norm() <= 1e-10 * std::max(1.0, r.norm()));
    CHECK(s.b.trace().real() <= r.trace().real() + 1e-12);
  }
}

TEST_CASE("noiseless single-UE estimate recovers the channel") {
  Rng rng(2);
  const CMat r = random_psd(3, rng) + 0.1 * CMat::Identity(3, 3);
  const std::vector<CMat> rs{r};
  const std::vector<double> powers{0.1};
  const std::size_t tau_p = 4;
  const CMat phi = pilot_correlation(rs, powers, tau_p, 0.0);
  for (int i = 0; i < 10; ++i) {
    const CVec h = sample_channel(r, rng);
    const std::vector<CVec> hs{h};
    const CVec y = pilot_observation(hs, powers, tau_p, 0.0, rng);
    const auto est = mmse_estimate(y, r, phi, tau_p, 0.1);
    CHECK((est.h_hat - h).norm() < 1e-10 * h.norm());
    CHECK(std::abs(est.b.trace().real() - r.trace().real()) < 1e-10);
  }
}

TEST_CASE("estimate covariance and orthogonality by Monte Carlo") {
  Rng rng(99);
  const CMat r1 = random_psd(2, rng) + 0.2 * CMat::Identity(2, 2);
  const CMat r2 = random_psd(2, rng);
  const std::vector<CMat> rs{r1, r2};
  const std::vector<double> powers{0.1, 0.1};
  const std::size_t tau_p = 2;
  const double sigma2 = 0.02;
  const CMat phi = pilot_correlation(rs, powers, tau_p, sigma2);
  const auto stats = estimator_statistics(r1, phi, tau_p, 0.1);
  const CMat f1 = covariance_factor(r1);
  const CMat f2 = covariance_factor(r2);
  CMat cov = CMat::Zero(2, 2);
  CMat cross = CMat::Zero(2, 2);
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const std::vector<CVec> hs{sample_with_factor(f1, rng), sample_with_factor(f2, rng)};
    const CVec y = pilot_observation(hs, powers, tau_p, sigma2, rng);
    const CVec h_hat = stats.gain * y;
    const CVec err = hs[0] - h_hat;
    cov += h_hat * h_hat.adjoint();
    cross += h_hat * err.adjoint();
  }
  cov /= kDraws;
  cross /= kDraws;
  CHECK((cov - stats.b).norm() < 0.02 * std::max(1.0, r1.norm()));
  CHECK(cross.norm() < 0.02 * r1.norm());
}

TEST_CASE("pilot contamination grows the error covariance") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const CMat r = random_psd(3, rng) + 0.05 * CMat::Identity(3, 3);
    const CMat other = random_psd(3, rng) + 0.05 * CMat::Identity(3, 3);
    const std::vector<CMat> alone{r};
    const std::vector<CMat> shared{r, other};
    const std::vector<double> p1{0.1};
    const std::vector<double> p2{0.1, 0.1};
    const auto a = estimator_statistics(r, pilot_correlation(alone, p1, 2, 0.01), 2, 0.1);
    const auto b = estimator_statistics(r, pilot_correlation(shared, p2, 2, 0.01), 2, 0.1);
    CHECK(b.c.trace().real() > a.c.trace().real());
  }
}

TEST_CASE("trace(B) equals trace(R) only without noise and sharing") {
  Rng rng(7);
  const CMat r = random_psd(3, rng) + 0.1 * CMat::Identity(3, 3);
  const std::vector<CMat> rs{r};
  const std::vector<double> p{0.1};
  const auto noisy = estimator_statistics(r, pilot_correlation(rs, p, 2, 0.01), 2, 0.1);
  CHECK(noisy.b.trace().real() < r.trace().real());
}

TEST_CASE("estimation set indexes phi per pilot and AP") {
  const auto layout = generate_layout({3, 4, Rect::square(200.0)}, 3);
  ChannelConfig cfg;
  cfg.antennas = 2;
  const auto cs = build_channels(layout, cfg, 4);
  const auto pilots = assign_pilots(4, 2, 5);
  const double sigma2 = noise_power_watts(20e6);
  const auto est = build_estimators(cs, pilots, sigma2);
  CHECK(est.phi.size() == 2 * 3);
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t l = 0; l < 3; ++l) CHECK((est.at(k, l).b + est.at(k, l).c - cs.r(k, l)).norm() <= 1e-10 * cs.r(k, l).norm());
  }
}
