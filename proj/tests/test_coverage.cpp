#include <doctest.h>

#include <cmath>
#include <sstream>

#include "jrc/coverage.hpp"
#include "jrc/errors.hpp"

using namespace jrc;

namespace {

double snr(double r, const CoverageParams& p, double upsilon_t) {
  return p.z * upsilon_t / (std::pow(r, 2.0 * p.q) * p.noise);
}

}  // namespace

TEST_CASE("SCNR of a single realization") {
  CoverageParams p;
  ClutterField none;
  SUBCASE("empty clutter is the SNR") {
    CHECK(scnr_realization(20.0, 1.3, none, p) == doctest::Approx(snr(20.0, p, 1.3)).epsilon(1e-14));
    auto doubled = p;
    doubled.noise *= 2.0;
    CHECK(scnr_realization(20.0, 1.3, none, doubled) == doctest::Approx(0.5 * snr(20.0, p, 1.3)).epsilon(1e-14));
  }
  SUBCASE("one scatterer at the target range with the target's RCS") {
    ClutterField one;
    one.scatterers.push_back({Point2(20.0, 0.0), 1.3, 1.0});
    const double signal = p.z * 1.3 / std::pow(20.0, 4.0);
    CHECK(scnr_realization(20.0, 1.3, one, p) == doctest::Approx(signal / (p.noise + signal)).epsilon(1e-14));
  }
  SUBCASE("attenuation on both paths") {
    ClutterField one;
    one.scatterers.push_back({Point2(0.0, 25.0), 0.5, 1.0});
    p.alpha_prime = 0.01;
    const double s = p.z * 2.0 / std::pow(20.0, 4.0) * std::exp(-0.4);
    const double c = p.z * 0.5 / std::pow(25.0, 4.0) * std::exp(-0.5);
    CHECK(scnr_realization(20.0, 2.0, one, p) == doctest::Approx(s / (p.noise + c)).epsilon(1e-13));
  }
}

TEST_CASE("effective attenuation") {
  CHECK(effective_attenuation(0.5, 0.1, 0.2) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(effective_attenuation(0.0, 0.1, 0.2) == 0.0);
  CHECK(effective_attenuation(0.5, 0.0, 0.2) == 0.0);
  CHECK(effective_attenuation(1.0, 0.1, 0.2) == doctest::Approx(2.0 * effective_attenuation(0.5, 0.1, 0.2)));
  CHECK(range_resolution(20e6) == doctest::Approx(7.4948).epsilon(1e-4));
}

TEST_CASE("clutter-free coverage is the exponential tail") {
  CoverageParams p;
  p.rho = 0.0;
  for (double r : {5.0, 12.0, 30.0}) {
    const double expected = std::exp(-p.gamma * p.noise * std::pow(r, 2 * p.q) / (p.z * p.upsilon_t_avg));
    CHECK(std::abs(pdc_los(r, p) - expected) <= 1e-12);
    CHECK(std::abs(pdc_nlos(r, p) - expected) <= 1e-12);
  }
}

TEST_CASE("coverage limits and bounds") {
  CoverageParams p;
  p.gamma = 1e-12;
  CHECK(pdc_los(20.0, p) == doctest::Approx(1.0).epsilon(1e-9));
  for (double gamma : {0.1, 10.0, 1e3}) {
    for (double rho : {0.001, 0.1}) {
      CoverageParams q;
      q.gamma = gamma;
      q.rho = rho;
      q.alpha_prime = 0.02;
      for (double r : {1.0, 10.0, 60.0}) {
        CHECK(pdc_los(r, q) >= 0.0);
        CHECK(pdc_los(r, q) <= 1.0);
        CHECK(pdc_nlos(r, q) >= 0.0);
        CHECK(pdc_nlos(r, q) <= 1.0);
      }
    }
  }
}

TEST_CASE("zero attenuation reduces NLoS to LoS exactly") {
  CoverageParams p;
  p.rho = 0.05;
  p.alpha_prime = 0.0;
  for (double r : {5.0, 20.0, 45.0}) CHECK(pdc_nlos(r, p) == pdc_los(r, p));
}

TEST_CASE("attenuation lowers coverage where noise dominates") {
  // With rho = 0 only the noise factor remains, which e^{2 alpha' r} strictly worsens.
  // With dense, strong clutter the clutter factor improves with alpha' instead; see README.
  CoverageParams p;
  p.rho = 0.0;
  p.alpha_prime = 0.01;
  for (double r : {5.0, 20.0, 45.0}) {
    auto los = p;
    los.alpha_prime = 0.0;
    CHECK(pdc_nlos(r, p) < pdc_los(r, los));
  }
}

TEST_CASE("attenuation can raise coverage when dense clutter dominates") {
  // The clutter term carries e^{2 alpha' (r_t - r_c)} <= 1, so strong near-range clutter
  // is suppressed more than the target. The oracle agrees with the closed form.
  CoverageParams p;
  p.rho = 0.1;
  p.upsilon_c_avg = 0.005;
  auto nlos = p;
  nlos.alpha_prime = 0.02;
  CHECK(pdc_nlos(5.0, nlos) > pdc_los(5.0, p));
  const auto a = pdc_monte_carlo(5.0, p, PathMode::LoS, 100000, 11);
  const auto b = pdc_monte_carlo(5.0, nlos, PathMode::NLoS, 100000, 12);
  CHECK(b.p - a.p > 3.0 * std::hypot(a.stderr_, b.stderr_));
}

TEST_CASE("coverage is nonincreasing in r, rho, upsilon_c and gamma") {
  CoverageParams base;
  for (double r = 5.0; r < 50.0; r += 5.0) CHECK(pdc_los(r + 5.0, base) <= pdc_los(r, base));
  double prev = 1.0;
  for (double rho : {0.0, 0.01, 0.05, 0.1}) {
    auto p = base;
    p.rho = rho;
    CHECK(pdc_los(15.0, p) <= prev);
    prev = pdc_los(15.0, p);
  }
  prev = 1.0;
  for (double uc : {0.005, 0.01, 0.05, 0.1}) {
    auto p = base;
    p.upsilon_c_avg = uc;
    CHECK(pdc_los(15.0, p) <= prev);
    prev = pdc_los(15.0, p);
  }
  prev = 1.0;
  for (double g : {1.0, 3.0, 10.0, 30.0}) {
    auto p = base;
    p.gamma = g;
    CHECK(pdc_los(15.0, p) <= prev);
    prev = pdc_los(15.0, p);
  }
}

TEST_CASE("isotropic gain: angular integral separates") {
  CoverageParams iso;
  iso.upsilon_c_avg = 0.5;
  auto flat = iso;
  flat.gain = [](double) { return 1.0; };
  for (double r : {5.0, 20.0}) {
    const double a = clutter_cell_integral(r, iso);
    const double b = clutter_cell_integral(r, flat);
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
  }
}

TEST_CASE("directional gain shrinks the clutter integral") {
  CoverageParams iso;
  auto beam = iso;
  beam.gain = [](double theta) { return 0.5 * (1.0 + std::cos(theta)); };
  CHECK(clutter_cell_integral(10.0, beam) < clutter_cell_integral(10.0, iso));
}

TEST_CASE("quadrature that cannot settle reports a numerical error") {
  CoverageParams p;
  QuadratureOptions q;
  q.tolerance = 0.0;
  q.max_refinements = 2;
  CHECK_THROWS_AS(clutter_cell_integral(10.0, p, q), NumericalError);
}

TEST_CASE("invalid parameters are rejected with every problem listed") {
  CoverageParams p;
  p.gamma = -1.0;
  p.z = 0.0;
  try {
    pdc_los(10.0, p);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 2);
  }
}

TEST_CASE("Monte Carlo oracle") {
  SUBCASE("clutter-free half-coverage point") {
    CoverageParams p;
    p.rho = 0.0;
    const double r = 20.0;
    p.gamma = std::log(2.0) * p.z * p.upsilon_t_avg / (p.noise * std::pow(r, 2 * p.q));
    CHECK(pdc_los(r, p) == doctest::Approx(0.5).epsilon(1e-12));
    const auto mc = pdc_monte_carlo(r, p, PathMode::LoS, 40000, 3);
    CHECK(std::abs(mc.p - 0.5) <= 3.0 * mc.stderr_);
  }
  SUBCASE("a single trial is 0 or 1") {
    const auto mc = pdc_monte_carlo(10.0, {}, PathMode::LoS, 1, 1);
    CHECK((mc.p == 0.0 || mc.p == 1.0));
  }
  SUBCASE("serial reference equals the parallel kernel") {
    CoverageParams p;
    p.rho = 0.05;
    const auto a = pdc_monte_carlo(10.0, p, PathMode::NLoS, 5000, 8, Execution::Parallel);
    const auto b = pdc_monte_carlo(10.0, p, PathMode::NLoS, 5000, 8, Execution::Serial);
    CHECK(a.p == b.p);
    CHECK(a.stderr_ == b.stderr_);
  }
  SUBCASE("averaged over seeds the estimate does not grow with rho") {
    double prev = 1.0;
    for (double rho : {0.0, 0.02, 0.05, 0.1}) {
      CoverageParams p;
      p.rho = rho;
      double mean = 0.0;
      for (int s = 0; s < 4; ++s) mean += pdc_monte_carlo(8.0, p, PathMode::LoS, 10000, 100 + s).p / 4.0;
      CHECK(mean <= prev + 0.01);
      prev = mean;
    }
  }
}

TEST_CASE("closed forms agree with the oracle at the reference point") {
  CoverageParams p;
  p.upsilon_c_avg = 0.5;
  p.rho = 0.05;
  const auto los = pdc_monte_carlo(20.0, p, PathMode::LoS, 100000, 1);
  CHECK(std::abs(pdc_los(20.0, p) - los.p) <= 0.01);
  p.alpha_prime = 0.01;
  const auto nlos = pdc_monte_carlo(20.0, p, PathMode::NLoS, 100000, 2);
  CHECK(std::abs(pdc_nlos(20.0, p) - nlos.p) <= 0.01);
}

TEST_CASE("the oracle selects the integrand with the polar measure") {
  CoverageParams p;
  p.upsilon_c_avg = 0.05;
  p.rho = 0.05;
  const double r = 10.0;
  const auto mc = pdc_monte_carlo(r, p, PathMode::LoS, 100000, 4);
  QuadratureOptions polar;
  QuadratureOptions no_polar;
  no_polar.integrand = Integrand::NoPolarMeasure;
  const double tol = 0.01 + 3.0 * mc.stderr_;
  CHECK(std::abs(pdc_los(r, p, polar) - mc.p) <= tol);
  CHECK(std::abs(pdc_los(r, p, no_polar) - mc.p) > tol);
}

TEST_CASE("coverage CSV header") {
  std::ostringstream out;
  const std::vector<CoverageRow> rows{{5.0, 0.01, 0.01, 0.0, 0.9, 0.89, 0.001}};
  write_coverage_csv(out, rows);
  CHECK(out.str().rfind("r_m,rho_per_m2,upsilon_c_avg_m2,alpha_prime_per_m,pdc_closed,pdc_mc,stderr\n", 0) == 0);
}
