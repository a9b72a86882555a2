#include "jrc/coverage.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <ostream>
#include <sstream>

#include "jrc/csv.hpp"
#include "jrc/errors.hpp"
#include "jrc/rng.hpp"

namespace jrc {

double range_resolution(double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("range_resolution: bandwidth must be > 0");
  return kSpeedOfLight / (2.0 * bandwidth_hz);
}

double effective_attenuation(double material_alpha, double rho, double upsilon_0) {
  if (material_alpha < 0.0 || rho < 0.0 || upsilon_0 < 0.0) {
    throw DomainError("effective_attenuation: inputs must be >= 0");
  }
  return material_alpha * rho * upsilon_0;
}

std::vector<std::string> coverage_problems(const CoverageParams& p) {
  std::vector<std::string> out;
  const auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string("coverage.") + name + " must be > 0");
  };
  positive(p.gamma, "gamma");
  positive(p.q, "q");
  positive(p.z, "z");
  positive(p.noise, "noise");
  positive(p.upsilon_t_avg, "upsilon_t_avg");
  positive(p.upsilon_c_avg, "upsilon_c_avg");
  positive(p.delta_r, "delta_r");
  if (!(p.rho >= 0.0)) out.push_back("coverage.rho must be >= 0");
  if (!(p.alpha_prime >= 0.0)) out.push_back("coverage.alpha_prime must be >= 0");
  return out;
}

namespace {

void require_valid(const CoverageParams& p, double r) {
  auto problems = coverage_problems(p);
  if (!(r > 0.0)) problems.push_back("range must be > 0");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

double path_loss(double r, double q, double alpha_prime) {
  return std::pow(r, 2.0 * q) * std::exp(2.0 * alpha_prime * r);
}

}  // namespace

double scnr_realization(double r_target, double upsilon_t, const ClutterField& clutter, const CoverageParams& params,
                        const Point2& ap) {
  if (!(r_target > 0.0)) throw DomainError("scnr_realization: target range must be > 0");
  const double signal = params.z * upsilon_t / path_loss(r_target, params.q, params.alpha_prime);
  double clutter_power = 0.0;
  for (const auto& c : clutter.scatterers) {
    const Point2 rel = c.position - ap;
    const double rc = rel.norm();
    if (rc == 0.0) throw DegenerateGeometryError("scnr_realization: scatterer at the AP position");
    const double g = params.gain ? params.gain(std::atan2(rel.y(), rel.x())) : 1.0;
    clutter_power += params.z * g * c.rcs * c.fading_gain / path_loss(rc, params.q, params.alpha_prime);
  }
  return signal / (params.noise + clutter_power);
}

namespace {

using Radial = boost::math::quadrature::gauss<double, 64>;
using Angular = boost::math::quadrature::gauss<double, 32>;

double composite_integral(double r, const CoverageParams& p, Integrand kind, int panels) {
  const double nu = p.gamma * path_loss(r, p.q, p.alpha_prime) * p.upsilon_c_avg / p.upsilon_t_avg;
  const auto integrand = [&](double rc, double g) {
    const double num = nu * g;
    const double value = num / (num + path_loss(rc, p.q, p.alpha_prime));
    return kind == Integrand::PolarMeasure ? value * rc : value;
  };
  const double dr = p.delta_r / panels;
  const auto radial = [&](double g) {
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double a = r + i * dr;
      sum += Radial::integrate([&](double rc) { return integrand(rc, g); }, a, a + dr);
    }
    return sum;
  };
  if (!p.gain) return 2.0 * kPi * radial(1.0);
  const double dtheta = 2.0 * kPi / panels;
  double sum = 0.0;
  for (int j = 0; j < panels; ++j) {
    const double a = j * dtheta;
    sum += Angular::integrate([&](double theta) { return radial(p.gain(theta)); }, a, a + dtheta);
  }
  return sum;
}

}  // namespace

double clutter_cell_integral(double r, const CoverageParams& params, const QuadratureOptions& options) {
  require_valid(params, r);
  double previous = composite_integral(r, params, options.integrand, 1);
  const double scale = std::max(params.rho, 1e-300);
  for (int level = 1, panels = 2; level <= options.max_refinements; ++level, panels *= 2) {
    const double current = composite_integral(r, params, options.integrand, panels);
    if (!std::isfinite(current)) break;
    if (scale * std::abs(current - previous) < options.tolerance) return current;
    previous = current;
  }
  std::ostringstream msg;
  msg << "clutter_cell_integral: no convergence at r = " << r << " after " << options.max_refinements
      << " refinements (last estimate " << previous << ")";
  throw NumericalError(msg.str());
}

namespace {

double pdc_closed(double r, const CoverageParams& params, const QuadratureOptions& options) {
  require_valid(params, r);
  const double noise_term =
      params.gamma * params.noise * path_loss(r, params.q, params.alpha_prime) / (params.z * params.upsilon_t_avg);
  const double clutter_term = params.rho > 0.0 ? params.rho * clutter_cell_integral(r, params, options) : 0.0;
  return std::exp(-clutter_term) * std::exp(-noise_term);
}

}  // namespace

double pdc_los(double r, const CoverageParams& params, const QuadratureOptions& options) {
  CoverageParams los = params;
  los.alpha_prime = 0.0;
  return pdc_closed(r, los, options);
}

double pdc_nlos(double r, const CoverageParams& params, const QuadratureOptions& options) {
  return pdc_closed(r, params, options);
}

McEstimate pdc_monte_carlo(double r, const CoverageParams& params, PathMode mode, std::size_t trials,
                           std::uint64_t seed, Execution exec) {
  require_valid(params, r);
  if (trials < 1) throw ConfigError("coverage.trials must be >= 1");
  const double alpha = mode == PathMode::NLoS ? params.alpha_prime : 0.0;
  const double r_out = r + params.delta_r;
  const double mean_count = params.rho * kPi * (r_out * r_out - r * r);
  const double target_loss = path_loss(r, params.q, alpha);

  std::vector<std::size_t> hits(block_count(trials), 0);
  for_each_block(trials, exec, [&](std::size_t b, std::size_t begin, std::size_t end) {
    std::size_t count = 0;
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(seed, t);
      const double upsilon_t = rng.exponential(params.upsilon_t_avg);
      const auto n = rng.poisson(mean_count);
      double clutter = 0.0;
      for (std::uint64_t c = 0; c < n; ++c) {
        const double rc = std::sqrt(rng.uniform(r * r, r_out * r_out));
        const double theta = rng.uniform(0.0, 2.0 * kPi);
        const double upsilon_c = rng.exponential(params.upsilon_c_avg);
        const double g = params.gain ? params.gain(theta) : 1.0;
        clutter += params.z * g * upsilon_c / path_loss(rc, params.q, alpha);
      }
      const double scnr = params.z * upsilon_t / target_loss / (params.noise + clutter);
      if (scnr >= params.gamma) ++count;
    }
    hits[b] = count;
  });
  std::size_t total = 0;
  for (auto h : hits) total += h;
  McEstimate est;
  est.trials = trials;
  est.p = static_cast<double>(total) / static_cast<double>(trials);
  est.stderr_ = std::sqrt(est.p * (1.0 - est.p) / static_cast<double>(trials));
  return est;
}

void write_coverage_csv(std::ostream& out, std::span<const CoverageRow> rows) {
  csv::Writer w(out, {"r_m", "rho_per_m2", "upsilon_c_avg_m2", "alpha_prime_per_m", "pdc_closed", "pdc_mc", "stderr"});
  for (const auto& row : rows) {
    w.row({row.r_m, row.rho, row.upsilon_c_avg, row.alpha_prime, row.pdc_closed, row.pdc_mc, row.stderr_});
  }
}

}  // namespace jrc
