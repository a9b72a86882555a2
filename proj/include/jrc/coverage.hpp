#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "jrc/linalg.hpp"
#include "jrc/parallel.hpp"
#include "jrc/topology.hpp"

namespace jrc {

/// Radar and clutter parameters of the SCNR / detection-coverage analytics.
struct CoverageParams {
  double gamma = 10.0;          // detection threshold, linear
  double q = 2.0;               // one-way path-loss exponent
  double z = 1e-6;              // radar constant p lambda^2 / (4 pi)^3, W m^2
  double noise = 1e-12;         // W
  double upsilon_t_avg = 1.0;   // mean target RCS, m^2
  double upsilon_c_avg = 0.01;  // mean clutter RCS, m^2
  double rho = 0.01;            // clutter intensity, 1/m^2
  double delta_r = 7.5;         // range resolution, m
  double alpha_prime = 0.0;     // effective attenuation, 1/m
  /// Antenna gain toward a clutter bearing; empty means isotropic (G = 1).
  std::function<double(double)> gain;
};

/// Range resolution c / (2 B).
double range_resolution(double bandwidth_hz);

/// alpha' = material_alpha * rho * upsilon_0.
double effective_attenuation(double material_alpha, double rho, double upsilon_0);

/// Lists every parameter outside its domain (empty when valid).
std::vector<std::string> coverage_problems(const CoverageParams& params);

/// SCNR of a target at range r with RCS upsilon_t against one clutter
/// realization seen from `ap`. Uses g_c and rcs from the field, gain from params,
/// and e^{-2 alpha' r} attenuation on every path when alpha' > 0.
double scnr_realization(double r_target, double upsilon_t, const ClutterField& clutter, const CoverageParams& params,
                        const Point2& ap = Point2::Zero());

enum class Integrand {
  PolarMeasure,    // nu G r / (nu G + r^{2q})
  NoPolarMeasure,  // nu G / (nu G + r^{2q}), i.e. without the polar-area factor r
};

struct QuadratureOptions {
  Integrand integrand = Integrand::PolarMeasure;
  /// Absolute tolerance on rho times the cell integral (and hence on P_dc).
  double tolerance = 1e-8;
  int max_refinements = 10;
};

/// Cell integral over [r, r + delta_r] x [0, 2 pi) (without the rho factor).
/// alpha' from params enters both nu' and the clutter term; alpha' = 0 gives the LoS form.
double clutter_cell_integral(double r, const CoverageParams& params, const QuadratureOptions& options = {});

/// Detection coverage with LoS to the target.
double pdc_los(double r, const CoverageParams& params, const QuadratureOptions& options = {});

/// Detection coverage through attenuating clutter (alpha' from params).
double pdc_nlos(double r, const CoverageParams& params, const QuadratureOptions& options = {});

enum class PathMode { LoS, NLoS };

struct McEstimate {
  double p = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
};

/// Fraction of PPP realizations on the annulus [r, r + delta_r] with SCNR >= gamma.
McEstimate pdc_monte_carlo(double r, const CoverageParams& params, PathMode mode, std::size_t trials,
                           std::uint64_t seed, Execution exec = Execution::Parallel);

struct CoverageRow {
  double r_m = 0.0;
  double rho = 0.0;
  double upsilon_c_avg = 0.0;
  double alpha_prime = 0.0;
  double pdc_closed = 0.0;
  double pdc_mc = 0.0;
  double stderr_ = 0.0;
};

/// CSV: r_m,rho_per_m2,upsilon_c_avg_m2,alpha_prime_per_m,pdc_closed,pdc_mc,stderr.
void write_coverage_csv(std::ostream& out, std::span<const CoverageRow> rows);

}  // namespace jrc
