#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "jrc/linalg.hpp"
#include "jrc/topology.hpp"

namespace jrc {

class Rng;

/// Bearing of an echo as seen from one AP, in the world frame ([0, 2 pi), from +x toward +y).
struct AoaReport {
  std::size_t ap = 0;
  double angle = 0.0;
  std::optional<double> variance;
};

struct PositionEstimate {
  Point2 point = Point2::Zero();
  double residual = 0.0;  // m
  std::vector<std::size_t> used_reports;
};

enum class IntersectionMethod {
  PairwiseMean,  // G stacks identities, b stacks the intersections of AP 1 with every other AP
  BearingLines,  // least-squares point closest to every bearing line
};

/// Least-squares intersection of the bearings. The first report is the reference AP;
/// each other report forms a baseline with it. Throws DegenerateGeometryError on
/// parallel bearings or fewer than two reports.
PositionEstimate intersect_aoa(std::span<const Point2> ap_positions, std::span<const AoaReport> reports,
                               IntersectionMethod method = IntersectionMethod::PairwiseMean);

/// Interior angles of a baseline pair. alpha1 is measured at AP 1 from the baseline
/// toward AP d, alpha_d at AP d from the baseline back toward AP 1, both signed toward the same side.
struct BaselineAngles {
  double alpha1 = 0.0;
  double alpha_d = 0.0;
  double length = 0.0;
  double baseline_bearing = 0.0;
};

BaselineAngles baseline_angles(const Point2& ap1, double bearing1, const Point2& apd, double bearing_d);

/// Intersection (x, y) in the baseline frame: x along AP 1 -> AP d, y to its left.
Point2 baseline_intersection(double alpha1, double alpha_d, double length);

/// d(x, y) / d(alpha1, alpha2) of the baseline intersection.
Eigen::Matrix2d intersection_jacobian(double alpha1, double alpha2, double length);

/// L^2 |sin a1 sin a2 / sin^3(a1 + a2)| |d_alpha1 d_alpha2|. DomainError when sin(a1 + a2) = 0.
double intersection_error_area(double alpha1, double alpha2, double d_alpha1, double d_alpha2, double length);

/// Distance from p to the segment a-b, or nullopt when p projects outside the open segment.
std::optional<double> distance_to_open_segment(const Point2& a, const Point2& b, const Point2& p);

/// Scatterer closest to `ap` among those within `capture_radius` of the open segment ap -> ue.
std::optional<Point2> first_blocking_scatterer(const Point2& ap, const Point2& ue, const ClutterField& clutter,
                                               double capture_radius = 1.0);

/// APs in `serving` whose ray to the UE passes within `capture_radius` of a scatterer.
std::vector<std::size_t> detect_blocked_aps(const NetworkLayout& layout, const Point2& ue_true,
                                            const ClutterField& clutter, std::span<const std::size_t> serving,
                                            double capture_radius = 1.0);

/// Synthetic AOA reports: a blocked AP reports the bearing of its first blocking
/// scatterer, every bearing gets N(0, noise_std_rad^2) noise.
std::vector<AoaReport> synthesize_reports(const NetworkLayout& layout, const Point2& ue_true,
                                          const ClutterField& clutter, std::span<const std::size_t> serving,
                                          double noise_std_rad, Rng& rng, double capture_radius = 1.0);

/// sqrt(mean |est - truth|^2). DomainError on an empty list.
double rmse(std::span<const Point2> estimates, const Point2& truth);

struct RmseRow {
  std::size_t trial = 0;
  double noise_std_deg = 0.0;
  double rmse_m = 0.0;
};

/// CSV: trial,noise_std_deg,rmse_m.
void write_rmse_csv(std::ostream& out, std::span<const RmseRow> rows);

}  // namespace jrc
