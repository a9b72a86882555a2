#include "jrc/aoa.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "jrc/csv.hpp"
#include "jrc/errors.hpp"
#include "jrc/rng.hpp"

namespace jrc {

namespace {

constexpr double kSingular = 1e-12;

Point2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

BaselineAngles baseline_angles(const Point2& ap1, double bearing1, const Point2& apd, double bearing_d) {
  BaselineAngles out;
  out.length = (apd - ap1).norm();
  if (out.length == 0.0) throw DegenerateGeometryError("intersect_aoa: two reports come from the same position");
  out.baseline_bearing = bearing(ap1, apd);
  out.alpha1 = wrap_pi(bearing1 - out.baseline_bearing);
  out.alpha_d = wrap_pi(out.baseline_bearing + kPi - bearing_d);
  return out;
}

Point2 baseline_intersection(double alpha1, double alpha_d, double length) {
  const double s = std::sin(alpha1 + alpha_d);
  if (std::abs(s) < kSingular) throw DegenerateGeometryError("intersect_aoa: parallel bearings");
  const double common = std::sin(alpha_d) / s * length;
  return {std::cos(alpha1) * common, std::sin(alpha1) * common};
}

PositionEstimate intersect_aoa(std::span<const Point2> ap_positions, std::span<const AoaReport> reports,
                               IntersectionMethod method) {
  if (reports.size() < 2) throw DegenerateGeometryError("intersect_aoa: need at least two AOA reports");
  for (const auto& r : reports) {
    if (r.ap >= ap_positions.size()) throw DomainError("intersect_aoa: report references an unknown AP");
  }
  PositionEstimate est;
  for (const auto& r : reports) est.used_reports.push_back(r.ap);

  if (method == IntersectionMethod::BearingLines) {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (const auto& r : reports) {
      const Point2 n(-std::sin(r.angle), std::cos(r.angle));
      a += n * n.transpose();
      b += n * n.dot(ap_positions[r.ap]);
    }
    if (std::abs(a.determinant()) < kSingular * a.squaredNorm()) {
      throw DegenerateGeometryError("intersect_aoa: bearing lines are parallel");
    }
    est.point = a.ldlt().solve(b);
    double ss = 0.0;
    for (const auto& r : reports) {
      const Point2 n(-std::sin(r.angle), std::cos(r.angle));
      ss += std::pow(n.dot(est.point - ap_positions[r.ap]), 2);
    }
    est.residual = std::sqrt(ss);
    return est;
  }

  // G = [I; I; ...], b = pair intersections in world coordinates.
  const auto pairs = static_cast<Eigen::Index>(reports.size() - 1);
  Eigen::MatrixXd g(2 * pairs, 2);
  Eigen::VectorXd b(2 * pairs);
  const Point2& p1 = ap_positions[reports[0].ap];
  for (Eigen::Index d = 0; d < pairs; ++d) {
    const auto& rd = reports[static_cast<std::size_t>(d) + 1];
    const auto ang = baseline_angles(p1, reports[0].angle, ap_positions[rd.ap], rd.angle);
    const Point2 local = baseline_intersection(ang.alpha1, ang.alpha_d, ang.length);
    const Point2 ex = unit(ang.baseline_bearing);
    const Point2 ey(-ex.y(), ex.x());
    g.block(2 * d, 0, 2, 2) = Eigen::Matrix2d::Identity();
    b.segment(2 * d, 2) = p1 + local.x() * ex + local.y() * ey;
  }
  est.point = (g.transpose() * g).ldlt().solve(g.transpose() * b);
  est.residual = (g * est.point - b).norm();
  return est;
}

Eigen::Matrix2d intersection_jacobian(double alpha1, double alpha2, double length) {
  const double s = std::sin(alpha1 + alpha2);
  if (std::abs(s) < kSingular) throw DomainError("intersection_jacobian: sin(alpha1 + alpha2) = 0");
  const double s2 = s * s;
  Eigen::Matrix2d j;
  j << -std::sin(alpha2) * std::cos(alpha2) / s2, std::sin(alpha1) * std::cos(alpha1) / s2,
      std::sin(alpha2) * std::sin(alpha2) / s2, std::sin(alpha1) * std::sin(alpha1) / s2;
  return length * j;
}

double intersection_error_area(double alpha1, double alpha2, double d_alpha1, double d_alpha2, double length) {
  const double s = std::sin(alpha1 + alpha2);
  if (std::abs(s) < kSingular) throw DomainError("intersection_error_area: sin(alpha1 + alpha2) = 0");
  return length * length * std::abs(std::sin(alpha1) * std::sin(alpha2) / (s * s * s)) * std::abs(d_alpha1 * d_alpha2);
}

std::optional<double> distance_to_open_segment(const Point2& a, const Point2& b, const Point2& p) {
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return std::nullopt;
  const double t = (p - a).dot(ab) / len2;
  if (t <= 0.0 || t >= 1.0) return std::nullopt;
  return (a + t * ab - p).norm();
}

std::optional<Point2> first_blocking_scatterer(const Point2& ap, const Point2& ue, const ClutterField& clutter,
                                               double capture_radius) {
  std::optional<Point2> best;
  double best_range = std::numeric_limits<double>::infinity();
  for (const auto& c : clutter.scatterers) {
    const auto d = distance_to_open_segment(ap, ue, c.position);
    if (!d || *d > capture_radius) continue;
    const double range = (c.position - ap).norm();
    if (range < best_range) {
      best_range = range;
      best = c.position;
    }
  }
  return best;
}

std::vector<std::size_t> detect_blocked_aps(const NetworkLayout& layout, const Point2& ue_true,
                                            const ClutterField& clutter, std::span<const std::size_t> serving,
                                            double capture_radius) {
  std::vector<std::size_t> blocked;
  for (auto l : serving) {
    if (first_blocking_scatterer(layout.aps.at(l), ue_true, clutter, capture_radius)) blocked.push_back(l);
  }
  return blocked;
}

std::vector<AoaReport> synthesize_reports(const NetworkLayout& layout, const Point2& ue_true,
                                          const ClutterField& clutter, std::span<const std::size_t> serving,
                                          double noise_std_rad, Rng& rng, double capture_radius) {
  std::vector<AoaReport> out;
  for (auto l : serving) {
    const Point2& ap = layout.aps.at(l);
    const auto blocker = first_blocking_scatterer(ap, ue_true, clutter, capture_radius);
    const double clean = bearing(ap, blocker ? *blocker : ue_true);
    const double noise = noise_std_rad * rng.normal();
    AoaReport r;
    r.ap = l;
    r.angle = wrap_two_pi(clean + noise);
    if (noise_std_rad > 0.0) r.variance = noise_std_rad * noise_std_rad;
    out.push_back(r);
  }
  return out;
}

double rmse(std::span<const Point2> estimates, const Point2& truth) {
  if (estimates.empty()) throw DomainError("rmse: no estimates");
  double ss = 0.0;
  for (const auto& e : estimates) ss += (e - truth).squaredNorm();
  return std::sqrt(ss / static_cast<double>(estimates.size()));
}

void write_rmse_csv(std::ostream& out, std::span<const RmseRow> rows) {
  csv::Writer w(out, {"trial", "noise_std_deg", "rmse_m"});
  for (const auto& r : rows) w.row({static_cast<std::uint64_t>(r.trial), r.noise_std_deg, r.rmse_m});
}

}  // namespace jrc
