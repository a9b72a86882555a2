#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "jrc/linalg.hpp"

namespace jrc {

/// Axis-aligned rectangle in meters.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool contains(const Point2& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  static Rect square(double side) { return {0.0, 0.0, side, side}; }
};

/// Ring r_inner <= |p - center| <= r_outer around a point.
struct Annulus {
  Point2 center = Point2::Zero();
  double r_inner = 0.0;
  double r_outer = 0.0;

  double area() const { return kPi * (r_outer * r_outer - r_inner * r_inner); }
  bool contains(const Point2& p) const {
    const double r = (p - center).norm();
    return r >= r_inner && r <= r_outer;
  }
};

using Region = std::variant<Rect, Annulus>;

double region_area(const Region& region);
bool region_contains(const Region& region, const Point2& p);
/// Uniform point on the region.
class Rng;
Point2 sample_uniform(const Region& region, Rng& rng);

struct NetworkLayout {
  std::vector<Point2> aps;
  std::vector<Point2> ues;
  Rect area;

  std::size_t num_aps() const { return aps.size(); }
  std::size_t num_ues() const { return ues.size(); }
  double distance(std::size_t ue, std::size_t ap) const { return (ues[ue] - aps[ap]).norm(); }
};

struct LayoutConfig {
  std::size_t num_aps = 100;
  std::size_t num_ues = 50;
  Rect area = Rect::square(500.0);
};

/// L APs and K UEs drawn i.i.d. uniform on the area.
NetworkLayout generate_layout(const LayoutConfig& cfg, std::uint64_t seed);

enum class FadingModel {
  WorstCase,    // g_c = 1 for every scatterer
  Exponential,  // g_c ~ Exp(1)
};

struct Scatterer {
  Point2 position = Point2::Zero();
  double rcs = 0.0;          // m^2
  double fading_gain = 1.0;  // unitless
};

/// One realization of the Poisson clutter process.
struct ClutterField {
  std::vector<Scatterer> scatterers;
  double intensity = 0.0;  // scatterers per m^2
  Region region = Rect{};

  bool empty() const { return scatterers.empty(); }
  std::size_t size() const { return scatterers.size(); }
};

struct ClutterConfig {
  double intensity = 0.0;
  Region region = Rect{};
  double mean_rcs = 1.0;
  FadingModel fading = FadingModel::WorstCase;
};

/// Poisson(intensity * |region|) scatterers, uniform positions, Exp(mean_rcs) cross sections.
ClutterField sample_clutter(const ClutterConfig& cfg, std::uint64_t seed);

/// atan2 bearing from `from` to `to`, in [0, 2*pi).
double bearing(const Point2& from, const Point2& to);

/// Wraps to [0, 2*pi).
double wrap_two_pi(double angle);
/// Wraps to (-pi, pi].
double wrap_pi(double angle);

/// Entity CSV: kind,x_m,y_m,rcs_m2,gain. Kinds: area_min, area_max, ap, ue, scatterer.
void write_entities_csv(std::ostream& out, const NetworkLayout& layout, const ClutterField* clutter = nullptr);

struct EntityTable {
  NetworkLayout layout;
  std::vector<Scatterer> scatterers;
};

EntityTable read_entities_csv(std::istream& in);

}  // namespace jrc
