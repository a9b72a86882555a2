#include "jrc/topology.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "jrc/csv.hpp"
#include "jrc/errors.hpp"
#include "jrc/rng.hpp"

namespace jrc {

double region_area(const Region& region) {
  return std::visit([](const auto& r) { return r.area(); }, region);
}

bool region_contains(const Region& region, const Point2& p) {
  return std::visit([&](const auto& r) { return r.contains(p); }, region);
}

Point2 sample_uniform(const Region& region, Rng& rng) {
  if (const auto* rect = std::get_if<Rect>(&region)) {
    const double x = rng.uniform(rect->x_min, rect->x_max);
    const double y = rng.uniform(rect->y_min, rect->y_max);
    return {x, y};
  }
  const auto& ring = std::get<Annulus>(region);
  // Area-uniform radius: r^2 uniform on [r_in^2, r_out^2].
  const double r2 = rng.uniform(ring.r_inner * ring.r_inner, ring.r_outer * ring.r_outer);
  const double theta = rng.uniform(0.0, 2.0 * kPi);
  const double r = std::sqrt(r2);
  return ring.center + Point2(r * std::cos(theta), r * std::sin(theta));
}

NetworkLayout generate_layout(const LayoutConfig& cfg, std::uint64_t seed) {
  std::vector<std::string> problems;
  if (cfg.num_aps < 1) problems.emplace_back("layout.num_aps must be >= 1");
  if (cfg.num_ues < 1) problems.emplace_back("layout.num_ues must be >= 1");
  if (!(cfg.area.width() > 0.0) || !(cfg.area.height() > 0.0)) {
    problems.emplace_back("layout.area must have positive width and height");
  }
  if (!problems.empty()) throw ConfigError(problems);

  NetworkLayout layout;
  layout.area = cfg.area;
  const Region region = cfg.area;
  Rng ap_rng(seed, 0);
  Rng ue_rng(seed, 1);
  layout.aps.reserve(cfg.num_aps);
  for (std::size_t l = 0; l < cfg.num_aps; ++l) layout.aps.push_back(sample_uniform(region, ap_rng));
  layout.ues.reserve(cfg.num_ues);
  for (std::size_t k = 0; k < cfg.num_ues; ++k) layout.ues.push_back(sample_uniform(region, ue_rng));
  return layout;
}

ClutterField sample_clutter(const ClutterConfig& cfg, std::uint64_t seed) {
  std::vector<std::string> problems;
  if (!(cfg.intensity >= 0.0)) problems.emplace_back("clutter.intensity must be >= 0");
  if (!(cfg.mean_rcs > 0.0)) problems.emplace_back("clutter.mean_rcs must be > 0");
  if (const auto* ring = std::get_if<Annulus>(&cfg.region)) {
    if (!(ring->r_inner >= 0.0) || !(ring->r_outer >= ring->r_inner)) {
      problems.emplace_back("clutter.region annulus needs 0 <= r_inner <= r_outer");
    }
  } else {
    const auto& rect = std::get<Rect>(cfg.region);
    if (!(rect.width() >= 0.0) || !(rect.height() >= 0.0)) {
      problems.emplace_back("clutter.region rectangle has negative extent");
    }
  }
  if (!problems.empty()) throw ConfigError(problems);

  ClutterField field;
  field.intensity = cfg.intensity;
  field.region = cfg.region;
  Rng rng(seed);
  const auto count = rng.poisson(cfg.intensity * region_area(cfg.region));
  field.scatterers.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Scatterer s;
    s.position = sample_uniform(cfg.region, rng);
    s.rcs = rng.exponential(cfg.mean_rcs);
    s.fading_gain = cfg.fading == FadingModel::WorstCase ? 1.0 : rng.exponential(1.0);
    field.scatterers.push_back(s);
  }
  return field;
}

double wrap_two_pi(double angle) {
  double a = std::fmod(angle, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a;
}

double wrap_pi(double angle) {
  double a = wrap_two_pi(angle);
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double bearing(const Point2& from, const Point2& to) {
  const Point2 d = to - from;
  if (d.x() == 0.0 && d.y() == 0.0) throw DegenerateGeometryError("bearing between coincident points");
  return wrap_two_pi(std::atan2(d.y(), d.x()));
}

void write_entities_csv(std::ostream& out, const NetworkLayout& layout, const ClutterField* clutter) {
  csv::Writer w(out, {"kind", "x_m", "y_m", "rcs_m2", "gain"});
  w.row({std::string("area_min"), layout.area.x_min, layout.area.y_min, 0.0, 0.0});
  w.row({std::string("area_max"), layout.area.x_max, layout.area.y_max, 0.0, 0.0});
  for (const auto& p : layout.aps) w.row({std::string("ap"), p.x(), p.y(), 0.0, 0.0});
  for (const auto& p : layout.ues) w.row({std::string("ue"), p.x(), p.y(), 0.0, 0.0});
  if (clutter) {
    for (const auto& s : clutter->scatterers) {
      w.row({std::string("scatterer"), s.position.x(), s.position.y(), s.rcs, s.fading_gain});
    }
  }
}

EntityTable read_entities_csv(std::istream& in) {
  EntityTable table;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("entity csv is empty");
  const auto header = csv::split_line(line);
  if (header != std::vector<std::string>{"kind", "x_m", "y_m", "rcs_m2", "gain"}) {
    throw DomainError("entity csv header mismatch");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != 5) throw DomainError("entity csv row needs 5 fields: " + line);
    const Point2 p(csv::parse_double(f[1]), csv::parse_double(f[2]));
    if (f[0] == "area_min") {
      table.layout.area.x_min = p.x();
      table.layout.area.y_min = p.y();
    } else if (f[0] == "area_max") {
      table.layout.area.x_max = p.x();
      table.layout.area.y_max = p.y();
    } else if (f[0] == "ap") {
      table.layout.aps.push_back(p);
    } else if (f[0] == "ue") {
      table.layout.ues.push_back(p);
    } else if (f[0] == "scatterer") {
      table.scatterers.push_back({p, csv::parse_double(f[3]), csv::parse_double(f[4])});
    } else {
      throw DomainError("unknown entity kind '" + f[0] + "'");
    }
  }
  return table;
}

}  // namespace jrc
