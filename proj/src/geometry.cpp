#include "closure/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace closure {

namespace {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

void require_sides(int n_sides) {
  if (!is_valid_side_count(n_sides)) {
    throw std::invalid_argument("side count must be in [3, 12], got " + std::to_string(n_sides));
  }
}

Point lerp(Point a, Point b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

}  // namespace

double Segment::length() const { return std::hypot(p1.x - p0.x, p1.y - p0.y); }

bool is_valid_removal(int removal_pct) {
  return std::find(kRemovalLevels.begin(), kRemovalLevels.end(), removal_pct) != kRemovalLevels.end();
}

bool is_valid_side_count(int n_sides) { return n_sides >= kMinSides && n_sides <= kMaxSides; }

std::string_view to_string(Background bg) { return bg == Background::Light ? "light" : "dark"; }

std::string_view to_string(RotationScheme scheme) {
  return scheme == RotationScheme::Uniform15 ? "uniform15" : "formula";
}

Background parse_background(std::string_view text) {
  if (text == "light") return Background::Light;
  if (text == "dark") return Background::Dark;
  throw std::invalid_argument("unknown background '" + std::string(text) + "'");
}

RotationScheme parse_rotation_scheme(std::string_view text) {
  if (text == "uniform15") return RotationScheme::Uniform15;
  if (text == "formula") return RotationScheme::Formula;
  throw std::invalid_argument("unknown rotation scheme '" + std::string(text) + "'");
}

void PolygonSpec::validate() const {
  require_sides(n_sides);
  if (!is_valid_removal(removal_pct)) {
    throw std::invalid_argument("removal_pct must be a multiple of 10 in [0, 90], got " +
                                std::to_string(removal_pct));
  }
  if (!(circumradius_px > 0.0)) throw std::invalid_argument("circumradius must be positive");
  if (!(stroke_width_px >= 1.0)) throw std::invalid_argument("stroke width must be at least 1 px");
}

bool PolygonSpec::fits_canvas(int width, int height) const {
  const double reach = circumradius_px + stroke_width_px / 2.0;
  return center.x - reach >= 0.0 && center.x + reach <= width && center.y - reach >= 0.0 &&
         center.y + reach <= height;
}

std::vector<Point> polygon_vertices(int n_sides, double theta_deg, Point center, double radius) {
  require_sides(n_sides);
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");

  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n_sides));
  for (int k = 0; k < n_sides; ++k) {
    const double phi = deg_to_rad(90.0 + theta_deg + 360.0 * k / n_sides);
    out.push_back({center.x + radius * std::cos(phi), center.y - radius * std::sin(phi)});
  }
  return out;
}

std::vector<Point> polygon_vertices(const PolygonSpec& spec) {
  return polygon_vertices(spec.n_sides, spec.theta_global_deg, spec.center, spec.circumradius_px);
}

std::array<double, kRotationsPerShape> rotation_schedule(int n_sides, RotationScheme scheme) {
  require_sides(n_sides);
  std::array<double, kRotationsPerShape> out{};
  for (int i = 0; i < kRotationsPerShape; ++i) {
    if (scheme == RotationScheme::Uniform15) {
      out[i] = 15.0 * i;
    } else {
      // Integer numerator keeps exact multiples of 360 at exactly 0.
      const long numerator = 180L * (n_sides - 2) * i;
      const long whole = numerator % (360L * n_sides);
      out[i] = static_cast<double>(whole) / n_sides;
    }
  }
  return out;
}

std::vector<Segment> side_segments(const std::vector<Point>& vertices, int removal_pct) {
  if (!is_valid_removal(removal_pct)) {
    throw std::invalid_argument("removal_pct must be a multiple of 10 in [0, 90], got " +
                                std::to_string(removal_pct));
  }
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");

  const std::size_t n = vertices.size();
  std::vector<Segment> out;
  out.reserve(removal_pct == 0 ? n : 2 * n);
  const double keep = (1.0 - removal_pct / 100.0) / 2.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = vertices[k];
    const Point b = vertices[(k + 1) % n];
    if (a == b) throw std::invalid_argument("degenerate polygon side");
    if (removal_pct == 0) {
      out.push_back({a, b});
    } else {
      out.push_back({a, lerp(a, b, keep)});
      out.push_back({lerp(b, a, keep), b});
    }
  }
  return out;
}

double perimeter(const std::vector<Point>& vertices) {
  double total = 0.0;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    total += Segment{vertices[k], vertices[(k + 1) % vertices.size()]}.length();
  }
  return total;
}

}  // namespace closure
