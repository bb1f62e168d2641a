#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace closure {

/// A point in continuous canvas coordinates: x grows right, y grows down.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// A visible stroke fragment. Never zero-length.
struct Segment {
  Point p0;
  Point p1;

  double length() const;
};

enum class Background { Light, Dark };

enum class RotationScheme { Uniform15, Formula };

inline constexpr int kMinSides = 3;
inline constexpr int kMaxSides = 12;
inline constexpr int kRotationsPerShape = 8;
inline constexpr std::array<int, 10> kRemovalLevels = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90};

bool is_valid_removal(int removal_pct);
bool is_valid_side_count(int n_sides);

std::string_view to_string(Background bg);
std::string_view to_string(RotationScheme scheme);
Background parse_background(std::string_view text);
RotationScheme parse_rotation_scheme(std::string_view text);

/// Full parametric description of one stimulus.
struct PolygonSpec {
  int n_sides = 3;
  double theta_global_deg = 0.0;
  Background background = Background::Light;
  Point center;
  double circumradius_px = 80.0;
  int removal_pct = 0;
  double stroke_width_px = 2.0;

  /// Throws std::invalid_argument on side count, removal level, radius or
  /// stroke width violations.
  void validate() const;

  /// True when the stroked polygon stays inside a width x height canvas.
  bool fits_canvas(int width, int height) const;
};

/// Vertex k lies at 90 + theta + 360k/n degrees counter-clockwise from +x,
/// so vertex 0 is at the top for theta = 0.
std::vector<Point> polygon_vertices(int n_sides, double theta_deg, Point center, double radius);

std::vector<Point> polygon_vertices(const PolygonSpec& spec);

/// Eight rotation angles in degrees, i = 0..7.
std::array<double, kRotationsPerShape> rotation_schedule(int n_sides, RotationScheme scheme);

/// Visible contour of a closed polygon with the middle removal_pct percent of
/// every side cut out. Side k runs from vertex k to vertex k+1 (mod n).
std::vector<Segment> side_segments(const std::vector<Point>& vertices, int removal_pct);

double perimeter(const std::vector<Point>& vertices);

}  // namespace closure
