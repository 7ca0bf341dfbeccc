#pragma once

#include <algorithm>
#include <cmath>

namespace revguard {

/// Axis-aligned rectangle in PDF user-space points. Normalized so that
/// x0 <= x1 and y0 <= y1 (y grows upward, PDF convention).
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  static Rect from_corners(double ax, double ay, double bx, double by) {
    return Rect{std::min(ax, bx), std::min(ay, by), std::max(ax, bx), std::max(ay, by)};
  }

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  bool empty() const { return width() <= 0.0 || height() <= 0.0; }

  bool finite() const {
    return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1);
  }

  Rect united(const Rect& o) const {
    if (empty()) return o;
    if (o.empty()) return *this;
    return Rect{std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
  }

  Rect intersected(const Rect& o) const {
    Rect r{std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
    if (r.x0 >= r.x1 || r.y0 >= r.y1) return Rect{};
    return r;
  }

  Rect translated(double dx, double dy) const { return Rect{x0 + dx, y0 + dy, x1 + dx, y1 + dy}; }

  /// Fraction of this rectangle's area covered by `o`. 0 for degenerate rects.
  double covered_fraction_by(const Rect& o) const {
    double a = area();
    if (a <= 0.0) return 0.0;
    return intersected(o).area() / a;
  }
};

/// RGB color, components in [0,1].
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  bool operator==(const Rgb& o) const { return r == o.r && g == o.g && b == o.b; }
};

/// Chebyshev (max-component) distance between two colors.
inline double color_distance(const Rgb& a, const Rgb& b) {
  return std::max({std::fabs(a.r - b.r), std::fabs(a.g - b.g), std::fabs(a.b - b.b)});
}

}  // namespace revguard
