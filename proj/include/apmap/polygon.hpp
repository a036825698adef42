#pragma once

#include <optional>
#include <vector>

#include "apmap/geom.hpp"

namespace apm {

// Simple polygon, counterclockwise, no repeated consecutive vertices.
struct Polygon {
  std::vector<Point2> pts;

  Polygon() = default;
  explicit Polygon(std::vector<Point2> v) : pts(std::move(v)) {}

  size_t size() const { return pts.size(); }
  const Point2& operator[](size_t i) const { return pts[i]; }

  static Polygon rect(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1);
  static Polygon square_B();  // [-1,1]^2
};

// Twice the signed area (exact).
Rat polygon_area2(const Polygon& p);
// Signed area; positive for CCW.
Rat polygon_area(const Polygon& p);

bool polygon_is_convex(const Polygon& p);
bool polygon_is_simple(const Polygon& p);

// Strict/weak containment for convex CCW polygons (exact).
bool convex_contains(const Polygon& poly, const Point2& p);          // boundary counts as inside
bool convex_contains_interior(const Polygon& poly, const Point2& p);  // strict interior

// Sutherland-Hodgman clip of a convex CCW polygon by the half plane
// {p : cross(b-a, p-a) >= 0} (left of directed line a->b). Exact.
Polygon clip_halfplane(const Polygon& poly, const Point2& a, const Point2& b);

// Intersection of two convex CCW polygons (possibly empty / degenerate).
Polygon convex_intersect(const Polygon& p, const Polygon& q);

// Image of a polygon under an affine map; reverses order if det < 0.
Polygon affine_image(const Polygon& p, const AffineMap2& m);

// Drop repeated vertices and collinear chain points; returns empty if degenerate.
Polygon polygon_normalize(const Polygon& p);

// Fan triangulation of a convex polygon.
std::vector<std::array<Point2, 3>> fan_triangulate(const Polygon& p);

struct BBox {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  bool overlaps(const BBox& o) const {
    return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
  }
};
BBox bbox_of(const Polygon& p);

}  // namespace apm
