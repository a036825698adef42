#pragma once

#include "apmap/pa_complex.hpp"
#include "apmap/pl_function.hpp"

namespace apm {

// Trapezoid ABCD with bases AB (length a) and CD (length b), a < b.
// Vertex labels follow the construction: laterals are BC and DA, the polygon
// boundary order is A, D, C, B (counterclockwise). Bases must be axis-parallel
// so all derived quantities stay rational.
struct TrapezoidSpec {
  Point2 A, B, C, D;

  Rat a2() const;  // |AB|^2
  Rat b2() const;  // |CD|^2
  Rat a() const;   // |AB|, requires axis-parallel bases
  Rat b() const;
  Rat h() const;   // distance between the base lines

  Polygon polygon() const;  // CCW

  // Throws with the name of the first violated condition.
  void validate() const;
};

struct Distortion {
  Rat slope_ratio;  // (b - a) / h
  Rat base_ratio;   // b / a
};

Distortion distortion_of(const TrapezoidSpec& t);

// (x, y) -> (x, y + f(x)) on a convex domain whose x-extent is covered by f.
PAComplex skew_map(const PLFunction& f, const Polygon& domain);
// (x, y) -> (x + g(y), y)
PAComplex skew_map_x(const PLFunction& g, const Polygon& domain);

// The area-preserving 4-triangle map from the trapezoid to the rectangle
// centered at the midpoint O of the base midline, with the (a+b)/2 side
// parallel to the bases. Validates the spec invariants.
PAComplex trapezoid_to_rectangle(const TrapezoidSpec& t);

// Internal building block: the constant-determinant piecewise-affine chart of a
// quadrilateral q0..q3 (CCW) with one pair of opposite sides parallel and
// axis-aligned, from the rectangle [x0,x1]x[y0,y1], corner i of the rectangle
// (CCW from (x0,y0)) landing on q_i. No admissibility estimates are enforced;
// the construction itself is valid for any such quadrilateral.
PAComplex rect_to_quad_chart(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1,
                             const std::array<Point2, 4>& q);

}  // namespace apm
