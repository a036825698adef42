#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>

#include "apmap/rational.hpp"

namespace apm {

struct Point2 {
  Rat x, y;
  Point2() : x(0), y(0) {}
  Point2(Rat xx, Rat yy) : x(std::move(xx)), y(std::move(yy)) {}
  bool operator==(const Point2& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Point2& o) const { return !(*this == o); }
  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(const Rat& s) const { return {x * s, y * s}; }
};

inline Rat cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline Rat dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }

// Sign of the signed area of triangle (a, b, c); exact.
inline int orient(const Point2& a, const Point2& b, const Point2& c) {
  return rat_sign(cross(b - a, c - a));
}

// y = m x + t with m a 2x2 matrix.
struct AffineMap2 {
  Rat a, b, c, d;  // matrix [[a, b], [c, d]]
  Rat tx, ty;

  AffineMap2() : a(1), b(0), c(0), d(1), tx(0), ty(0) {}
  AffineMap2(Rat a_, Rat b_, Rat c_, Rat d_, Rat tx_ = Rat(0), Rat ty_ = Rat(0))
      : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)),
        tx(std::move(tx_)), ty(std::move(ty_)) {}

  static AffineMap2 identity() { return AffineMap2(); }
  static AffineMap2 translation(const Rat& tx, const Rat& ty) {
    return AffineMap2(Rat(1), Rat(0), Rat(0), Rat(1), tx, ty);
  }

  Rat det() const { return a * d - b * c; }

  Point2 operator()(const Point2& p) const {
    return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty};
  }

  // this after other: (this * other)(p) = this(other(p))
  AffineMap2 after(const AffineMap2& o) const {
    AffineMap2 r;
    r.a = a * o.a + b * o.c;
    r.b = a * o.b + b * o.d;
    r.c = c * o.a + d * o.c;
    r.d = c * o.b + d * o.d;
    Point2 t = (*this)(Point2(o.tx, o.ty));
    r.tx = t.x;
    r.ty = t.y;
    return r;
  }

  AffineMap2 inverse() const {
    Rat dt = det();
    if (dt == 0) throw std::domain_error("AffineMap2::inverse: degenerate map");
    AffineMap2 r(d / dt, -b / dt, -c / dt, a / dt);
    Point2 t = r(Point2(tx, ty));
    r.tx = -t.x;
    r.ty = -t.y;
    return r;
  }

  bool operator==(const AffineMap2& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d && tx == o.tx && ty == o.ty;
  }
};

// Affine map sending triangle (p0,p1,p2) to (q0,q1,q2).
AffineMap2 affine_from_triangles(const Point2& p0, const Point2& p1, const Point2& p2,
                                 const Point2& q0, const Point2& q1, const Point2& q2);

// Largest/smallest singular value of the linear part, closed form (double).
std::pair<double, double> singular_values(const AffineMap2& m);

// max(sigma_max, 1/sigma_min); throws on degenerate maps.
double bilip_of_affine(const AffineMap2& m);

}  // namespace apm
