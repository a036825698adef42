#include "apmap/geom.hpp"

#include <cmath>
#include <sstream>

namespace apm {

std::string rat_to_string(const Rat& r) {
  std::ostringstream os;
  if (denominator(r) == 1) {
    os << numerator(r);
  } else {
    os << numerator(r) << "/" << denominator(r);
  }
  return os.str();
}

bool parse_rat(const std::string& tok, Rat& out) {
  auto slash = tok.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(tok.substr(0, slash));
      BigInt den(tok.substr(slash + 1));
      if (den == 0) return false;
      out = Rat(num, den);
      return true;
    }
    if (tok.find('.') != std::string::npos || tok.find('e') != std::string::npos ||
        tok.find('E') != std::string::npos) {
      size_t pos = 0;
      double d = std::stod(tok, &pos);
      if (pos != tok.size() || !std::isfinite(d)) return false;
      out = rat_of_double(d);
      return true;
    }
    out = Rat(BigInt(tok));
    return true;
  } catch (...) {
    return false;
  }
}

AffineMap2 affine_from_triangles(const Point2& p0, const Point2& p1, const Point2& p2,
                                 const Point2& q0, const Point2& q1, const Point2& q2) {
  // Solve M * (p1-p0) = q1-q0, M * (p2-p0) = q2-q0.
  Point2 u = p1 - p0, v = p2 - p0;
  Point2 su = q1 - q0, sv = q2 - q0;
  Rat dt = cross(u, v);
  if (dt == 0) throw std::domain_error("affine_from_triangles: degenerate source triangle");
  AffineMap2 m;
  m.a = (su.x * v.y - sv.x * u.y) / dt;
  m.b = (sv.x * u.x - su.x * v.x) / dt;
  m.c = (su.y * v.y - sv.y * u.y) / dt;
  m.d = (sv.y * u.x - su.y * v.x) / dt;
  Point2 t = q0 - m(p0) + Point2(m.tx, m.ty);
  m.tx = t.x;
  m.ty = t.y;
  return m;
}

std::pair<double, double> singular_values(const AffineMap2& m) {
  double a = to_double(m.a), b = to_double(m.b), c = to_double(m.c), d = to_double(m.d);
  double tr = a * a + b * b + c * c + d * d;      // trace of M^T M
  double dt = a * d - b * c;                       // det M
  double disc = tr * tr - 4.0 * dt * dt;           // (s1^2 - s2^2)^2
  if (disc < 0) disc = 0;
  double root = std::sqrt(disc);
  double smax2 = (tr + root) / 2.0;
  double smin2 = (tr - root) / 2.0;
  if (smin2 < 0) smin2 = 0;
  return {std::sqrt(smax2), std::sqrt(smin2)};
}

double bilip_of_affine(const AffineMap2& m) {
  if (m.det() == 0) throw std::domain_error("bilip_of_affine: degenerate map is not a homeomorphism");
  auto [smax, smin] = singular_values(m);
  return std::max(smax, 1.0 / smin);
}

}  // namespace apm
