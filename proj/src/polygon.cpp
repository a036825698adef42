#include "apmap/polygon.hpp"

#include <algorithm>

namespace apm {

Polygon Polygon::rect(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Polygon Polygon::square_B() { return rect(Rat(-1), Rat(-1), Rat(1), Rat(1)); }

Rat polygon_area2(const Polygon& p) {
  Rat s(0);
  size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = p[i];
    const Point2& b = p[(i + 1) % n];
    s += a.x * b.y - a.y * b.x;
  }
  return s;
}

Rat polygon_area(const Polygon& p) { return polygon_area2(p) / 2; }

bool polygon_is_convex(const Polygon& p) {
  size_t n = p.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    if (orient(p[i], p[(i + 1) % n], p[(i + 2) % n]) < 0) return false;
  }
  return polygon_area2(p) > 0;
}

namespace {

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  if (orient(a, b, p) != 0) return false;
  return dot(p - a, b - p) >= 0;
}

bool segments_intersect_improper(const Point2& a, const Point2& b, const Point2& c,
                                 const Point2& d) {
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool polygon_is_simple(const Polygon& p) {
  size_t n = p.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    if (p[i] == p[(i + 1) % n]) return false;
    for (size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect_improper(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool convex_contains(const Polygon& poly, const Point2& p) {
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    if (orient(poly[i], poly[(i + 1) % n], p) < 0) return false;
  }
  return true;
}

bool convex_contains_interior(const Polygon& poly, const Point2& p) {
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    if (orient(poly[i], poly[(i + 1) % n], p) <= 0) return false;
  }
  return true;
}

Polygon clip_halfplane(const Polygon& poly, const Point2& a, const Point2& b) {
  Polygon out;
  size_t n = poly.size();
  if (n == 0) return out;
  Point2 dir = b - a;
  auto side = [&](const Point2& p) { return rat_sign(cross(dir, p - a)); };
  for (size_t i = 0; i < n; ++i) {
    const Point2& cur = poly[i];
    const Point2& nxt = poly[(i + 1) % n];
    int sc = side(cur), sn = side(nxt);
    if (sc >= 0) out.pts.push_back(cur);
    if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) {
      // exact line intersection parameter
      Rat t = cross(dir, a - cur) / cross(dir, nxt - cur);
      out.pts.push_back(cur + (nxt - cur) * t);
    }
  }
  return polygon_normalize(out);
}

Polygon convex_intersect(const Polygon& p, const Polygon& q) {
  Polygon cur = p;
  size_t n = q.size();
  for (size_t i = 0; i < n && cur.size() >= 3; ++i) {
    cur = clip_halfplane(cur, q[i], q[(i + 1) % n]);
  }
  return cur;
}

Polygon affine_image(const Polygon& p, const AffineMap2& m) {
  Polygon out;
  out.pts.reserve(p.size());
  for (const auto& v : p.pts) out.pts.push_back(m(v));
  if (m.det() < 0) std::reverse(out.pts.begin(), out.pts.end());
  return out;
}

Polygon polygon_normalize(const Polygon& p) {
  std::vector<Point2> v;
  for (const auto& pt : p.pts) {
    if (v.empty() || !(v.back() == pt)) v.push_back(pt);
  }
  while (v.size() >= 2 && v.front() == v.back()) v.pop_back();
  // drop collinear chain points
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (size_t i = 0; i < v.size(); ++i) {
      size_t n = v.size();
      const Point2& a = v[(i + n - 1) % n];
      const Point2& b = v[i];
      const Point2& c = v[(i + 1) % n];
      if (orient(a, b, c) == 0 && dot(b - a, c - b) >= 0) {
        v.erase(v.begin() + i);
        changed = true;
        break;
      }
    }
  }
  if (v.size() < 3) return Polygon();
  Polygon out(std::move(v));
  if (polygon_area2(out) <= 0) return Polygon();
  return out;
}

std::vector<std::array<Point2, 3>> fan_triangulate(const Polygon& p) {
  std::vector<std::array<Point2, 3>> tris;
  for (size_t i = 1; i + 1 < p.size(); ++i) {
    tris.push_back({p[0], p[i], p[i + 1]});
  }
  return tris;
}

BBox bbox_of(const Polygon& p) {
  BBox b;
  bool first = true;
  for (const auto& v : p.pts) {
    double x = to_double(v.x), y = to_double(v.y);
    if (first) {
      b = {x, y, x, y};
      first = false;
    } else {
      b.xmin = std::min(b.xmin, x);
      b.ymin = std::min(b.ymin, y);
      b.xmax = std::max(b.xmax, x);
      b.ymax = std::max(b.ymax, y);
    }
  }
  return b;
}

}  // namespace apm
