#include "apmap/affine_blocks.hpp"

#include <algorithm>

namespace apm {

namespace {

bool seg_axis_parallel(const Point2& p, const Point2& q) {
  return p.x == q.x || p.y == q.y;
}

Rat axis_len(const Point2& p, const Point2& q) {
  if (p.x == q.x) return rat_abs(p.y - q.y);
  if (p.y == q.y) return rat_abs(p.x - q.x);
  throw std::domain_error("trapezoid: bases must be axis-parallel for exact arithmetic");
}

const AffineMap2 kRot90(Rat(0), Rat(-1), Rat(1), Rat(0));    // (x,y) -> (-y, x)
const AffineMap2 kRot90Inv(Rat(0), Rat(1), Rat(-1), Rat(0));

PAComplex conjugate(const PAComplex& c, const AffineMap2& pre, const AffineMap2& post) {
  PAComplex out;
  out.domain = affine_image(c.domain, pre.inverse());
  for (const auto& cell : c.cells) {
    out.cells.push_back({affine_image(cell.support, pre.inverse()),
                         post.after(cell.map).after(pre)});
  }
  return out;
}

// Area-preserving map of the trapezoid with vertical bases AB (at x_M, length a)
// and CD (at x_N, length b), a <= b, onto the rectangle centered at O. Lax: no
// admissibility estimates. Labels as in the construction: A, D on one side of
// the midline; polygon boundary A, D, C, B counterclockwise.
PAComplex trapezoid_core_vertical(const Point2& A, const Point2& B, const Point2& C,
                                  const Point2& D) {
  if (A.x != B.x || C.x != D.x)
    throw std::domain_error("trapezoid core: bases must be vertical");
  Rat xM = A.x, xN = C.x;
  if (xM == xN) throw std::domain_error("trapezoid core: degenerate (zero height)");
  Rat a = rat_abs(A.y - B.y), b = rat_abs(C.y - D.y);
  Point2 M((A.x + B.x) / 2, (A.y + B.y) / 2);
  Point2 N((C.x + D.x) / 2, (C.y + D.y) / 2);

  // Skew fixing the CD line, lifting AB to N's height.
  Rat s = (N.y - M.y) / (xM - xN);
  AffineMap2 sk(Rat(1), Rat(0), s, Rat(1), Rat(0), -s * xN);
  Point2 As = sk(A), Bs = sk(B), Cs = sk(C), Ds = sk(D);

  Polygon dom = polygon_normalize(Polygon({A, D, C, B}));
  if (dom.size() < 3) throw std::domain_error("trapezoid core: degenerate trapezoid");

  if (a == b) {
    // Parallelogram: already a rectangle after the skew.
    PAComplex out;
    out.domain = dom;
    out.cells.push_back({dom, sk});
    return out;
  }

  Rat h = rat_abs(xM - xN);
  Point2 O((xM + xN) / 2, N.y);
  Rat ux = xM > xN ? Rat(1) : Rat(-1);        // unit from N toward M
  Rat va = As.y > N.y ? Rat(1) : Rat(-1);     // unit from midline toward A
  Rat q = (a + b) / 4;
  Point2 Ap(O.x + ux * h / 2, O.y + va * q);
  Point2 Bp(O.x + ux * h / 2, O.y - va * q);
  Point2 Cp(O.x - ux * h / 2, O.y - va * q);
  Point2 Dp(O.x - ux * h / 2, O.y + va * q);
  Point2 Op(O.x + ux * h * (b - a) / (2 * (a + b)), O.y);

  struct Tri {
    Point2 p0, p1, p2, q0, q1, q2;
  };
  std::array<Tri, 4> tris = {{{O, As, Bs, Op, Ap, Bp},
                              {O, Bs, Cs, Op, Bp, Cp},
                              {O, Cs, Ds, Op, Cp, Dp},
                              {O, Ds, As, Op, Dp, Ap}}};
  PAComplex out;
  out.domain = dom;
  AffineMap2 ski = sk.inverse();
  for (const auto& t : tris) {
    AffineMap2 m = affine_from_triangles(t.p0, t.p1, t.p2, t.q0, t.q1, t.q2);
    Polygon tri({t.p0, t.p1, t.p2});
    if (polygon_area2(tri) < 0) std::reverse(tri.pts.begin(), tri.pts.end());
    Polygon sup = polygon_normalize(affine_image(tri, ski));
    if (sup.size() < 3) throw std::domain_error("trapezoid core: degenerate triangle");
    out.cells.push_back({sup, m.after(sk)});
  }
  return out;
}

PAComplex trapezoid_core(const Point2& A, const Point2& B, const Point2& C, const Point2& D) {
  if (A.x == B.x && C.x == D.x) return trapezoid_core_vertical(A, B, C, D);
  if (A.y == B.y && C.y == D.y) {
    PAComplex rot = trapezoid_core_vertical(kRot90(A), kRot90(B), kRot90(C), kRot90(D));
    return conjugate(rot, kRot90, kRot90Inv);
  }
  throw std::domain_error("trapezoid: bases must be axis-parallel for exact arithmetic");
}

}  // namespace

Rat TrapezoidSpec::a2() const { return dot(B - A, B - A); }
Rat TrapezoidSpec::b2() const { return dot(D - C, D - C); }
Rat TrapezoidSpec::a() const { return axis_len(A, B); }
Rat TrapezoidSpec::b() const { return axis_len(C, D); }

Rat TrapezoidSpec::h() const {
  if (A.x == B.x && C.x == D.x) return rat_abs(A.x - C.x);
  if (A.y == B.y && C.y == D.y) return rat_abs(A.y - C.y);
  throw std::domain_error("trapezoid: bases must be axis-parallel for exact arithmetic");
}

Polygon TrapezoidSpec::polygon() const {
  return polygon_normalize(Polygon({A, D, C, B}));
}

void TrapezoidSpec::validate() const {
  if (cross(B - A, D - C) != 0) throw std::domain_error("trapezoid: AB not parallel to CD");
  if (!seg_axis_parallel(A, B)) throw std::domain_error("trapezoid: bases must be axis-parallel");
  Rat la = a(), lb = b(), lh = h();
  if (la <= 0 || lb <= 0) throw std::domain_error("trapezoid: degenerate base");
  if (!(la < lb)) throw std::domain_error("trapezoid: requires a < b");
  if (!(2 * lh <= la + lb)) throw std::domain_error("trapezoid: requires 2h <= a + b");
  if (dot(D - C, B - C) < 0) throw std::domain_error("trapezoid: obtuse angle at C");
  if (dot(C - D, A - D) < 0) throw std::domain_error("trapezoid: obtuse angle at D");
  if (polygon_area2(Polygon({A, D, C, B})) <= 0)
    throw std::domain_error("trapezoid: vertices must run counterclockwise as A, D, C, B");
  Polygon p = polygon();
  if (p.size() < 3 || !polygon_is_simple(p))
    throw std::domain_error("trapezoid: vertices do not bound a simple quadrilateral");
}

Distortion distortion_of(const TrapezoidSpec& t) {
  t.validate();
  return {(t.b() - t.a()) / t.h(), t.b() / t.a()};
}

PAComplex skew_map(const PLFunction& f, const Polygon& domain) {
  if (!polygon_is_convex(domain)) throw std::domain_error("skew_map: domain must be convex");
  Rat xmin = domain[0].x, xmax = domain[0].x;
  for (const auto& p : domain.pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
  }
  if (f.x_min() > xmin || f.x_max() < xmax)
    throw std::domain_error("skew_map: f undefined on part of the x-extent of the domain");
  PAComplex out;
  out.domain = domain;
  for (size_t i = 0; i + 1 < f.xs.size(); ++i) {
    if (f.xs[i + 1] <= xmin || f.xs[i] >= xmax) continue;
    Polygon strip = clip_halfplane(domain, Point2(f.xs[i], Rat(0)), Point2(f.xs[i], Rat(-1)));
    strip = clip_halfplane(strip, Point2(f.xs[i + 1], Rat(0)), Point2(f.xs[i + 1], Rat(1)));
    if (strip.size() < 3) continue;
    Rat s = f.slope(i);
    AffineMap2 m(Rat(1), Rat(0), s, Rat(1), Rat(0), f.ys[i] - s * f.xs[i]);
    out.cells.push_back({strip, m});
  }
  if (out.cells.empty()) out.cells.push_back({domain, AffineMap2::identity()});
  return out;
}

PAComplex skew_map_x(const PLFunction& g, const Polygon& domain) {
  // In coordinates rotated by 90 degrees, (x,y) -> (x + g(y), y) becomes the
  // vertical skew driven by u -> g(-u).
  PAComplex rot = skew_map(g.x_transformed(Rat(-1), Rat(0)), affine_image(domain, kRot90));
  return conjugate(rot, kRot90, kRot90Inv);
}

PAComplex trapezoid_to_rectangle(const TrapezoidSpec& t) {
  t.validate();
  return trapezoid_core(t.A, t.B, t.C, t.D);
}

PAComplex rect_to_quad_chart(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1,
                             const std::array<Point2, 4>& q_in) {
  if (!(x0 < x1 && y0 < y1)) throw std::invalid_argument("rect_to_quad_chart: bad rectangle");
  std::array<Point2, 4> s = {Point2(x0, y0), Point2(x1, y0), Point2(x1, y1), Point2(x0, y1)};
  std::array<Point2, 4> q = q_in;
  {
    Polygon qp({q[0], q[1], q[2], q[3]});
    if (polygon_area2(qp) <= 0)
      throw std::invalid_argument("rect_to_quad_chart: quad must be CCW and non-degenerate");
  }

  bool par01 = cross(q[1] - q[0], q[2] - q[3]) == 0;
  bool par12 = cross(q[2] - q[1], q[3] - q[0]) == 0;
  if (par01 && par12) {
    // parallelogram: a single affine cell
    AffineMap2 m = affine_from_triangles(s[0], s[1], s[2], q[0], q[1], q[2]);
    if (!(m(s[3]) == q[3]))
      throw std::domain_error("rect_to_quad_chart: inconsistent parallelogram corners");
    return PAComplex::single_cell(Polygon::rect(x0, y0, x1, y1), m);
  }
  int shift = 0;
  if (par01 && !par12) shift = 1;  // relabel so the parallel pair is (q1q2, q3q0)
  if (!par01 && !par12)
    throw std::domain_error("rect_to_quad_chart: no parallel opposite sides");
  auto qs = [&](int i) { return q[(i + shift) % 4]; };
  auto ss = [&](int i) { return s[(i + shift) % 4]; };

  // Trapezoid labels: bases AB = (q0,q3) and CD = (q2,q1).
  Point2 A = qs(0), B = qs(3), C = qs(2), D = qs(1);
  bool flipped = false;
  {
    Rat la2 = dot(B - A, B - A), lb2 = dot(D - C, D - C);
    if (la2 == lb2) {
      // equal bases but not a parallelogram: fall through, core rejects
    }
    if (la2 > lb2) {
      std::swap(A, C);
      std::swap(B, D);
      flipped = true;
    }
  }
  PAComplex core = trapezoid_core(A, B, C, D);  // trapezoid -> rectangle, 4 cells

  // Rectangle corner images: A' etc. are the images of the trapezoid corners.
  Point2 Ap = core.eval(A), Bp = core.eval(B), Cp = core.eval(C), Dp = core.eval(D);
  // Corner correspondence back to q indices.
  // Unflipped: q0->A', q3->B', q2->C', q1->D'.
  std::array<Point2, 4> target;
  if (!flipped) {
    target = {Ap, Dp, Cp, Bp};
  } else {
    target = {Cp, Bp, Ap, Dp};
  }
  AffineMap2 aff = affine_from_triangles(ss(0), ss(1), ss(2), target[0], target[1], target[2]);
  if (!(aff(ss(3)) == target[3]))
    throw std::domain_error("rect_to_quad_chart: rectangle correspondence is not affine");
  PAComplex affc = PAComplex::single_cell(Polygon::rect(x0, y0, x1, y1), aff);
  return pa_compose(affc, pa_invert(core));
}

}  // namespace apm
