#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "apmap/affine_blocks.hpp"
#include "apmap/pa_complex.hpp"

using namespace apm;

namespace {
const double golden = (1.0 + std::sqrt(5.0)) / 2.0;

AffineMap2 mat(double a, double b, double c, double d) {
  return AffineMap2(rat_of_double(a), rat_of_double(b), rat_of_double(c), rat_of_double(d));
}
}  // namespace

TEST_CASE("singular values: identity, skew, diagonal") {
  auto [s1, s2] = singular_values(AffineMap2::identity());
  CHECK(s1 == doctest::Approx(1.0));
  CHECK(s2 == doctest::Approx(1.0));

  auto [t1, t2] = singular_values(mat(1, 0, 1, 1));
  CHECK(t1 == doctest::Approx(golden));
  CHECK(t2 == doctest::Approx(std::sqrt(5.0) / 2 - 0.5));

  auto [u1, u2] = singular_values(mat(2, 0, 0, 0.5));
  CHECK(u1 == doctest::Approx(2.0));
  CHECK(u2 == doctest::Approx(0.5));
}

TEST_CASE("singular values agree with brute-force unit-vector maximization") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    auto rnd = [&] { return (double)(int64_t)(rng() % 4001) / 500.0 - 4.0; };
    AffineMap2 m = mat(rnd(), rnd(), rnd(), rnd());
    auto [smax, smin] = singular_values(m);
    double bmax = 0, bmin = 1e300;
    double a = to_double(m.a), b = to_double(m.b), c = to_double(m.c), d = to_double(m.d);
    for (int i = 0; i < 10000; ++i) {
      double th = 2 * M_PI * i / 10000.0;
      double x = std::cos(th), y = std::sin(th);
      double vx = a * x + b * y, vy = c * x + d * y;
      double n = std::sqrt(vx * vx + vy * vy);
      bmax = std::max(bmax, n);
      bmin = std::min(bmin, n);
    }
    CHECK(std::abs(bmax - smax) < 1e-6 * (1 + smax));
    CHECK(std::abs(bmin - smin) < 1e-6 * (1 + smax));
  }
}

TEST_CASE("bilip_of_affine") {
  CHECK(bilip_of_affine(AffineMap2::identity()) == doctest::Approx(1.0));
  double v = bilip_of_affine(mat(1, 0, 1, 1));
  CHECK(v == doctest::Approx(golden));
  CHECK(v <= std::sqrt(3.0));  // skew bound sqrt(2 + L^2), L = 1
  CHECK(bilip_of_affine(mat(2, 0, 0, 0.5)) == doctest::Approx(2.0));
  CHECK_THROWS(bilip_of_affine(mat(1, 1, 1, 1)));
}

TEST_CASE("det-1 maps have sigma_min = 1/sigma_max") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto rnd = [&] { return (double)(int64_t)(rng() % 2001) / 250.0 - 4.0; };
    Rat a = rat_of_double(rnd() + 6), b = rat_of_double(rnd()), c = rat_of_double(rnd());
    Rat d = (1 + b * c) / a;  // det = 1 exactly
    AffineMap2 m(a, b, c, d);
    REQUIRE(m.det() == 1);
    auto [smax, smin] = singular_values(m);
    CHECK(smax * smin == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("polygon area") {
  CHECK(polygon_area(Polygon::rect(Rat(0), Rat(0), Rat(1), Rat(1))) == 1);
  CHECK(polygon_area(Polygon::square_B()) == 4);
  Polygon tri({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
  CHECK(polygon_area(tri) == Rat(1, 2));
  Polygon bowtie({{Rat(0), Rat(0)}, {Rat(1), Rat(1)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
  CHECK(!polygon_is_simple(bowtie));
}

TEST_CASE("convex intersection and clipping") {
  Polygon sq = Polygon::rect(Rat(0), Rat(0), Rat(2), Rat(2));
  Polygon sq2 = Polygon::rect(Rat(1), Rat(1), Rat(3), Rat(3));
  Polygon inter = convex_intersect(sq, sq2);
  CHECK(polygon_area(inter) == 1);
  Polygon off = Polygon::rect(Rat(5), Rat(5), Rat(6), Rat(6));
  CHECK(convex_intersect(sq, off).size() == 0);
}

TEST_CASE("pa_eval: identity, one-cell diag, skew complex") {
  PAComplex id = PAComplex::identity_on(Polygon::square_B());
  Point2 p(rat_of_double(0.3), rat_of_double(-0.7));
  CHECK(id.eval(p) == p);

  PAComplex d = PAComplex::single_cell(Polygon::square_B(), mat(2, 0, 0, 0.5));
  Point2 q = d.eval(Point2(Rat(1), Rat(1)));
  CHECK(q == Point2(Rat(2), Rat(1, 2)));

  // skew with f(x) = |x| on B, evaluated at (1/2, 0) -> (1/2, 1/2)
  PLFunction absf({Rat(-1), Rat(0), Rat(1)}, {Rat(1), Rat(0), Rat(1)});
  PAComplex sk = skew_map(absf, Polygon::square_B());
  CHECK(sk.eval(Point2(Rat(1, 2), Rat(0))) == Point2(Rat(1, 2), Rat(1, 2)));
  CHECK_THROWS(sk.eval(Point2(Rat(5), Rat(0))));
}

TEST_CASE("pa_compose and pa_invert") {
  Polygon B = Polygon::square_B();
  PAComplex d1 = PAComplex::single_cell(B, mat(2, 0, 0, 0.5));
  PAComplex d2 = PAComplex::single_cell(
      Polygon::rect(Rat(-2), Rat(-1, 2), Rat(2), Rat(1, 2)), mat(0.5, 0, 0, 2));
  PAComplex idc = pa_compose(d1, d2);
  for (auto& cell : idc.cells) CHECK(cell.map == AffineMap2::identity());

  PAComplex inv = pa_invert(d1);
  CHECK(polygon_area(inv.domain) == 4);
  CHECK(inv.eval(Point2(Rat(2), Rat(1, 2))) == Point2(Rat(1), Rat(1)));

  // skew(f) composed with skew(-f) evaluates to the identity
  PLFunction f({Rat(-1), Rat(-1, 3), Rat(1, 2), Rat(1)},
               {Rat(0), Rat(1, 4), Rat(-1, 8), Rat(1, 3)});
  PAComplex s1 = skew_map(f, B);
  PAComplex s2 = skew_map(f.scaled_y(Rat(-1)), Polygon::rect(Rat(-1), Rat(-2), Rat(1), Rat(2)));
  PAComplex comp = pa_compose(s1, s2);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    Rat x = Rat((int64_t)(rng() % 20001) - 10000, 10000);
    Rat y = Rat((int64_t)(rng() % 20001) - 10000, 10000);
    Point2 p(x, y);
    Point2 q = comp.eval(p);
    CHECK(to_double(rat_abs(q.x - p.x) + rat_abs(q.y - p.y)) <= 1e-10);
  }
  // inverse round trip
  PAComplex s1inv = pa_invert(s1);
  for (int i = 0; i < 100; ++i) {
    Rat x = Rat((int64_t)(rng() % 2001) - 1000, 1000);
    Rat y = Rat((int64_t)(rng() % 2001) - 1000, 1000);
    Point2 p(x, y);
    CHECK(s1inv.eval(s1.eval(p)) == p);
  }
}

TEST_CASE("pa_invert rejects non-injective complexes") {
  PAComplex bad;
  bad.domain = Polygon::rect(Rat(0), Rat(0), Rat(2), Rat(1));
  bad.cells.push_back({Polygon::rect(Rat(0), Rat(0), Rat(1), Rat(1)), AffineMap2::identity()});
  // second cell folds onto the first
  bad.cells.push_back({Polygon::rect(Rat(1), Rat(0), Rat(2), Rat(1)),
                       AffineMap2(Rat(-1), Rat(0), Rat(0), Rat(1), Rat(2), Rat(0))});
  CHECK_THROWS_WITH_AS(pa_invert(bad), doctest::Contains("not injective"), std::domain_error);
}

TEST_CASE("validate_complex: identity clean, broken edge reported") {
  PAComplex id = PAComplex::identity_on(Polygon::square_B());
  CHECK(validate_complex(id).ok());

  PAComplex bad;
  bad.domain = Polygon::square_B();
  bad.cells.push_back({Polygon::rect(Rat(-1), Rat(-1), Rat(0), Rat(1)), AffineMap2::identity()});
  bad.cells.push_back({Polygon::rect(Rat(0), Rat(-1), Rat(1), Rat(1)), mat(1, 0, 0, 2)});
  auto rep = validate_complex(bad);
  bool has_cont = false;
  for (auto& v : rep.violations) has_cont |= (v.kind == "continuity");
  CHECK(has_cont);

  PLFunction absf({Rat(-1), Rat(0), Rat(1)}, {Rat(1), Rat(0), Rat(1)});
  PAComplex sk = skew_map(absf, Polygon::square_B());
  auto rep2 = validate_complex(sk);
  CHECK(rep2.ok());
  CHECK(rep2.cell_area_sum == rep2.domain_area);
}

TEST_CASE("skew_map: spec examples") {
  Polygon B = Polygon::square_B();
  PLFunction zero = PLFunction::constant(Rat(-1), Rat(1), Rat(0));
  PAComplex s0 = skew_map(zero, B);
  for (auto& cell : s0.cells) CHECK(cell.map == AffineMap2::identity());

  PLFunction absf({Rat(-1), Rat(0), Rat(1)}, {Rat(1), Rat(0), Rat(1)});
  PAComplex sk = skew_map(absf, B);
  REQUIRE(sk.size() == 2);
  CHECK(sk.cells[0].map.det() == 1);
  CHECK(sk.cells[1].map.det() == 1);
  CHECK(sk.max_bilip_cells() == doctest::Approx(golden));
  CHECK(sk.max_bilip_cells() <= std::sqrt(3.0));

  PLFunction half = PLFunction::linear(Rat(-1), Rat(1), Rat(-1, 2), Rat(1, 2));
  PAComplex sh = skew_map(half, B);
  CHECK(sh.max_bilip_cells() == doctest::Approx(bilip_of_affine(mat(1, 0, 0.5, 1))));
  CHECK(sh.max_bilip_cells() <= 1.5);  // sqrt(2 + 1/4)
}

TEST_CASE("trapezoid_to_rectangle: exact matrices for a=1,b=3,h=1") {
  TrapezoidSpec t;
  t.A = Point2(Rat(1, 2), Rat(1, 2));
  t.B = Point2(Rat(1, 2), Rat(-1, 2));
  t.C = Point2(Rat(-1, 2), Rat(-3, 2));
  t.D = Point2(Rat(-1, 2), Rat(3, 2));
  PAComplex phi = trapezoid_to_rectangle(t);
  REQUIRE(phi.size() == 4);
  for (auto& cell : phi.cells) CHECK(cell.map.det() == 1);

  Polygon img = phi.image_domain();
  CHECK(polygon_area(img) == 2);
  CHECK(polygon_area(img) == polygon_area(t.polygon()));

  long iab = phi.locate(Point2(Rat(1, 4), Rat(0)));
  REQUIRE(iab >= 0);
  CHECK(phi.cells[iab].map.a == Rat(1, 2));
  CHECK(phi.cells[iab].map.b == 0);
  CHECK(phi.cells[iab].map.c == 0);
  CHECK(phi.cells[iab].map.d == 2);

  long iad = phi.locate(Point2(Rat(0), Rat(1, 2)));
  REQUIRE(iad >= 0);
  CHECK(phi.cells[iad].map.a == Rat(3, 4));
  CHECK(phi.cells[iad].map.b == Rat(-1, 4));
  CHECK(phi.cells[iad].map.c == 1);
  CHECK(phi.cells[iad].map.d == 1);

  CHECK(phi.max_bilip_cells() <= 6.0 + 1e-12);

  CHECK(phi.eval(t.A) == Point2(Rat(1, 2), Rat(1)));
  CHECK(phi.eval(t.B) == Point2(Rat(1, 2), Rat(-1)));
  CHECK(phi.eval(Point2(Rat(1, 2), Rat(0))) == Point2(Rat(1, 2), Rat(0)));

  CHECK(validate_complex(phi).ok());
}

TEST_CASE("trapezoid preconditions") {
  TrapezoidSpec t;  // a == b
  t.A = Point2(Rat(1), Rat(1));
  t.B = Point2(Rat(1), Rat(-1));
  t.C = Point2(Rat(-1), Rat(-1));
  t.D = Point2(Rat(-1), Rat(1));
  CHECK_THROWS_WITH_AS(trapezoid_to_rectangle(t), doctest::Contains("a < b"), std::domain_error);

  TrapezoidSpec tall;  // 2h > a + b
  tall.A = Point2(Rat(4), Rat(1, 4));
  tall.B = Point2(Rat(4), Rat(-1, 4));
  tall.C = Point2(Rat(0), Rat(-1));
  tall.D = Point2(Rat(0), Rat(1));
  CHECK_THROWS_WITH_AS(trapezoid_to_rectangle(tall), doctest::Contains("2h"), std::domain_error);
}

TEST_CASE("distortion_of") {
  auto mk = [](Rat a, Rat b, Rat h) {
    TrapezoidSpec t;
    t.A = Point2(h / 2, a / 2);
    t.B = Point2(h / 2, -a / 2);
    t.C = Point2(-h / 2, -b / 2);
    t.D = Point2(-h / 2, b / 2);
    return t;
  };
  Distortion d1 = distortion_of(mk(Rat(1), Rat(3), Rat(1)));
  CHECK(d1.slope_ratio == 2);
  CHECK(d1.base_ratio == 3);
  Distortion d2 = distortion_of(mk(Rat(1), Rat(3, 2), Rat(1)));
  CHECK(d2.slope_ratio == Rat(1, 2));
  CHECK(d2.base_ratio == Rat(3, 2));
  Distortion d3 = distortion_of(mk(Rat(2), Rat(4), Rat(3)));
  CHECK(d3.slope_ratio == Rat(2, 3));
  CHECK(d3.base_ratio == 2);
}

TEST_CASE("trapezoid bound holds on random admissible instances") {
  // The explicit max(2b/a, sqrt(3 + ((b-a)/2h)^2)) bound is for the isosceles
  // four-triangle map; the isosceles-reduction skew contributes its own
  // sqrt(2 + L^2) factor on top for slanted instances.
  std::mt19937_64 rng(4242);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Rat a(1 + (int64_t)(rng() % 400), 100);
    Rat b = a + Rat(1 + (int64_t)(rng() % 400), 100);
    Rat hmax = (a + b) / 2;
    Rat h = hmax * Rat(1 + (int64_t)(rng() % 99), 100);
    bool iso = trial % 2 == 0;
    Rat off = iso ? Rat(0) : (b - a) / 2 * Rat((int64_t)(rng() % 201) - 100, 100);
    TrapezoidSpec t;
    t.A = Point2(h / 2, off + a / 2);
    t.B = Point2(h / 2, off - a / 2);
    t.C = Point2(-h / 2, -b / 2);
    t.D = Point2(-h / 2, b / 2);
    PAComplex phi = trapezoid_to_rectangle(t);
    ++tested;
    double bound = std::max(2.0 * to_double(b / a),
                            std::sqrt(3.0 + std::pow(to_double((b - a) / (2 * h)), 2)));
    if (!iso) {
      double lsk = std::abs(to_double(off / h));
      bound *= std::sqrt(2.0 + lsk * lsk);
    }
    CHECK(phi.max_bilip_cells() <= bound * (1 + 1e-9));
    CHECK(phi.max_abs_det_minus(Rat(1)) == 0);
    CHECK(polygon_area(phi.image_domain()) == polygon_area(t.polygon()));
  }
  CHECK(tested == 200);
}

TEST_CASE("rect_to_quad_chart: constant determinant, corner-true, sides affine") {
  std::array<Point2, 4> q = {Point2(Rat(0), Rat(0)), Point2(Rat(3), Rat(0)),
                             Point2(Rat(2), Rat(2)), Point2(Rat(1, 2), Rat(2))};
  PAComplex ch = rect_to_quad_chart(Rat(-1), Rat(-1), Rat(1), Rat(1), q);
  Rat target_det = polygon_area(Polygon({q[0], q[1], q[2], q[3]})) / 4;
  CHECK(ch.max_abs_det_minus(target_det) == 0);
  CHECK(ch.eval(Point2(Rat(-1), Rat(-1))) == q[0]);
  CHECK(ch.eval(Point2(Rat(1), Rat(-1))) == q[1]);
  CHECK(ch.eval(Point2(Rat(1), Rat(1))) == q[2]);
  CHECK(ch.eval(Point2(Rat(-1), Rat(1))) == q[3]);
  // bottom side affine: midpoint to midpoint
  Point2 mb = ch.eval(Point2(Rat(0), Rat(-1)));
  CHECK(mb == Point2(Rat(3, 2), Rat(0)));
  CHECK(validate_complex(ch).ok());
}
