#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "apmap/graph_maps.hpp"

using namespace apm;

namespace {
PLFunction random_homeo01(std::mt19937_64& rng, int pieces, int64_t slope_scale) {
  // random increasing PL self-map of [0,1]
  std::vector<Rat> xs{Rat(0)}, ys{Rat(0)};
  for (int i = 1; i < pieces; ++i) {
    xs.push_back(Rat(i, pieces));
    ys.push_back(ys.back() + Rat(1 + (int64_t)(rng() % slope_scale), 1000));
  }
  xs.push_back(Rat(1));
  ys.push_back(ys.back() + Rat(1 + (int64_t)(rng() % slope_scale), 1000));
  Rat total = ys.back();
  for (auto& y : ys) y /= total;
  return PLFunction(xs, ys);
}
}  // namespace

TEST_CASE("line_extension: identity and pure scaling") {
  Polygon strip = Polygon::rect(Rat(-2), Rat(0), Rat(2), Rat(2));
  PLFunction id = PLFunction::identity(Rat(-4), Rat(4));
  PAComplex e = line_extension(id, strip);
  for (auto& cell : e.cells) CHECK(cell.map == AffineMap2::identity());

  // psi(x) = x/2: the extension is (x, y) -> (x/2, 2y) everywhere
  PLFunction halfm = PLFunction::linear(Rat(-4), Rat(4), Rat(-2), Rat(2));
  PAComplex s = line_extension(halfm, strip);
  Point2 q = s.eval(Point2(Rat(1), Rat(1)));
  CHECK(q == Point2(Rat(1, 2), Rat(2)));
  CHECK(s.max_abs_det_minus(Rat(1)) == 0);
}

TEST_CASE("line_extension: two-slope example from the half-grid figure") {
  // psi: x -> 2x for x >= 0, x for x < 0
  PLFunction psi({Rat(-4), Rat(0), Rat(4)}, {Rat(-4), Rat(0), Rat(8)});
  Polygon strip = Polygon::rect(Rat(-2), Rat(0), Rat(2), Rat(3));
  PAComplex e = line_extension(psi, strip);
  CHECK(e.max_abs_det_minus(Rat(1)) == 0);
  CHECK(validate_complex(e).ok());

  // Psi(x, 0) = psi(x) on the line
  CHECK(e.eval(Point2(Rat(1), Rat(0))) == Point2(Rat(2), Rat(0)));
  CHECK(e.eval(Point2(Rat(-1), Rat(0))) == Point2(Rat(-1), Rat(0)));

  // Psi(0, 2) = (2/3, 4/3)
  CHECK(e.eval(Point2(Rat(0), Rat(2))) == Point2(Rat(2, 3), Rat(4, 3)));

  // biLipschitz within 2 L^3 with L = 2
  CHECK(e.max_bilip_cells() <= 16.0 + 1e-9);
}

TEST_CASE("line_extension bound 2L^3 on random monotone maps") {
  std::mt19937_64 rng(2024);
  Polygon strip = Polygon::rect(Rat(-1), Rat(0), Rat(1), Rat(1));
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Rat> xs, ys;
    Rat x(-2), y(-2);
    xs.push_back(x);
    ys.push_back(y);
    double L = 1.0;
    for (int i = 0; i < 6; ++i) {
      Rat dx(1 + (int64_t)(rng() % 100), 150);
      Rat slope(1 + (int64_t)(rng() % 30), 10);  // in (0.1, 3]
      x += dx;
      y += dx * slope;
      xs.push_back(x);
      ys.push_back(y);
      L = std::max({L, to_double(slope), 1.0 / to_double(slope)});
    }
    xs.push_back(Rat(3));
    ys.push_back(ys.back() + (Rat(3) - xs[xs.size() - 2]));
    PLFunction psi(xs, ys);
    PAComplex e = line_extension(psi, strip);
    CHECK(e.max_abs_det_minus(Rat(1)) == 0);
    CHECK(e.max_bilip_cells() <= 2.0 * L * L * L * (1 + 1e-9));
    // Psi(x, 0) = psi(x) at every breakpoint inside the strip
    for (const Rat& bx : psi.xs) {
      if (bx <= Rat(-1) || bx >= Rat(1)) continue;
      CHECK(e.eval(Point2(bx, Rat(0))) == Point2(psi.eval(bx), Rat(0)));
    }
  }
}

TEST_CASE("factor_bilipschitz: spec example and exact composition") {
  PLFunction phi({Rat(0), Rat(1, 2), Rat(1)}, {Rat(0), Rat(1, 4), Rat(1)});
  double bil = pl_bilip(phi);
  CHECK(bil == doctest::Approx(2.0));
  auto factors = factor_bilipschitz(phi);
  CHECK((int)factors.size() <= 2 * (int)std::ceil(std::log(bil * 2 / 3) / std::log(7.0 / 6.0)) + 2);
  PLFunction comp = PLFunction::identity(Rat(0), Rat(1));
  for (auto& g : factors) {
    for (size_t i = 0; i + 1 < g.xs.size(); ++i) {
      CHECK(g.slope(i) >= Rat(2, 3));
      CHECK(g.slope(i) <= Rat(3, 2));
    }
    comp = pl_compose(g, comp);
  }
  CHECK(pl_equal(comp, phi));

  // already-gentle map returns itself
  PLFunction tame({Rat(0), Rat(1, 2), Rat(1)}, {Rat(0), Rat(2, 5), Rat(1)});
  auto single = factor_bilipschitz(tame);
  CHECK(single.size() == 1);
  CHECK(pl_equal(single[0], tame));
}

TEST_CASE("factor_bilipschitz: random campaign with bilip up to 10") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    PLFunction phi = random_homeo01(rng, 5, 4000);
    double bil = pl_bilip(phi);
    auto factors = factor_bilipschitz(phi);
    PLFunction comp = PLFunction::identity(Rat(0), Rat(1));
    for (auto& g : factors) {
      CHECK(pl_bilip(g) <= 1.5 + 1e-12);
      comp = pl_compose(g, comp);
    }
    CHECK(pl_equal(comp, phi));
    int bound = 2 * (int)std::ceil(std::log(std::max(bil * 2 / 3, 1.01)) / std::log(7.0 / 6.0)) + 2;
    CHECK((int)factors.size() <= bound);
  }
}

TEST_CASE("step4_factor_map: edge behavior, sides fixed, det 1") {
  PLFunction g({Rat(0), Rat(1, 2), Rat(1)}, {Rat(0), Rat(2, 5), Rat(1)});
  PAComplex m = step4_factor_map(g);
  CHECK(m.max_abs_det_minus(Rat(1)) == 0);
  CHECK(validate_complex(m).ok());
  for (int i = 0; i <= 8; ++i) {
    Rat x(i, 8);
    CHECK(m.eval(Point2(x, Rat(0))) == Point2(g.eval(x), Rat(0)));
    CHECK(m.eval(Point2(x, Rat(2))) == Point2(g.eval(x), Rat(2)));
  }
  for (int i = 0; i <= 8; ++i) {
    Rat y(2 * i, 8);
    CHECK(m.eval(Point2(Rat(0), y)) == Point2(Rat(0), y));
    CHECK(m.eval(Point2(Rat(1), y)) == Point2(Rat(1), y));
  }
}

TEST_CASE("edge_reparam_map realizes arbitrary reparametrizations cheaply") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    PLFunction rho = random_homeo01(rng, 2 + (int)(rng() % 4), 2500);
    EdgeReparam er = edge_reparam_map(rho);
    CHECK(er.map.max_abs_det_minus(Rat(1)) == 0);
    CHECK(validate_complex(er.map).ok());
    for (int i = 0; i <= 16; ++i) {
      Rat x(i, 16);
      CHECK(er.map.eval(Point2(x, Rat(1))) == Point2(rho.eval(x), Rat(1)));
      CHECK(er.map.eval(Point2(x, Rat(0))) == Point2(er.bottom.eval(x), Rat(0)));
    }
    for (int i = 0; i <= 4; ++i) {
      Rat y(i, 4);
      CHECK(er.map.eval(Point2(Rat(0), y)) == Point2(Rat(0), y));
      CHECK(er.map.eval(Point2(Rat(1), y)) == Point2(Rat(1), y));
    }
    CHECK(er.bottom.strictly_increasing());
  }
}

TEST_CASE("rect_to_subgraph: constant function gives the identity square") {
  PLFunction one = PLFunction::constant(Rat(0), Rat(1), Rat(1));
  PAComplex m = rect_to_subgraph(one, Rat(2));
  CHECK(m.max_abs_det_minus(Rat(1)) == 0);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    Point2 p(Rat((int64_t)(rng() % 1001), 1000), Rat((int64_t)(rng() % 1001), 1000));
    CHECK(m.eval(p) == p);
  }
}

TEST_CASE("rect_to_subgraph: f = 1/2 + x with C = 2") {
  PLFunction f = PLFunction::linear(Rat(0), Rat(1), Rat(1, 2), Rat(3, 2));
  PAComplex m = rect_to_subgraph(f, Rat(2));
  Rat S = f.integral();
  REQUIRE(S == 1);
  CHECK(m.max_abs_det_minus(Rat(1)) == 0);
  CHECK(validate_complex(m).ok());

  // image area equals S exactly
  CHECK(polygon_area(m.image_domain()) == S);

  // top edge lands on the graph at 64 sample x values, bottom stays fixed
  for (int i = 0; i <= 64; ++i) {
    Rat x(i, 64);
    CHECK(m.eval(Point2(x, S)) == Point2(x, f.eval(x)));
    CHECK(m.eval(Point2(x, Rat(0))) == Point2(x, Rat(0)));
  }
  // vertical sides: Phi(0, y) = (0, y f(0)/S), Phi(1, y) = (1, y f(1)/S)
  for (Rat y : {Rat(0), Rat(S / 2), S}) {
    CHECK(m.eval(Point2(Rat(0), y)) == Point2(Rat(0), y * f.eval(Rat(0)) / S));
    CHECK(m.eval(Point2(Rat(1), y)) == Point2(Rat(1), y * f.eval(Rat(1)) / S));
  }
}

TEST_CASE("square_to_graph: determinant S/((b-a)h)") {
  // f(x) = 1/2 + x on [0,1], h = 1: S = 1, det = 1
  PLFunction f = PLFunction::linear(Rat(0), Rat(1), Rat(1, 2), Rat(3, 2));
  PAComplex m = square_to_graph(f, Rat(1), Rat(2), Rat(1));
  CHECK(m.max_abs_det_minus(Rat(1)) == 0);

  // f == 1 on [0,1], h = 1/2: det = 2 exactly
  PLFunction one = PLFunction::constant(Rat(0), Rat(1), Rat(1));
  PAComplex m2 = square_to_graph(one, Rat(1, 2), Rat(2), Rat(2));
  CHECK(m2.max_abs_det_minus(Rat(2)) == 0);

  // f == h: boundary fixed, det 1
  PLFunction fh = PLFunction::constant(Rat(0), Rat(1), Rat(1));
  PAComplex m3 = square_to_graph(fh, Rat(1), Rat(2), Rat(1));
  CHECK(m3.max_abs_det_minus(Rat(1)) == 0);
  CHECK(m3.eval(Point2(Rat(1, 3), Rat(1))) == Point2(Rat(1, 3), Rat(1)));

  CHECK_THROWS(square_to_graph(f, Rat(1), Rat(10, 9), Rat(1)));  // f out of [h/C1, h C1]
}

TEST_CASE("square_to_band: reduction, det, boundary conditions") {
  // f2 == 0 reduces to square_to_graph
  PLFunction f1 = PLFunction::linear(Rat(0), Rat(1), Rat(1), Rat(5, 4));
  PLFunction zero = PLFunction::constant(Rat(0), Rat(1), Rat(0));
  PAComplex band = square_to_band(f1, zero, Rat(1), Rat(2), Rat(1));
  PAComplex graph = square_to_graph(f1, Rat(1), Rat(2), Rat(1));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    Point2 p(Rat((int64_t)(rng() % 1001), 1000), Rat((int64_t)(rng() % 1001), 1000));
    CHECK(band.eval(p) == graph.eval(p));
  }

  // f1 = 1 + x/4, f2 = x/4: A = 1, det = 1, bottom edge lands on graph of f2
  PLFunction g1 = PLFunction::linear(Rat(0), Rat(1), Rat(1), Rat(5, 4));
  PLFunction g2 = PLFunction::linear(Rat(0), Rat(1), Rat(0), Rat(1, 4));
  PAComplex b2 = square_to_band(g1, g2, Rat(1), Rat(2), Rat(1));
  CHECK(b2.max_abs_det_minus(Rat(1)) == 0);
  for (int i = 0; i <= 64; ++i) {
    Rat x(i, 64);
    CHECK(b2.eval(Point2(x, Rat(0))) == Point2(x, g2.eval(x)));
    CHECK(b2.eval(Point2(x, Rat(1))) == Point2(x, g1.eval(x)));
  }
  // side condition at x = a: Phi(a,y) = (a, (y/h) f1(a) + (1 - y/h) f2(a))
  for (Rat y : {Rat(1, 4), Rat(1, 2), Rat(1)}) {
    Point2 got = b2.eval(Point2(Rat(0), y));
    Rat want = y * g1.eval(Rat(0)) + (1 - y) * g2.eval(Rat(0));
    CHECK(got == Point2(Rat(0), want));
  }
  CHECK(validate_complex(b2).ok());
}
