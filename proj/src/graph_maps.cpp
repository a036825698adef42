#include "apmap/graph_maps.hpp"

#include <algorithm>
#include <functional>

#include "apmap/affine_blocks.hpp"

namespace apm {

namespace {

// Breakpoints of a PL function restricted to [lo, hi], with the interval ends.
std::vector<Rat> grid_in(const std::vector<Rat>& bps, const Rat& lo, const Rat& hi) {
  std::vector<Rat> g;
  g.push_back(lo);
  for (const Rat& b : bps)
    if (b > lo && b < hi) g.push_back(b);
  g.push_back(hi);
  return g;
}

struct LinPiece {
  Rat slope, offset;  // value = slope * t + offset
};

LinPiece piece_at(const PLFunction& f, const Rat& t0, const Rat& t1) {
  // clamped-linear evaluation so the grid may extend past f's breakpoints
  Rat v0 = f.eval_clamped_linear(t0), v1 = f.eval_clamped_linear(t1);
  Rat s = (v1 - v0) / (t1 - t0);
  return {s, v0 - s * t0};
}

// F: (xt, y) -> ((phi(xt+y) + phi(xt-y))/2, y) and
// H: (xt, y) -> (xt, (phi(xt+y) - phi(xt-y))/2) on the diamond grid induced by
// phi's breakpoints along the characteristics, clipped to the y-band.
void build_wave_pair(const PLFunction& phi, const Rat& s_lo, const Rat& s_hi, const Rat& t_lo,
                     const Rat& t_hi, const Rat& y0, const Rat& y1, PAComplex& F, PAComplex& H) {
  std::vector<Rat> sg = grid_in(phi.xs, s_lo, s_hi);
  std::vector<Rat> tg = grid_in(phi.xs, t_lo, t_hi);
  F.cells.clear();
  H.cells.clear();
  auto corner = [](const Rat& s, const Rat& t) { return Point2((s + t) / 2, (s - t) / 2); };
  for (size_t i = 0; i + 1 < sg.size(); ++i) {
    for (size_t j = 0; j + 1 < tg.size(); ++j) {
      Polygon diamond(
          {corner(sg[i], tg[j]), corner(sg[i], tg[j + 1]), corner(sg[i + 1], tg[j + 1]),
           corner(sg[i + 1], tg[j])});
      diamond = polygon_normalize(diamond);
      if (diamond.size() < 3) continue;
      diamond = clip_halfplane(diamond, Point2(Rat(0), y0), Point2(Rat(1), y0));
      if (diamond.size() < 3) continue;
      diamond = clip_halfplane(diamond, Point2(Rat(0), y1), Point2(Rat(-1), y1));
      if (diamond.size() < 3) continue;
      LinPiece P = piece_at(phi, sg[i], sg[i + 1]);
      LinPiece Q = piece_at(phi, tg[j], tg[j + 1]);
      AffineMap2 fm((P.slope + Q.slope) / 2, (P.slope - Q.slope) / 2, Rat(0), Rat(1),
                    (P.offset + Q.offset) / 2, Rat(0));
      AffineMap2 hm(Rat(1), Rat(0), (P.slope - Q.slope) / 2, (P.slope + Q.slope) / 2, Rat(0),
                    (P.offset - Q.offset) / 2);
      F.cells.push_back({diamond, fm});
      H.cells.push_back({diamond, hm});
    }
  }
  Polygon dom = union_boundary(F.cells);
  F.domain = dom;
  H.domain = dom;
}

Rat poly_min_x(const Polygon& p) {
  Rat m = p[0].x;
  for (auto& v : p.pts) m = std::min(m, v.x);
  return m;
}
Rat poly_max_x(const Polygon& p) {
  Rat m = p[0].x;
  for (auto& v : p.pts) m = std::max(m, v.x);
  return m;
}
Rat poly_min_y(const Polygon& p) {
  Rat m = p[0].y;
  for (auto& v : p.pts) m = std::min(m, v.y);
  return m;
}
Rat poly_max_y(const Polygon& p) {
  Rat m = p[0].y;
  for (auto& v : p.pts) m = std::max(m, v.y);
  return m;
}

// Periodic skew extension: g on [0,1] -> ghat on [lo, hi] with
// ghat(x) = g(-x) + 2x on [-1,0] and ghat(x + 2k) = ghat(x) + 2k.
PLFunction extend_skew_periodic(const PLFunction& g, int lo, int hi) {
  std::vector<Rat> xs, ys;
  auto push = [&](const Rat& x, const Rat& y) {
    if (!xs.empty() && xs.back() == x) return;
    xs.push_back(x);
    ys.push_back(y);
  };
  for (int k = lo; k < hi; k += 2) {
    // direct branch on [k, k+1]
    for (size_t i = 0; i < g.xs.size(); ++i) {
      push(g.xs[i] + Rat(k), g.ys[i] + Rat(k));
    }
    // reflected branch on [k+1, k+2]: x = (k+2) - t, value = g(t) - 2t + (k+2)
    for (size_t i = g.xs.size(); i-- > 0;) {
      Rat t = g.xs[i];
      push(Rat(k + 2) - t, g.ys[i] - 2 * t + Rat(k + 2));
    }
  }
  return PLFunction(std::move(xs), std::move(ys));
}

bool step4_admissible(const PLFunction& g) {
  if (g.x_min() != 0 || g.x_max() != 1) return false;
  if (g.ys.front() != 0 || g.ys.back() != 1) return false;
  for (size_t i = 0; i + 1 < g.xs.size(); ++i) {
    Rat s = g.slope(i);
    if (!(s >= Rat(1, 2) && s < Rat(2))) return false;
  }
  for (size_t i = 0; i < g.xs.size(); ++i) {
    if (rat_abs(g.ys[i] - g.xs[i]) > Rat(1, 4)) return false;
  }
  return true;
}

}  // namespace

PAComplex pa_transform(const PAComplex& c, const AffineMap2& pre, const AffineMap2& post) {
  PAComplex out;
  AffineMap2 prei = pre.inverse();
  out.domain = affine_image(c.domain, prei);
  out.cells.reserve(c.cells.size());
  for (const auto& cell : c.cells) {
    out.cells.push_back({affine_image(cell.support, prei), post.after(cell.map).after(pre)});
  }
  return out;
}

PAComplex line_extension(const PLFunction& psi, const Polygon& strip) {
  if (!psi.strictly_increasing())
    throw std::domain_error("line_extension: psi must be strictly increasing");
  if (!polygon_is_convex(strip)) throw std::domain_error("line_extension: strip must be convex");
  PLFunction phi = pl_inverse(psi);

  Rat x0 = poly_min_x(strip), x1 = poly_max_x(strip);
  Rat y0 = poly_min_y(strip), y1 = poly_max_y(strip);
  Rat smin(1);
  for (size_t i = 0; i + 1 < phi.xs.size(); ++i) {
    Rat s = phi.slope(i);
    if (s <= 0) throw std::domain_error("line_extension: psi must be strictly increasing");
    smin = std::min(smin, s);
  }
  PLFunction psil = psi;
  Rat spread = (y1 - y0) + 1;
  Rat xt_lo = psil.eval_clamped_linear(x0) - spread / smin - 1;
  Rat xt_hi = psil.eval_clamped_linear(x1) + spread / smin + 1;

  PAComplex F, H;
  build_wave_pair(phi, xt_lo + y0, xt_hi + y1, xt_lo - y1, xt_hi - y0, y0, y1, F, H);
  PAComplex Finv = pa_invert(F);  // Psi = H o F^{-1}
  PAComplex res = pa_compose(Finv.restricted_to_convex(strip), H);
  res.domain = strip;
  return res;
}

std::vector<PLFunction> factor_bilipschitz(const PLFunction& phi_in) {
  if (phi_in.x_min() != 0 || phi_in.x_max() != 1 || phi_in.ys.front() != 0 ||
      phi_in.ys.back() != 1 || !phi_in.strictly_increasing())
    throw std::domain_error(
        "factor_bilipschitz: need an increasing self-homeomorphism of [0,1]");

  auto max_slope = [](const PLFunction& f) {
    Rat m(0);
    for (size_t i = 0; i + 1 < f.xs.size(); ++i) m = std::max(m, f.slope(i));
    return m;
  };

  // One step: slope 7/6 on X = {slope > 3/2}, 2/3 on a prefix Z of
  // Y = {slope < 1} with measure l(X)/2, 1 elsewhere.
  auto build_step = [](const PLFunction& f) {
    Rat lx(0);
    for (size_t i = 0; i + 1 < f.xs.size(); ++i)
      if (f.slope(i) > Rat(3, 2)) lx += f.xs[i + 1] - f.xs[i];
    Rat quota = lx / 2;
    std::vector<Rat> xs{Rat(0)}, ys{Rat(0)};
    Rat y(0), used(0);
    for (size_t i = 0; i + 1 < f.xs.size(); ++i) {
      Rat w = f.xs[i + 1] - f.xs[i];
      Rat s = f.slope(i);
      if (s > Rat(3, 2)) {
        y += w * Rat(7, 6);
      } else if (s < 1 && used < quota) {
        Rat take = std::min(w, Rat(quota - used));
        used += take;
        y += take * Rat(2, 3);
        if (take < w) {
          xs.push_back(f.xs[i] + take);
          ys.push_back(y);
          y += (w - take);
        }
      } else {
        y += w;
      }
      xs.push_back(f.xs[i + 1]);
      ys.push_back(y);
    }
    if (used != quota)
      throw std::logic_error("factor_bilipschitz: Z quota not met (measure bookkeeping)");
    if (y != 1) throw std::logic_error("factor_bilipschitz: step does not fix 1");
    return PLFunction(std::move(xs), std::move(ys));
  };

  std::vector<PLFunction> head;
  PLFunction chi = phi_in;
  while (max_slope(chi) > Rat(3, 2)) {
    PLFunction f1 = build_step(chi);
    head.push_back(f1);
    chi = pl_simplify(pl_compose(chi, pl_inverse(f1)));
  }
  std::vector<PLFunction> tail;
  PLFunction rho = pl_inverse(chi);
  while (max_slope(rho) > Rat(3, 2)) {
    PLFunction r1 = build_step(rho);
    tail.push_back(pl_inverse(r1));
    rho = pl_simplify(pl_compose(rho, pl_inverse(r1)));
  }
  std::vector<PLFunction> out = head;
  out.push_back(pl_inverse(rho));
  for (auto it = tail.rbegin(); it != tail.rend(); ++it) out.push_back(*it);

  std::vector<PLFunction> cleaned;
  PLFunction id01 = PLFunction::identity(Rat(0), Rat(1));
  for (auto& f : out)
    if (!pl_equal(f, id01)) cleaned.push_back(f);
  if (cleaned.empty()) cleaned.push_back(phi_in);
  return cleaned;
}

PAComplex step4_factor_map(const PLFunction& g) {
  if (!step4_admissible(g))
    throw std::domain_error("step4_factor_map: factor must be gentle (slopes in [1/2,2), "
                            "within 1/4 of the identity)");
  PLFunction ghat = extend_skew_periodic(g, -6, 8);

  Polygon R2 = Polygon::rect(Rat(0), Rat(0), Rat(1), Rat(2));
  PAComplex F, H;
  Rat xt_lo(-1), xt_hi(2), y0(0), y1(2);
  build_wave_pair(ghat, xt_lo + y0, xt_hi + y1, xt_lo - y1, xt_hi - y0, y0, y1, F, H);
  // Psi^{-1} = F o H^{-1}, restricted to the rectangle
  PAComplex psi_inv = pa_compose(pa_invert(H).restricted_to_convex(R2), F);

  Polygon box = Polygon::rect(Rat(-2), Rat(-2), Rat(3), Rat(4));
  PLFunction s0({Rat(-2), Rat(1, 4), Rat(3, 4), Rat(3)}, {Rat(0), Rat(0), Rat(-1), Rat(-1)});
  PAComplex Phi0 = skew_map(s0, box);
  PAComplex Phi0i = pa_invert(Phi0);

  auto shear_from = [&](const Rat& lo, const Rat& hi) {
    // t(y) = y - ghat(y) on [lo,hi], zero elsewhere
    std::vector<Rat> xs{Rat(-2)}, ys{Rat(0)};
    PLFunction mid = ghat.restricted(lo, hi);
    for (size_t i = 0; i < mid.xs.size(); ++i) {
      xs.push_back(mid.xs[i]);
      ys.push_back(mid.xs[i] - mid.ys[i]);
    }
    xs.push_back(Rat(4));
    ys.push_back(Rat(0));
    return PLFunction(std::move(xs), std::move(ys));
  };
  PAComplex Phi1 = skew_map_x(shear_from(Rat(0), Rat(1)), box);

  PLFunction s2({Rat(-2), Rat(1, 4), Rat(3, 4), Rat(3)}, {Rat(0), Rat(0), Rat(1), Rat(1)});
  PAComplex Phi2 = skew_map(s2, box);
  PAComplex Phi2i = pa_invert(Phi2);
  PAComplex Phi3 = skew_map_x(shear_from(Rat(1), Rat(2)), box);

  PAComplex acc = pa_compose(psi_inv, Phi0);
  acc = pa_compose(acc, Phi1);
  acc = pa_compose(acc, Phi0i);
  acc = pa_compose(acc, Phi2);
  acc = pa_compose(acc, Phi3);
  acc = pa_compose(acc, Phi2i);
  acc.domain = R2;
  return acc;
}

PAComplex rect_to_subgraph(const PLFunction& f, const Rat& C) {
  if (f.x_min() != 0 || f.x_max() != 1)
    throw std::domain_error("rect_to_subgraph: f must live on [0,1]");
  if (C <= 0) throw std::invalid_argument("rect_to_subgraph: C must be positive");
  for (const Rat& y : f.ys) {
    if (!(y >= 1 / C && y <= C))
      throw std::domain_error("rect_to_subgraph: f out of [1/C, C]");
  }
  Rat S = f.integral();

  // Step 1: vertical strips of width < 1/C, rectangles to subgraph trapezoids.
  std::vector<Rat> xs;
  for (size_t i = 0; i + 1 < f.xs.size(); ++i) {
    Rat w = f.xs[i + 1] - f.xs[i];
    Rat wc = w * C;
    BigInt parts_big = numerator(wc) / denominator(wc) + 1;
    long parts = (long)parts_big.convert_to<long long>();
    if (parts < 1) parts = 1;
    for (long k = 0; k < parts; ++k) xs.push_back(f.xs[i] + w * Rat(k, parts));
  }
  xs.push_back(Rat(1));

  PAComplex phi0;
  phi0.domain = Polygon::rect(Rat(0), Rat(0), Rat(1), S);
  std::vector<Rat> s_grid{Rat(0)};
  std::vector<Rat> phi_ys{Rat(0)};
  Rat s(0);
  for (size_t k = 0; k + 1 < xs.size(); ++k) {
    Rat fx0 = f.eval(xs[k]), fx1 = f.eval(xs[k + 1]);
    Rat strip_area = (xs[k + 1] - xs[k]) * (fx0 + fx1) / 2;
    Rat w = strip_area / S;
    std::array<Point2, 4> quad = {Point2(xs[k], Rat(0)), Point2(xs[k + 1], Rat(0)),
                                  Point2(xs[k + 1], fx1), Point2(xs[k], fx0)};
    PAComplex chart = rect_to_quad_chart(s, Rat(0), s + w, S, quad);
    for (auto& cell : chart.cells) phi0.cells.push_back(cell);
    s += w;
    s_grid.push_back(s);
    phi_ys.push_back(xs[k + 1]);
  }
  s_grid.back() = Rat(1);

  PLFunction phi(s_grid, phi_ys);  // bottom boundary homeomorphism of phi0

  PAComplex corr = PAComplex::identity_on(Polygon::rect(Rat(0), Rat(0), Rat(1), Rat(2)));
  bool first = true;
  PLFunction id01 = PLFunction::identity(Rat(0), Rat(1));
  for (const PLFunction& g : factor_bilipschitz(phi)) {
    if (pl_equal(g, id01)) continue;
    PAComplex m = step4_factor_map(g);
    corr = first ? std::move(m) : pa_compose(corr, m);
    first = false;
  }
  AffineMap2 A(Rat(1), Rat(0), Rat(0), Rat(2) / S);  // [0,1]x[0,S] -> [0,1]x[0,2]
  PAComplex corr_S = pa_transform(corr, A, A.inverse());
  PAComplex res = pa_compose(pa_invert(corr_S), phi0);
  res.domain = Polygon::rect(Rat(0), Rat(0), Rat(1), S);
  return res;
}

PAComplex square_to_graph(const PLFunction& f, const Rat& h, const Rat& C1, const Rat& C2) {
  Rat a = f.x_min(), b = f.x_max();
  if (h <= 0 || C1 <= 0 || C2 <= 0) throw std::invalid_argument("square_to_graph: bad constants");
  for (const Rat& y : f.ys)
    if (!(y >= h / C1 && y <= h * C1))
      throw std::domain_error("square_to_graph: f out of [h/C1, h*C1]");
  if (!(b - a >= h / C2 && b - a <= C2 * h))
    throw std::domain_error("square_to_graph: aspect out of [h/C2, C2*h]");

  PLFunction fh = f.x_transformed(Rat(1) / (b - a), -a / (b - a));
  Rat inner_C = Rat(2);
  for (const Rat& y : fh.ys) inner_C = std::max(inner_C, std::max(y, Rat(1 / y)));
  PAComplex inner = rect_to_subgraph(fh, inner_C);
  Rat S0 = fh.integral();
  AffineMap2 pre(Rat(1) / (b - a), Rat(0), Rat(0), S0 / h, -a / (b - a), Rat(0));
  AffineMap2 post(b - a, Rat(0), Rat(0), Rat(1), a, Rat(0));
  PAComplex out = pa_transform(inner, pre, post);
  out.domain = Polygon::rect(a, Rat(0), b, h);
  return out;
}

PAComplex square_to_band(const PLFunction& f1, const PLFunction& f2, const Rat& h, const Rat& C1,
                         const Rat& C2) {
  if (f1.x_min() != f2.x_min() || f1.x_max() != f2.x_max())
    throw std::domain_error("square_to_band: domains of f1 and f2 differ");
  PLFunction diff = pl_diff(f1, f2);
  for (const Rat& y : diff.ys)
    if (!(y >= h / C1 && y <= h * C1))
      throw std::domain_error("square_to_band: f1 - f2 out of [h/C1, h*C1]");
  PAComplex base = square_to_graph(diff, h, C1, C2);
  Rat top(0);
  for (const Rat& y : diff.ys) top = std::max(top, y);
  Polygon box = Polygon::rect(f1.x_min(), Rat(0), f1.x_max(), top);
  PAComplex lift = skew_map(f2, box);
  PAComplex out = pa_compose(base, lift);
  out.domain = Polygon::rect(f1.x_min(), Rat(0), f1.x_max(), h);
  return out;
}


namespace {

Rat signed_area2(const Point2& a, const Point2& b, const Point2& c) {
  return cross(b - a, c - a);
}

bool emit_tri(std::vector<AffineCell>& cells, const Point2& s0, const Point2& s1,
              const Point2& s2, const Point2& t0, const Point2& t1, const Point2& t2) {
  Rat sa = signed_area2(s0, s1, s2), ta = signed_area2(t0, t1, t2);
  if (sa <= 0 || ta <= 0 || sa != ta) return false;
  cells.push_back({Polygon({s0, s1, s2}), affine_from_triangles(s0, s1, s2, t0, t1, t2)});
  return true;
}

// Exact Gauss solver: A x = b with free columns pinned to the provided
// canonical values. Returns false if inconsistent.
bool solve_linear_pinned(std::vector<std::vector<Rat>> A, std::vector<Rat> b,
                         const std::vector<Rat>& canonical, std::vector<Rat>& x) {
  size_t rows = A.size(), cols = canonical.size();
  std::vector<long> pivot_of_col(cols, -1);
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = r;
    while (sel < rows && A[sel][c] == 0) ++sel;
    if (sel == rows) continue;
    std::swap(A[sel], A[r]);
    std::swap(b[sel], b[r]);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      Rat f = A[i][c] / A[r][c];
      for (size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
      b[i] -= f * b[r];
    }
    pivot_of_col[c] = (long)r;
    ++r;
  }
  for (size_t i = r; i < rows; ++i)
    if (b[i] != 0) return false;  // inconsistent
  x.assign(cols, Rat(0));
  // assign free columns their canonical values, then back-substitute pivots
  for (size_t c = 0; c < cols; ++c)
    if (pivot_of_col[c] < 0) x[c] = canonical[c];
  for (size_t c = 0; c < cols; ++c) {
    long pr = pivot_of_col[c];
    if (pr < 0) continue;
    Rat rhs = b[pr];
    for (size_t j = 0; j < cols; ++j) {
      if (j == c || A[pr][j] == 0) continue;
      if (pivot_of_col[j] >= 0) continue;  // eliminated already except frees
      rhs -= A[pr][j] * x[j];
    }
    x[c] = rhs / A[pr][c];
  }
  return true;
}

// Transport layer between the prescribed top edge (a_i -> p_i at height 1) and
// a midline whose source polyline (s_j, sigma_j) is given up to the one free
// position s_n = x_n. Solves the target midline polyline N.
bool solve_top_layer(const std::vector<Rat>& a, const std::vector<Rat>& p,
                     std::vector<Rat>& sigma, std::vector<Rat>& s,
                     std::vector<AffineCell>* cells, std::vector<Point2>& N) {
  size_t n = a.size() - 1;
  if (n < 2 || sigma.size() != n + 2) return false;
  s.assign(n + 2, Rat(0));
  N.assign(n + 2, Point2());
  s[0] = 0;
  s[n + 1] = 1;
  for (size_t j = 1; j < n; ++j) s[j] = (a[j - 1] + a[j]) / 2;
  if (!(sigma[0] == Rat(1, 2) && sigma[n + 1] == Rat(1, 2))) return false;
  for (const Rat& sg : sigma)
    if (!(sg > 0 && sg < 1)) return false;
  N[0] = Point2(Rat(0), Rat(1, 2));
  N[n + 1] = Point2(Rat(1), Rat(1, 2));

  auto S = [&](size_t j) { return Point2(s[j], sigma[j]); };
  auto A2 = [&](size_t i) { return Point2(a[i], Rat(1)); };
  auto P2 = [&](size_t i) { return Point2(p[i], Rat(1)); };

  // N_1: the vertical left edge pins x_1 = area-matched; U_0 pins y_1.
  {
    // L_0 src: (S_0, S_1, A_0), tgt: (N_0, N_1, P_0) with vertical left edge
    Rat srcL = signed_area2(S(0), S(1), A2(0));
    if (!(srcL > 0)) return false;
    Rat x1 = 2 * srcL;  // tgt area2 = x_1 / 2
    if (p[1] <= 0) return false;
    Rat srcU = signed_area2(A2(0), S(1), A2(1));
    if (!(srcU > 0)) return false;
    Rat y1 = 1 - srcU / p[1];
    if (!(y1 > 0 && y1 < 1)) return false;
    N[1] = Point2(x1, y1);
  }
  // pairs [L_j, U_j] solve N_{j+1} for j = 1..n-2
  for (size_t j = 1; j + 1 < n; ++j) {
    Rat srcL = signed_area2(S(j), S(j + 1), A2(j));
    Rat srcU = signed_area2(A2(j), S(j + 1), A2(j + 1));
    if (!(srcL > 0 && srcU > 0)) return false;
    if (p[j + 1] == p[j]) return false;
    Rat y = 1 - srcU / (p[j + 1] - p[j]);
    if (!(y > 0 && y < 1)) return false;
    Rat c1 = 1 - N[j].y;
    Rat c2 = p[j] - N[j].x;
    if (c1 == 0) return false;
    Rat x = N[j].x + (srcL + (y - N[j].y) * c2) / c1;
    N[j + 1] = Point2(x, y);
  }
  // Final triple [L_{n-1}, U_{n-1}, L_n]: s_n stays the canonical midpoint,
  // L_n forces x_n = s_n, and (y_n, sigma_n) solve the remaining 2x2 system.
  {
    size_t j = n - 1;
    s[n] = (a[n - 1] + a[n]) / 2;
    Rat xn = s[n];
    if (!(xn > N[j].x && xn < 1)) return false;
    // U_{n-1}: (1 - y_n)(p_n - p_{n-1}) = (1 - sigma_n)(a_n - a_{n-1})
    // L_{n-1}: (xn - N_j.x) c1 - (y_n - N_j.y) c2 = srcL(sigma_n)
    //   srcL = cross(S_n - S_{n-1}, A_{n-1} - S_{n-1}) with S_n = (s_n, sigma_n)
    Rat c1 = 1 - N[j].y;
    Rat c2 = p[j] - N[j].x;
    Rat dp = p[n] - p[j], da = a[n] - a[j];
    if (dp == 0) return false;
    // srcL as linear function of sigma_n:
    //   cross((s_n - s_j, sig_n - sig_j), (a_j - s_j, 1 - sig_j))
    Rat k0 = (s[n] - s[j]) * (1 - sigma[j]) + sigma[j] * (a[j] - s[j]);
    Rat k1 = -(a[j] - s[j]);  // coefficient of sigma_n
    // L: (xn - Njx) c1 - (y - Njy) c2 = k0 + k1 sigma_n
    // U: y = 1 - (1 - sigma_n) da / dp  =>  y = (1 - da/dp) + (da/dp) sigma_n
    Rat u0 = 1 - da / dp, u1 = da / dp;
    // substitute: (xn - Njx) c1 - (u0 + u1 sig - Njy) c2 = k0 + k1 sig
    Rat lhs_const = (xn - N[j].x) * c1 - (u0 - N[j].y) * c2;
    Rat coef = k1 + u1 * c2;
    if (coef == 0) return false;
    Rat sig = (lhs_const - k0) / coef;
    if (!(sig > 0 && sig < 1)) return false;
    Rat y = u0 + u1 * sig;
    if (!(y > 0 && y < 1)) return false;
    sigma[n] = sig;
    N[n] = Point2(xn, y);
  }
  for (size_t j = 0; j + 1 < N.size(); ++j)
    if (!(N[j].x < N[j + 1].x && s[j] < s[j + 1])) return false;
  for (size_t j = 1; j + 1 < N.size(); ++j)
    if (!(N[j].y > 0 && N[j].y < 1)) return false;

  if (cells) {
    for (size_t j = 0; j <= n; ++j) {
      if (!emit_tri(*cells, S(j), S(j + 1), A2(j), N[j], N[j + 1], P2(j))) return false;
      if (j < n) {
        if (!emit_tri(*cells, A2(j), S(j + 1), A2(j + 1), P2(j), N[j + 1], P2(j + 1)))
          return false;
      }
    }
  }
  return true;
}

// Layer between the prescribed midline (S_j = (s_j, sigma_j) -> N_j) and the
// free flat bottom edge, solved as one exact linear system.
bool solve_bottom_layer(const std::vector<Rat>& s, const std::vector<Rat>& sigma,
                        const std::vector<Point2>& N, std::vector<AffineCell>& cells,
                        std::vector<Rat>& w, std::vector<Rat>& q) {
  size_t m = s.size();
  if (m < 3) return false;
  size_t k = m - 1;
  struct Tri {
    int kind;  // 0: bottom-advance (Q_r, Q_{r+1}, N_{r+1}); 1: mid-advance (Q_j, N_{j+1}, N_j)
    size_t r, j;
  };
  std::vector<Tri> tris;
  for (size_t j = 0; j + 1 < m; ++j) {
    tris.push_back({1, j, j});
    if (j + 2 < m) tris.push_back({0, j, j});
  }
  size_t nu = k - 2;
  if ((long)nu <= 0) return false;
  std::vector<std::vector<Rat>> A(tris.size(), std::vector<Rat>(2 * nu, Rat(0)));
  std::vector<Rat> b(tris.size(), Rat(0));
  auto wcol = [&](size_t r) -> long { return (r >= 1 && r <= nu) ? (long)(r - 1) : -1; };
  auto qcol = [&](size_t r) -> long { return (r >= 1 && r <= nu) ? (long)(nu + r - 1) : -1; };
  auto fixv = [&](size_t r) { return r == 0 ? Rat(0) : Rat(1); };

  for (size_t e = 0; e < tris.size(); ++e) {
    const Tri& tr = tris[e];
    if (tr.kind == 0) {
      // src (W_r, W_{r+1}, S_{r+1}): area2 = (w_{r+1} - w_r) * sigma_{r+1}
      // tgt (Q_r, Q_{r+1}, N_{r+1}): area2 = (q_{r+1} - q_r) * N_{r+1}.y
      Rat sj = sigma[tr.r + 1];
      Rat yj = N[tr.r + 1].y;
      Rat rhs(0);
      long c;
      if ((c = qcol(tr.r + 1)) >= 0) A[e][c] += yj;
      else rhs -= yj * fixv(tr.r + 1);
      if ((c = qcol(tr.r)) >= 0) A[e][c] -= yj;
      else rhs += yj * fixv(tr.r);
      if ((c = wcol(tr.r + 1)) >= 0) A[e][c] -= sj;
      else rhs += sj * fixv(tr.r + 1);
      if ((c = wcol(tr.r)) >= 0) A[e][c] += sj;
      else rhs -= sj * fixv(tr.r);
      b[e] = rhs;
    } else {
      // src (W_j, S_{j+1}, S_j): area2 = consS - w_j (sigma_j - sigma_{j+1})
      // tgt (Q_j, N_{j+1}, N_j): area2 = consN - q_j (N_j.y - N_{j+1}.y)
      Rat consS = s[tr.j + 1] * sigma[tr.j] - sigma[tr.j + 1] * s[tr.j];
      Rat ccS = sigma[tr.j] - sigma[tr.j + 1];
      Rat consN = N[tr.j + 1].x * N[tr.j].y - N[tr.j + 1].y * N[tr.j].x;
      Rat ccN = N[tr.j].y - N[tr.j + 1].y;
      Rat rhs = consS - consN;
      long c = qcol(tr.j);
      if (c >= 0) A[e][c] -= ccN;
      else rhs += ccN * fixv(tr.j);
      if ((c = wcol(tr.j)) >= 0) A[e][c] += ccS;
      else rhs -= ccS * fixv(tr.j);
      b[e] = rhs;
    }
  }
  std::vector<Rat> canonical(2 * nu, Rat(0));
  for (size_t r = 1; r <= nu; ++r) {
    canonical[r - 1] = s[r];
    canonical[nu + r - 1] = N[r].x;
  }
  std::vector<Rat> x;
  if (!solve_linear_pinned(A, b, canonical, x)) return false;
  w.assign(k, Rat(0));
  q.assign(k, Rat(0));
  w[k - 1] = 1;
  q[k - 1] = 1;
  for (size_t r = 1; r <= nu; ++r) {
    w[r] = x[r - 1];
    q[r] = x[nu + r - 1];
  }
  for (size_t r = 0; r + 1 < k; ++r)
    if (!(w[r] < w[r + 1] && q[r] < q[r + 1])) return false;

  auto S2 = [&](size_t j) { return Point2(s[j], sigma[j]); };
  auto W2 = [&](size_t r) { return Point2(w[r], Rat(0)); };
  auto Q2 = [&](size_t r) { return Point2(q[r], Rat(0)); };
  for (const Tri& tr : tris) {
    bool ok = tr.kind == 0
                  ? emit_tri(cells, W2(tr.r), W2(tr.r + 1), S2(tr.r + 1), Q2(tr.r),
                             Q2(tr.r + 1), N[tr.r + 1])
                  : emit_tri(cells, W2(tr.r), S2(tr.j + 1), S2(tr.j), Q2(tr.r), N[tr.j + 1],
                             N[tr.j]);
    if (!ok) return false;
  }
  return true;
}

bool build_midline_chart(const PLFunction& rho, EdgeReparam& out) {
  size_t n = rho.xs.size() - 1;
  if (n < 2) return false;
  const std::vector<Rat>& a = rho.xs;
  const std::vector<Rat>& p = rho.ys;
  for (size_t i = 0; i + 1 <= n; ++i) {
    Rat slope = (p[i + 1] - p[i]) / (a[i + 1] - a[i]);
    if (!(slope > Rat(2, 3) && slope < Rat(3, 2))) return false;
  }
  // Target midline heights zigzag by +-delta so that every midline segment is
  // genuinely slanted; the source heights are derived so the layer solve
  // reproduces exactly these target heights.
  for (int parity = 0; parity < 2; ++parity) {
    Rat delta(1, 8);
    std::vector<Rat> sigma(n + 2, Rat(1, 2));
    bool ok = true;
    for (size_t j = 1; j <= n && ok; ++j) {
      Rat ytar = ((j + parity) % 2 == 0) ? Rat(1, 2) + delta : Rat(1, 2) - delta;
      Rat da = a[j] - a[j - 1];
      Rat dp = p[j] - p[j - 1];
      Rat sg = 1 - (1 - ytar) * dp / da;
      if (!(sg > 0 && sg < 1)) ok = false;
      sigma[j] = sg;
    }
    if (!ok) continue;
    std::vector<AffineCell> cells;
    std::vector<Rat> s;
    std::vector<Point2> N;
    if (!solve_top_layer(a, p, sigma, s, &cells, N)) continue;
    std::vector<Rat> w, q;
    if (!solve_bottom_layer(s, sigma, N, cells, w, q)) continue;
    out.map.cells = std::move(cells);
    out.map.domain = Polygon::rect(Rat(0), Rat(0), Rat(1), Rat(1));
    out.map.index.reset();
    out.bottom = pl_simplify(PLFunction(w, q));
    return true;
  }
  return false;
}

PAComplex reflect_x_unit(const PAComplex& c) {
  AffineMap2 R(Rat(-1), Rat(0), Rat(0), Rat(1), Rat(1), Rat(0));  // x -> 1 - x
  PAComplex out;
  out.domain = c.domain;
  for (const auto& cell : c.cells) {
    out.cells.push_back({affine_image(cell.support, R), R.after(cell.map).after(R)});
  }
  return out;
}

}  // namespace

std::vector<PLFunction> reparam_elementary_factors(const PLFunction& rho_in) {
  PLFunction rho = pl_simplify(rho_in);
  PLFunction id01 = PLFunction::identity(Rat(0), Rat(1));
  std::vector<PLFunction> out;
  if (pl_equal(rho, id01)) return out;
  // peel breakpoints one at a time: rho = e_m o ... o e_1, each e_k the
  // identity up to a point with a single interior breakpoint beyond it
  std::vector<PLFunction> elems;
  {
    size_t nv = rho.xs.size();
    PLFunction prev = id01;
    for (size_t k = 1; k + 1 < nv; ++k) {
      std::vector<Rat> xs(rho.xs.begin(), rho.xs.begin() + k + 1);
      std::vector<Rat> ys(rho.ys.begin(), rho.ys.begin() + k + 1);
      xs.push_back(Rat(1));
      ys.push_back(Rat(1));
      PLFunction rk(std::move(xs), std::move(ys));
      elems.push_back(pl_simplify(pl_compose(rk, pl_inverse(prev))));
      prev = rk;
    }
  }
  // split each elementary move into steps whose two slopes stay in (2/3, 3/2)
  const Rat lo(32, 45), hi(45, 32);  // safety margin inside (2/3, 3/2)
  for (const PLFunction& e : elems) {
    if (pl_equal(e, id01)) continue;
    Rat u(0), v, vp;
    if (e.xs.size() == 3) {
      v = e.xs[1];
      vp = e.ys[1];
    } else if (e.xs.size() == 4 && e.ys[1] == e.xs[1]) {
      u = e.xs[1];
      v = e.xs[2];
      vp = e.ys[2];
    } else {
      throw std::logic_error("reparam factors: unexpected elementary shape");
    }
    if (v == vp) continue;
    Rat cur = v;
    int guard = 0;
    while (cur != vp) {
      if (++guard > 4096) throw std::logic_error("reparam factors: step split stuck");
      Rat nxt;
      if (vp > cur) {
        nxt = std::min(vp, std::min(Rat(u + (cur - u) * hi), Rat(1 - (1 - cur) * lo)));
      } else {
        nxt = std::max(vp, std::max(Rat(u + (cur - u) * lo), Rat(1 - (1 - cur) * hi)));
      }
      std::vector<Rat> xs, ys;
      if (u > 0) {
        xs = {Rat(0), u, cur, Rat(1)};
        ys = {Rat(0), u, nxt, Rat(1)};
      } else {
        xs = {Rat(0), cur, Rat(1)};
        ys = {Rat(0), nxt, Rat(1)};
      }
      out.push_back(PLFunction(std::move(xs), std::move(ys)));
      cur = nxt;
    }
  }
  return out;
}

EdgeReparam edge_reparam_map(const PLFunction& rho_in) {
  PLFunction rho = pl_simplify(rho_in);
  if (rho.x_min() != 0 || rho.x_max() != 1 || rho.ys.front() != 0 || rho.ys.back() != 1 ||
      !rho.strictly_increasing())
    throw std::domain_error("edge_reparam_map: need an increasing self-map of [0,1]");
  PLFunction id01 = PLFunction::identity(Rat(0), Rat(1));
  Polygon unit = Polygon::rect(Rat(0), Rat(0), Rat(1), Rat(1));
  if (pl_equal(rho, id01)) return {PAComplex::identity_on(unit), id01};

  // one factor map, with a blend-split fallback for stubborn configurations
  std::function<EdgeReparam(const PLFunction&, int)> build_one =
      [&](const PLFunction& g, int depth) -> EdgeReparam {
    if (pl_equal(g, id01)) return {PAComplex::identity_on(unit), id01};
    EdgeReparam res;
    if (build_midline_chart(g, res)) return res;
    {
      std::vector<Rat> xs, ys;
      for (size_t i = g.xs.size(); i-- > 0;) {
        xs.push_back(1 - g.xs[i]);
        ys.push_back(1 - g.ys[i]);
      }
      PLFunction gg(xs, ys);
      EdgeReparam mres;
      if (build_midline_chart(gg, mres)) {
        std::vector<Rat> bx, by;
        for (size_t i = mres.bottom.xs.size(); i-- > 0;) {
          bx.push_back(1 - mres.bottom.xs[i]);
          by.push_back(1 - mres.bottom.ys[i]);
        }
        return {reflect_x_unit(mres.map), PLFunction(bx, by)};
      }
    }
    if (depth > 32)
      throw std::logic_error("edge_reparam_map: factor construction did not stabilize");
    std::vector<Rat> ys1;
    ys1.reserve(g.xs.size());
    for (size_t i = 0; i < g.xs.size(); ++i) ys1.push_back((g.xs[i] + g.ys[i]) / 2);
    PLFunction g1 = pl_simplify(PLFunction(g.xs, ys1));
    PLFunction g2 = pl_simplify(pl_compose(g, pl_inverse(g1)));
    EdgeReparam a = build_one(g1, depth + 1);
    EdgeReparam b = build_one(g2, depth + 1);
    EdgeReparam outc;
    outc.map = pa_compose(a.map, b.map);
    outc.map.domain = unit;
    outc.bottom = pl_simplify(pl_compose(b.bottom, a.bottom));
    return outc;
  };

  // Build each factor; factors with an identity head are realized by embedding
  // the pure one-breakpoint correction into the sub-rectangle [u,1]x[0,1].
  auto build_factor = [&](const PLFunction& g) -> EdgeReparam {
    if (g.xs.size() == 3) return build_one(g, 0);
    Rat u = g.xs[1];
    Rat v = (g.xs[2] - u) / (1 - u);
    Rat vp = (g.ys[2] - u) / (1 - u);
    PLFunction core({Rat(0), v, Rat(1)}, {Rat(0), vp, Rat(1)});
    EdgeReparam inner = build_one(core, 0);
    AffineMap2 E(1 - u, Rat(0), Rat(0), Rat(1), u, Rat(0));  // [0,1]^2 -> [u,1]x[0,1]
    EdgeReparam out;
    out.map = pa_transform(inner.map, E.inverse(), E);
    out.map.cells.insert(out.map.cells.begin(),
                         {Polygon::rect(Rat(0), Rat(0), u, Rat(1)), AffineMap2::identity()});
    out.map.domain = unit;
    out.map.index.reset();
    std::vector<Rat> bx{Rat(0), u}, by{Rat(0), u};
    for (size_t i = 0; i < inner.bottom.xs.size(); ++i) {
      Rat x = u + (1 - u) * inner.bottom.xs[i];
      if (x <= u) continue;
      bx.push_back(x);
      by.push_back(u + (1 - u) * inner.bottom.ys[i]);
    }
    if (bx.size() < 2 || bx.back() != 1) {
      bx.push_back(Rat(1));
      by.push_back(Rat(1));
    }
    out.bottom = pl_simplify(PLFunction(bx, by));
    return out;
  };

  std::vector<EdgeReparam> steps;
  for (const PLFunction& g : reparam_elementary_factors(rho)) steps.push_back(build_factor(g));
  if (steps.empty()) return {PAComplex::identity_on(unit), id01};
  // balanced-tree composition keeps the intermediate refinements small
  while (steps.size() > 1) {
    std::vector<EdgeReparam> next;
    for (size_t i = 0; i + 1 < steps.size(); i += 2) {
      EdgeReparam merged;
      merged.map = pa_compose(steps[i].map, steps[i + 1].map);
      merged.map.domain = unit;
      merged.bottom = pl_simplify(pl_compose(steps[i + 1].bottom, steps[i].bottom));
      next.push_back(std::move(merged));
    }
    if (steps.size() % 2 == 1) next.push_back(std::move(steps.back()));
    steps.swap(next);
  }
  return std::move(steps.front());
}

}  // namespace apm
