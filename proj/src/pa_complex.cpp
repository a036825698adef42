#include "apmap/pa_complex.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace apm {

namespace {

std::string pt_str(const Point2& p) {
  std::ostringstream os;
  os << "(" << to_double(p.x) << ", " << to_double(p.y) << ")";
  return os.str();
}

// Canonical integer line key A x + B y = C, primitive, first nonzero of (A,B) > 0.
struct LineKey {
  BigInt A, B, C;
  bool operator<(const LineKey& o) const {
    if (A != o.A) return A < o.A;
    if (B != o.B) return B < o.B;
    return C < o.C;
  }
};

LineKey line_key(const Point2& p, const Point2& q) {
  Rat A = q.y - p.y;
  Rat B = p.x - q.x;
  Rat C = A * p.x + B * p.y;
  BigInt la = numerator(A) * denominator(B) * denominator(C);
  BigInt lb = numerator(B) * denominator(A) * denominator(C);
  BigInt lc = numerator(C) * denominator(A) * denominator(B);
  BigInt g = gcd(gcd(abs(la), abs(lb)), abs(lc));
  if (g != 0) {
    la /= g;
    lb /= g;
    lc /= g;
  }
  if (la < 0 || (la == 0 && lb < 0)) {
    la = -la;
    lb = -lb;
    lc = -lc;
  }
  return {la, lb, lc};
}

struct EdgeRec {
  Rat t0, t1;       // t0 < t1 along the line direction (-B, A)
  int orient;       // +1 if the edge runs in +t direction
  long cell;        // cell index, or -1 for a domain edge
  Point2 p0, p1;    // points at t0, t1
};

struct LineBundle {
  std::vector<EdgeRec> edges;
};

Rat line_param(const LineKey& k, const Point2& p) {
  // direction (-B, A)
  return Rat(-k.B) * p.x + Rat(k.A) * p.y;
}

using Arrangement = std::map<LineKey, LineBundle>;

void add_edge(Arrangement& arr, const Point2& a, const Point2& b, long cell) {
  if (a == b) return;
  LineKey k = line_key(a, b);
  Rat ta = line_param(k, a), tb = line_param(k, b);
  EdgeRec e;
  if (ta < tb) {
    e = {ta, tb, +1, cell, a, b};
  } else {
    e = {tb, ta, -1, cell, b, a};
  }
  arr[k].edges.push_back(e);
}

void add_polygon_edges(Arrangement& arr, const Polygon& poly, long cell) {
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) add_edge(arr, poly[i], poly[(i + 1) % n], cell);
}

struct Atom {
  Point2 p0, p1;
  std::vector<std::pair<long, int>> covers;  // (cell or -1, orientation)
  int net = 0;
};

template <typename Fn>
void for_each_atom(const Arrangement& arr, Fn&& fn) {
  for (const auto& [key, bundle] : arr) {
    std::vector<Rat> ts;
    ts.reserve(bundle.edges.size() * 2);
    for (const auto& e : bundle.edges) {
      ts.push_back(e.t0);
      ts.push_back(e.t1);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
      Atom atom;
      bool have_pts = false;
      for (const auto& e : bundle.edges) {
        if (e.t0 <= ts[i] && ts[i + 1] <= e.t1) {
          atom.covers.push_back({e.cell, e.orient});
          atom.net += e.orient;
          if (!have_pts) {
            // endpoints by linear interpolation along the edge
            Rat denom = e.t1 - e.t0;
            Rat u0 = (ts[i] - e.t0) / denom;
            Rat u1 = (ts[i + 1] - e.t0) / denom;
            atom.p0 = e.p0 + (e.p1 - e.p0) * u0;
            atom.p1 = e.p0 + (e.p1 - e.p0) * u1;
            have_pts = true;
          }
        }
      }
      if (!atom.covers.empty()) fn(atom);
    }
  }
}

double map_dist(const AffineMap2& f, const AffineMap2& g, const Point2& p) {
  Point2 d = f(p) - g(p);
  double dx = to_double(d.x), dy = to_double(d.y);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

PAComplex PAComplex::identity_on(const Polygon& dom) {
  PAComplex c;
  c.domain = dom;
  c.cells.push_back({dom, AffineMap2::identity()});
  return c;
}

PAComplex PAComplex::single_cell(const Polygon& support, const AffineMap2& m) {
  PAComplex c;
  c.domain = support;
  c.cells.push_back({support, m});
  return c;
}

const PAComplex::Index& PAComplex::ensure_index() const {
  if (index && index->built_for == cells.size()) return *index;
  auto idx = std::make_shared<Index>();
  idx->built_for = cells.size();
  idx->boxes.reserve(cells.size());
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  bool first = true;
  for (const auto& cell : cells) {
    BBox b = bbox_of(cell.support);
    idx->boxes.push_back(b);
    if (first) {
      xmin = b.xmin; ymin = b.ymin; xmax = b.xmax; ymax = b.ymax;
      first = false;
    } else {
      xmin = std::min(xmin, b.xmin); ymin = std::min(ymin, b.ymin);
      xmax = std::max(xmax, b.xmax); ymax = std::max(ymax, b.ymax);
    }
  }
  int n = std::max(1, (int)std::sqrt((double)cells.size() / 2.0));
  idx->nx = n; idx->ny = n;
  idx->x0 = xmin; idx->y0 = ymin;
  idx->dx = std::max((xmax - xmin) / n, 1e-300);
  idx->dy = std::max((ymax - ymin) / n, 1e-300);
  idx->buckets.assign((size_t)n * n, {});
  auto clampi = [&](int v) { return std::max(0, std::min(n - 1, v)); };
  for (size_t i = 0; i < cells.size(); ++i) {
    const BBox& b = idx->boxes[i];
    int ix0 = clampi((int)std::floor((b.xmin - idx->x0) / idx->dx));
    int ix1 = clampi((int)std::floor((b.xmax - idx->x0) / idx->dx));
    int iy0 = clampi((int)std::floor((b.ymin - idx->y0) / idx->dy));
    int iy1 = clampi((int)std::floor((b.ymax - idx->y0) / idx->dy));
    for (int ix = ix0; ix <= ix1; ++ix)
      for (int iy = iy0; iy <= iy1; ++iy)
        idx->buckets[(size_t)ix * n + iy].push_back((uint32_t)i);
  }
  index = idx;
  return *index;
}

long PAComplex::locate(const Point2& p) const {
  const Index& idx = ensure_index();
  double px = to_double(p.x), py = to_double(p.y);
  const double eps = 1e-9 * (1.0 + std::abs(px) + std::abs(py));
  int n = idx.nx;
  auto clampi = [&](int v) { return std::max(0, std::min(n - 1, v)); };
  int ix0 = clampi((int)std::floor((px - eps - idx.x0) / idx.dx));
  int ix1 = clampi((int)std::floor((px + eps - idx.x0) / idx.dx));
  int iy0 = clampi((int)std::floor((py - eps - idx.y0) / idx.dy));
  int iy1 = clampi((int)std::floor((py + eps - idx.y0) / idx.dy));
  long best = -1;
  for (int ix = ix0; ix <= ix1; ++ix) {
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (uint32_t i : idx.buckets[(size_t)ix * n + iy]) {
        if (best >= 0 && (long)i >= best) continue;
        const BBox& b = idx.boxes[i];
        if (px < b.xmin - eps || px > b.xmax + eps || py < b.ymin - eps || py > b.ymax + eps)
          continue;
        if (convex_contains(cells[i].support, p)) {
          best = (long)i;  // lowest index wins on boundary ties
        }
      }
    }
  }
  return best;
}

Point2 PAComplex::eval(const Point2& p) const {
  long i = locate(p);
  if (i < 0) throw std::domain_error("pa_eval: point outside the domain " + pt_str(p));
  return cells[i].map(p);
}

PAComplex PAComplex::inverse() const { return pa_invert(*this); }

PAComplex PAComplex::restricted_to_convex(const Polygon& sub) const {
  PAComplex out;
  out.domain = sub;
  for (const auto& cell : cells) {
    Polygon r = convex_intersect(cell.support, sub);
    if (r.size() >= 3 && polygon_area2(r) > 0) out.cells.push_back({r, cell.map});
  }
  return out;
}

Polygon PAComplex::image_domain() const {
  std::vector<AffineCell> imgs;
  imgs.reserve(cells.size());
  for (const auto& cell : cells) {
    imgs.push_back({affine_image(cell.support, cell.map), cell.map});
  }
  return union_boundary(imgs);
}

double PAComplex::max_bilip_cells() const {
  double m = 1.0;
  for (const auto& cell : cells) m = std::max(m, bilip_of_affine(cell.map));
  return m;
}

Rat PAComplex::max_abs_det_minus(const Rat& target) const {
  Rat m(0);
  for (const auto& cell : cells) m = std::max(m, rat_abs(cell.map.det() - target));
  return m;
}

PAComplex pa_compose(const PAComplex& f, const PAComplex& g) {
  PAComplex out;
  out.domain = f.domain;
  const PAComplex::Index& gidx = g.ensure_index();

  Rat covered(0), total(0);
  std::vector<uint32_t> cand;
  std::vector<char> seen(g.cells.size(), 0);
  for (const auto& cf : f.cells) {
    Polygon img = affine_image(cf.support, cf.map);
    total += polygon_area(cf.support);
    BBox ib = bbox_of(img);
    AffineMap2 inv = cf.map.inverse();
    cand.clear();
    int n = gidx.nx;
    auto clampi = [&](int v) { return std::max(0, std::min(n - 1, v)); };
    int ix0 = clampi((int)std::floor((ib.xmin - gidx.x0) / gidx.dx));
    int ix1 = clampi((int)std::floor((ib.xmax - gidx.x0) / gidx.dx));
    int iy0 = clampi((int)std::floor((ib.ymin - gidx.y0) / gidx.dy));
    int iy1 = clampi((int)std::floor((ib.ymax - gidx.y0) / gidx.dy));
    for (int ix = ix0; ix <= ix1; ++ix)
      for (int iy = iy0; iy <= iy1; ++iy)
        for (uint32_t j : gidx.buckets[(size_t)ix * n + iy]) {
          if (seen[j]) continue;
          seen[j] = 1;
          cand.push_back(j);
        }
    std::sort(cand.begin(), cand.end());
    for (uint32_t j : cand) seen[j] = 0;
    for (uint32_t j : cand) {
      if (!ib.overlaps(gidx.boxes[j])) continue;
      Polygon r = convex_intersect(img, g.cells[j].support);
      if (r.size() < 3 || polygon_area2(r) <= 0) continue;
      Polygon back = affine_image(r, inv);
      back = polygon_normalize(back);
      if (back.size() < 3) continue;
      covered += polygon_area(back);
      out.cells.push_back({back, g.cells[j].map.after(cf.map)});
    }
  }
  Rat err = rat_abs(covered - total);
  if (total > 0 && to_double(err / total) > 1e-9) {
    throw std::domain_error("pa_compose: image of f escapes the domain of g (area defect " +
                            std::to_string(to_double(err)) + ")");
  }
  return out;
}

PAComplex pa_invert(const PAComplex& c) {
  PAComplex out;
  out.cells.reserve(c.cells.size());
  Rat img_area(0);
  std::vector<AffineCell> imgs;
  for (const auto& cell : c.cells) {
    if (cell.map.det() == 0) throw std::domain_error("pa_invert: degenerate cell map");
    Polygon img = affine_image(cell.support, cell.map);
    img_area += polygon_area(img);
    imgs.push_back({img, cell.map});
    out.cells.push_back({img, cell.map.inverse()});
  }
  Polygon dom;
  try {
    dom = union_boundary(imgs);
  } catch (const std::exception&) {
    throw std::domain_error("pa_invert: not injective (image cells overlap or tear)");
  }
  if (polygon_area(dom) != img_area) {
    throw std::domain_error("pa_invert: not injective (image cells overlap)");
  }
  out.domain = dom;
  return out;
}

ValidationReport validate_complex(const PAComplex& c, const Tolerances& tol) {
  ValidationReport rep;
  rep.domain_area = polygon_area(c.domain);

  for (size_t i = 0; i < c.cells.size(); ++i) {
    const auto& cell = c.cells[i];
    if (cell.support.size() < 3 || polygon_area2(cell.support) <= 0 ||
        !polygon_is_convex(cell.support)) {
      rep.violations.push_back({"orientation", "cell " + std::to_string(i) +
                                                   ": support not a positive convex polygon"});
      continue;
    }
    rep.cell_area_sum += polygon_area(cell.support);
    if (cell.map.det() <= 0) {
      rep.violations.push_back(
          {"orientation", "cell " + std::to_string(i) + ": det <= 0 (orientation not preserved)"});
    }
  }

  Arrangement arr;
  for (size_t i = 0; i < c.cells.size(); ++i) add_polygon_edges(arr, c.cells[i].support, (long)i);
  // domain edges with reversed orientation so a perfect tiling cancels everywhere
  {
    size_t n = c.domain.size();
    for (size_t i = 0; i < n; ++i)
      add_edge(arr, c.domain[(i + 1) % n], c.domain[i], -1);
  }

  for_each_atom(arr, [&](const Atom& atom) {
    if (atom.net != 0) {
      rep.violations.push_back({"coverage", "uncancelled boundary piece near " + pt_str(atom.p0) +
                                                "-" + pt_str(atom.p1)});
      return;
    }
    std::vector<long> plus, minus;
    for (auto& [cell, o] : atom.covers) {
      if (cell < 0) continue;
      (o > 0 ? plus : minus).push_back(cell);
    }
    if (plus.size() > 1 || minus.size() > 1) {
      rep.violations.push_back(
          {"overlap", "cells overlap along " + pt_str(atom.p0) + "-" + pt_str(atom.p1)});
      return;
    }
    if (plus.size() == 1 && minus.size() == 1) {
      const AffineMap2& fa = c.cells[plus[0]].map;
      const AffineMap2& fb = c.cells[minus[0]].map;
      double d = std::max(map_dist(fa, fb, atom.p0), map_dist(fa, fb, atom.p1));
      if (d > tol.eps_cont) {
        rep.violations.push_back(
            {"continuity", "cells " + std::to_string(plus[0]) + "," + std::to_string(minus[0]) +
                               " disagree by " + std::to_string(d) + " on edge " +
                               pt_str(atom.p0) + "-" + pt_str(atom.p1)});
      }
    }
  });

  Rat diff = rat_abs(rep.cell_area_sum - rep.domain_area);
  if (rep.domain_area > 0 && to_double(diff / rep.domain_area) > tol.eps_area) {
    rep.violations.push_back({"coverage", "cell areas sum to " +
                                              std::to_string(to_double(rep.cell_area_sum)) +
                                              " but domain has area " +
                                              std::to_string(to_double(rep.domain_area))});
  }
  return rep;
}

bool images_interior_disjoint(const PAComplex& c) {
  Rat img_area(0);
  std::vector<AffineCell> imgs;
  for (const auto& cell : c.cells) {
    Polygon img = affine_image(cell.support, cell.map);
    img_area += polygon_area(img);
    imgs.push_back({img, cell.map});
  }
  try {
    Polygon dom = union_boundary(imgs);
    return polygon_area(dom) == img_area;
  } catch (const std::exception&) {
    return false;
  }
}

Polygon union_boundary(const std::vector<AffineCell>& cells) {
  Arrangement arr;
  for (size_t i = 0; i < cells.size(); ++i) add_polygon_edges(arr, cells[i].support, (long)i);

  struct PtKey {
    Rat x, y;
    bool operator<(const PtKey& o) const {
      if (x != o.x) return x < o.x;
      return y < o.y;
    }
  };
  std::map<PtKey, std::vector<std::pair<Point2, Point2>>> outgoing;
  size_t nseg = 0;
  for_each_atom(arr, [&](const Atom& atom) {
    if (atom.net == 0) return;
    if (atom.net != 1 && atom.net != -1)
      throw std::domain_error("union_boundary: cells overlap");
    Point2 a = atom.net > 0 ? atom.p0 : atom.p1;
    Point2 b = atom.net > 0 ? atom.p1 : atom.p0;
    outgoing[{a.x, a.y}].push_back({a, b});
    ++nseg;
  });
  if (nseg == 0) throw std::domain_error("union_boundary: empty boundary");

  std::vector<Point2> loop;
  Point2 start = outgoing.begin()->second.front().first;
  Point2 cur = start;
  size_t used = 0;
  for (;;) {
    auto it = outgoing.find({cur.x, cur.y});
    if (it == outgoing.end() || it->second.empty())
      throw std::domain_error("union_boundary: boundary chain broken");
    auto seg = it->second.back();
    it->second.pop_back();
    loop.push_back(seg.first);
    ++used;
    cur = seg.second;
    if (cur == start) break;
    if (used > nseg) throw std::domain_error("union_boundary: boundary does not close");
  }
  if (used != nseg)
    throw std::domain_error("union_boundary: region is not simply connected");

  Polygon out = polygon_normalize(Polygon(loop));
  if (out.size() < 3) throw std::domain_error("union_boundary: degenerate boundary");
  return out;
}

std::vector<SharedEdge> shared_edges(const PAComplex& c) {
  Arrangement arr;
  for (size_t i = 0; i < c.cells.size(); ++i) add_polygon_edges(arr, c.cells[i].support, (long)i);
  std::vector<SharedEdge> out;
  for_each_atom(arr, [&](const Atom& atom) {
    if (atom.net != 0) return;
    long a = -1, b = -1;
    for (auto& [cell, o] : atom.covers) {
      if (o > 0) a = cell;
      else b = cell;
    }
    if (a >= 0 && b >= 0) out.push_back({(size_t)a, (size_t)b, atom.p0, atom.p1});
  });
  return out;
}

}  // namespace apm
