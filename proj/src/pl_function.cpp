#include "apmap/pl_function.hpp"

#include <algorithm>
#include <stdexcept>

namespace apm {

PLFunction::PLFunction(std::vector<Rat> x, std::vector<Rat> y)
    : xs(std::move(x)), ys(std::move(y)) {
  if (xs.size() < 2 || xs.size() != ys.size())
    throw std::invalid_argument("PLFunction: need matching lists with >= 2 breakpoints");
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i] < xs[i + 1]))
      throw std::invalid_argument("PLFunction: breakpoints must be strictly increasing");
  }
}

PLFunction PLFunction::constant(const Rat& a, const Rat& b, const Rat& v) {
  return PLFunction({a, b}, {v, v});
}

PLFunction PLFunction::linear(const Rat& a, const Rat& b, const Rat& va, const Rat& vb) {
  return PLFunction({a, b}, {va, vb});
}

namespace {
size_t piece_of(const std::vector<Rat>& xs, const Rat& x) {
  // last i with xs[i] <= x, clamped to a valid piece index
  size_t lo = 0, hi = xs.size() - 1;
  while (lo + 1 < hi) {
    size_t mid = (lo + hi) / 2;
    if (xs[mid] <= x) lo = mid;
    else hi = mid;
  }
  return lo;
}
}  // namespace

Rat PLFunction::eval(const Rat& x) const {
  if (x < x_min() || x > x_max()) throw std::domain_error("PLFunction::eval: out of domain");
  size_t i = piece_of(xs, x);
  Rat t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + (ys[i + 1] - ys[i]) * t;
}

Rat PLFunction::eval_clamped_linear(const Rat& x) const {
  size_t i;
  if (x <= x_min()) i = 0;
  else if (x >= x_max()) i = xs.size() - 2;
  else i = piece_of(xs, x);
  Rat t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + (ys[i + 1] - ys[i]) * t;
}

Rat PLFunction::slope(size_t piece) const {
  return (ys[piece + 1] - ys[piece]) / (xs[piece + 1] - xs[piece]);
}

double PLFunction::max_abs_slope() const {
  double m = 0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) m = std::max(m, std::abs(to_double(slope(i))));
  return m;
}

Rat PLFunction::integral() const {
  Rat s(0);
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    s += (xs[i + 1] - xs[i]) * (ys[i] + ys[i + 1]) / 2;
  }
  return s;
}

bool PLFunction::strictly_increasing() const {
  for (size_t i = 0; i + 1 < ys.size(); ++i)
    if (!(ys[i] < ys[i + 1])) return false;
  return true;
}

PLFunction PLFunction::restricted(const Rat& a, const Rat& b) const {
  if (a < x_min() || b > x_max() || !(a < b))
    throw std::domain_error("PLFunction::restricted: bad subinterval");
  std::vector<Rat> nx, ny;
  nx.push_back(a);
  ny.push_back(eval(a));
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > a && xs[i] < b) {
      nx.push_back(xs[i]);
      ny.push_back(ys[i]);
    }
  }
  nx.push_back(b);
  ny.push_back(eval(b));
  return PLFunction(std::move(nx), std::move(ny));
}

PLFunction PLFunction::plus_const(const Rat& c) const {
  PLFunction f = *this;
  for (auto& y : f.ys) y += c;
  return f;
}

PLFunction PLFunction::scaled_y(const Rat& s) const {
  PLFunction f = *this;
  for (auto& y : f.ys) y *= s;
  return f;
}

PLFunction PLFunction::x_transformed(const Rat& s, const Rat& t) const {
  if (s == 0) throw std::invalid_argument("x_transformed: zero scale");
  PLFunction f = *this;
  for (auto& x : f.xs) x = s * x + t;
  if (s < 0) {
    std::reverse(f.xs.begin(), f.xs.end());
    std::reverse(f.ys.begin(), f.ys.end());
  }
  return f;
}

void PLFunction::add_breakpoint(const Rat& x) {
  if (x <= x_min() || x >= x_max()) return;
  for (const Rat& e : xs)
    if (e == x) return;
  Rat v = eval(x);
  size_t i = piece_of(xs, x);
  xs.insert(xs.begin() + i + 1, x);
  ys.insert(ys.begin() + i + 1, v);
}

namespace {

template <typename Op>
PLFunction pl_combine(const PLFunction& f, const PLFunction& g, Op op, bool insert_crossings) {
  if (f.x_min() != g.x_min() || f.x_max() != g.x_max())
    throw std::domain_error("pl_combine: domains differ");
  std::vector<Rat> grid;
  grid.reserve(f.xs.size() + g.xs.size());
  std::merge(f.xs.begin(), f.xs.end(), g.xs.begin(), g.xs.end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<Rat> nx, ny;
  for (size_t i = 0; i < grid.size(); ++i) {
    const Rat& x = grid[i];
    Rat fv = f.eval(x), gv = g.eval(x);
    if (insert_crossings && i > 0) {
      const Rat& x0 = grid[i - 1];
      Rat f0 = f.eval(x0), g0 = g.eval(x0);
      Rat d0 = f0 - g0, d1 = fv - gv;
      if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
        Rat t = d0 / (d0 - d1);
        Rat xc = x0 + (x - x0) * t;
        Rat vc = f0 + (f.eval(x) - f0) * t;  // f == g there
        nx.push_back(xc);
        ny.push_back(vc);
      }
    }
    nx.push_back(x);
    ny.push_back(op(fv, gv));
  }
  return PLFunction(std::move(nx), std::move(ny));
}

}  // namespace

PLFunction pl_min(const PLFunction& f, const PLFunction& g) {
  return pl_combine(f, g, [](const Rat& a, const Rat& b) { return std::min(a, b); }, true);
}

PLFunction pl_max(const PLFunction& f, const PLFunction& g) {
  return pl_combine(f, g, [](const Rat& a, const Rat& b) { return std::max(a, b); }, true);
}

PLFunction pl_sum(const PLFunction& f, const PLFunction& g) {
  return pl_combine(f, g, [](const Rat& a, const Rat& b) { return a + b; }, false);
}

PLFunction pl_diff(const PLFunction& f, const PLFunction& g) {
  return pl_combine(f, g, [](const Rat& a, const Rat& b) { return a - b; }, false);
}

PLFunction pl_inverse(const PLFunction& f) {
  if (!f.strictly_increasing())
    throw std::domain_error("pl_inverse: function is not strictly increasing");
  return PLFunction(f.ys, f.xs);
}

PLFunction pl_compose(const PLFunction& f, const PLFunction& g) {
  if (!g.strictly_increasing()) throw std::domain_error("pl_compose: inner map not increasing");
  if (g.ys.front() < f.x_min() || g.ys.back() > f.x_max())
    throw std::domain_error("pl_compose: range of g escapes domain of f");
  // breakpoints: g's, plus preimages under g of f's breakpoints
  std::vector<Rat> grid = g.xs;
  PLFunction ginv = pl_inverse(g);
  for (const Rat& bx : f.xs) {
    if (bx > g.ys.front() && bx < g.ys.back()) grid.push_back(ginv.eval(bx));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<Rat> ny;
  ny.reserve(grid.size());
  for (const Rat& x : grid) ny.push_back(f.eval(g.eval(x)));
  return PLFunction(std::move(grid), std::move(ny));
}

double pl_bilip(const PLFunction& f) {
  double m = 1.0;
  for (size_t i = 0; i + 1 < f.xs.size(); ++i) {
    double s = to_double(f.slope(i));
    if (s <= 0) throw std::domain_error("pl_bilip: non-increasing piece");
    m = std::max({m, s, 1.0 / s});
  }
  return m;
}

PLFunction pl_simplify(const PLFunction& f) {
  std::vector<Rat> xs{f.xs.front()}, ys{f.ys.front()};
  for (size_t i = 1; i + 1 < f.xs.size(); ++i) {
    Rat s0 = (f.ys[i] - ys.back()) / (f.xs[i] - xs.back());
    Rat s1 = (f.ys[i + 1] - f.ys[i]) / (f.xs[i + 1] - f.xs[i]);
    if (s0 != s1) {
      xs.push_back(f.xs[i]);
      ys.push_back(f.ys[i]);
    }
  }
  xs.push_back(f.xs.back());
  ys.push_back(f.ys.back());
  return PLFunction(std::move(xs), std::move(ys));
}

bool pl_equal(const PLFunction& f, const PLFunction& g) {
  if (f.x_min() != g.x_min() || f.x_max() != g.x_max()) return false;
  std::vector<Rat> grid;
  std::merge(f.xs.begin(), f.xs.end(), g.xs.begin(), g.xs.end(), std::back_inserter(grid));
  for (const Rat& x : grid) {
    if (f.eval(x) != g.eval(x)) return false;
  }
  return true;
}

}  // namespace apm
