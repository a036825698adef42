#pragma once

#include <vector>

#include "apmap/rational.hpp"

namespace apm {

// One-variable piecewise-linear function as an ordered breakpoint list.
struct PLFunction {
  std::vector<Rat> xs;  // strictly increasing, size >= 2
  std::vector<Rat> ys;

  PLFunction() = default;
  PLFunction(std::vector<Rat> x, std::vector<Rat> y);

  static PLFunction constant(const Rat& a, const Rat& b, const Rat& v);
  static PLFunction linear(const Rat& a, const Rat& b, const Rat& va, const Rat& vb);
  static PLFunction identity(const Rat& a, const Rat& b) { return linear(a, b, a, b); }

  const Rat& x_min() const { return xs.front(); }
  const Rat& x_max() const { return xs.back(); }
  size_t pieces() const { return xs.size() - 1; }

  Rat eval(const Rat& x) const;              // throws outside [x_min, x_max]
  Rat eval_clamped_linear(const Rat& x) const;  // linear continuation beyond the ends

  Rat slope(size_t piece) const;
  double max_abs_slope() const;
  Rat integral() const;  // over the full domain, exact

  bool strictly_increasing() const;

  PLFunction restricted(const Rat& a, const Rat& b) const;
  PLFunction plus_const(const Rat& c) const;
  PLFunction scaled_y(const Rat& s) const;
  PLFunction x_transformed(const Rat& s, const Rat& t) const;  // x -> s*x + t (s != 0)
  void add_breakpoint(const Rat& x);                            // refine, value unchanged
};

// Pointwise min/max on the common domain (domains must agree).
PLFunction pl_min(const PLFunction& f, const PLFunction& g);
PLFunction pl_max(const PLFunction& f, const PLFunction& g);
PLFunction pl_sum(const PLFunction& f, const PLFunction& g);
PLFunction pl_diff(const PLFunction& f, const PLFunction& g);

// Strictly increasing PL bijection helpers.
PLFunction pl_inverse(const PLFunction& f);                      // f must be strictly increasing
PLFunction pl_compose(const PLFunction& f, const PLFunction& g); // x -> f(g(x)); g increasing,
                                                                 // range(g) within dom(f)
// max(|slope|, 1/|slope|) over pieces of an increasing function.
double pl_bilip(const PLFunction& f);

bool pl_equal(const PLFunction& f, const PLFunction& g);  // as functions (exact)

// Drops interior breakpoints where the slope does not change.
PLFunction pl_simplify(const PLFunction& f);

}  // namespace apm
