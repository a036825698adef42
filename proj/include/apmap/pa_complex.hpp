#pragma once

#include <memory>
#include <string>
#include <vector>

#include "apmap/polygon.hpp"

namespace apm {

// One convex cell with the affine map acting on it.
struct AffineCell {
  Polygon support;  // convex, CCW
  AffineMap2 map;
};

struct Violation {
  std::string kind;  // "orientation", "overlap", "coverage", "continuity", "gap"
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  Rat cell_area_sum = Rat(0);
  Rat domain_area = Rat(0);
  bool ok() const { return violations.empty(); }
};

struct Tolerances {
  double eps_cont = 1e-10;  // edge continuity (absolute, on unit-scale data)
  double eps_area = 1e-9;   // coverage, relative
};

// Piecewise-affine map given by per-cell affine maps on a convex-cell
// decomposition of a polygonal domain.
struct PAComplex {
  std::vector<AffineCell> cells;
  Polygon domain;

  // Lazily built point-location acceleration (bbox grid). Rebuilt whenever the
  // cell count changes.
  struct Index {
    size_t built_for = 0;
    std::vector<BBox> boxes;
    double x0 = 0, y0 = 0, dx = 1, dy = 1;
    int nx = 1, ny = 1;
    std::vector<std::vector<uint32_t>> buckets;
  };
  mutable std::shared_ptr<Index> index;
  const Index& ensure_index() const;

  static PAComplex identity_on(const Polygon& dom);
  static PAComplex single_cell(const Polygon& support, const AffineMap2& m);

  size_t size() const { return cells.size(); }

  // Locates the cell containing p (lowest index on ties) or -1.
  long locate(const Point2& p) const;
  Point2 eval(const Point2& p) const;  // throws outside the domain

  // Forward image as a complex (per-cell image polygons, inverse matrices).
  PAComplex inverse() const;

  // Restriction to a convex sub-domain (cells clipped).
  PAComplex restricted_to_convex(const Polygon& sub) const;

  Polygon image_domain() const;  // domain polygon mapped cell-wise (boundary walk)

  double max_bilip_cells() const;     // max over cells of bilip_of_affine
  Rat max_abs_det_minus(const Rat& target) const;  // max |det - target| over cells (exact)
};

// g after f (apply f first). Pre: image(f) within domain(g).
PAComplex pa_compose(const PAComplex& f, const PAComplex& g);

// Inverse complex; throws if image cells overlap ("not injective").
PAComplex pa_invert(const PAComplex& c);

ValidationReport validate_complex(const PAComplex& c, const Tolerances& tol = Tolerances());

// Interior-disjointness of image cells via the exact pairwise predicate.
bool images_interior_disjoint(const PAComplex& c);

// Boundary of the union of cell supports, as a closed CCW polygon.
// Throws if the cells do not tile a simply connected region.
Polygon union_boundary(const std::vector<AffineCell>& cells);

// Shared (interior) edge between two cells, from the exact edge arrangement.
struct SharedEdge {
  size_t cell_a, cell_b;
  Point2 p, q;  // the common segment
};
std::vector<SharedEdge> shared_edges(const PAComplex& c);

}  // namespace apm
