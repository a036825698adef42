#pragma once

#include "apmap/pa_complex.hpp"
#include "apmap/pl_function.hpp"

namespace apm {

// post(c(pre(x))) as a complex; pre and post affine.
PAComplex pa_transform(const PAComplex& c, const AffineMap2& pre, const AffineMap2& post);

// The area-preserving plane extension of a line homeomorphism, restricted to a
// bounded convex strip. psi must be strictly increasing; it is continued
// linearly beyond its breakpoints. Satisfies Psi(x, 0) = psi(x).
PAComplex line_extension(const PLFunction& psi, const Polygon& strip);

// Decomposes an orientation-preserving PL self-homeomorphism of [0,1] into
// 3/2-biLipschitz factors (application order: first factor first). The
// composition equals phi exactly.
std::vector<PLFunction> factor_bilipschitz(const PLFunction& phi);

// Self-map of [0,1]x[0,2] carrying (x,0)->(g(x),0) and (x,2)->(g(x),2) with
// the vertical sides fixed pointwise; g must have slopes in [1/2, 2) and stay
// within 1/4 of the identity (3/2-biLipschitz factors qualify).
PAComplex step4_factor_map(const PLFunction& g);

// Area-preserving self-map of the unit square realizing rho on the top edge,
// the identity on both vertical sides (with one canonical mid-height vertex),
// and an induced free homeomorphism on the bottom edge. Built from two
// triangulated transport layers joined along a solved midline polyline;
// strong reparametrizations are split into blended halves recursively.
struct EdgeReparam {
  PAComplex map;       // self-map of [0,1]^2, det = 1 on every cell
  PLFunction bottom;   // induced bottom-edge homeomorphism
};
EdgeReparam edge_reparam_map(const PLFunction& rho);

// The one-breakpoint factor list used by edge_reparam_map (exposed for tests).
std::vector<PLFunction> reparam_elementary_factors(const PLFunction& rho);

// The four-step subgraph map: [0,1]x[0,S] onto {(x,y): 0 <= y <= f(x)} with
// identity bottom, graph top, and linear vertical sides. S = integral of f.
PAComplex rect_to_subgraph(const PLFunction& f, const Rat& C);

// [a,b]x[0,h] onto the subgraph of f; per-cell det = S/((b-a)h).
PAComplex square_to_graph(const PLFunction& f, const Rat& h, const Rat& C1, const Rat& C2);

// [a,b]x[0,h] onto the band between the graphs of f2 and f1.
PAComplex square_to_band(const PLFunction& f1, const PLFunction& f2, const Rat& h,
                         const Rat& C1, const Rat& C2);

}  // namespace apm
