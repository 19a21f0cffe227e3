#pragma once

#include <cstddef>
#include <vector>

#include "conetri/cone_geometry.hpp"
#include "conetri/flat_fan.hpp"

namespace conetri {

/// Refines a 2-triangulation to a unimodular one. Each step takes the oldest
/// non-unimodular cone, forms its half-sum vector u and stellar-subdivides
/// every cone of the fan that contains u. Throws PhaseOrderError if some
/// multiplicity is not a power of 2. Cones come out in creation order.
FlatFan refine_to_unimodular(const Triangulation& t);

/// One subdivision in an isolated refinement; generation k means the vector
/// split a cone that was itself produced by k - 1 halvings.
struct RefinementStep {
  int generation = 0;
  LatticeVector u;
  Rational dilation;  // w.r.t. the root cone's own simplex
};

struct IsolatedRefinement {
  SimplicialCone root;
  std::vector<SimplicialCone> cones;
  std::vector<RefinementStep> steps;
  std::vector<int> leaf_generations;  // parallel to cones
};

/// Per-cone recursion: every cone is split only by its own half-sum vector,
/// with the history reset to fresh labels on the root.
IsolatedRefinement refine_isolated(const SimplicialCone& cone);

/// (d/2) * (3/2)^(k-1) for k >= 1, and 1 for k <= 0.
double hk_bound(std::size_t d, int k);

/// Exact h_k: h_k = 1 for k <= 0, h_1 = d/2, h_k = (h_{k-1} + ... + h_{k-d}) / 2.
Rational hk_exact(std::size_t d, int k);

/// Exact (d/2) * (3/2)^(k-1) for k >= 1, 1 for k <= 0.
Rational hk_bound_exact(std::size_t d, int k);

}  // namespace conetri
