#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conetri/cone_geometry.hpp"

namespace conetri {

/// Mutable simplicial fan used while refining a triangulation.
///
/// Cones are addressed by id (dense, equal to the position in all_created).
/// Each distinct generator vector is a ray; the ray -> live-cone incidence
/// answers "which cones contain this face" without scanning the fan.
class ConeComplex {
 public:
  explicit ConeComplex(const Triangulation& t);

  const SimplicialCone& base() const { return base_; }
  const SimplicialCone& cone(ConeId id) const { return created_[id]; }
  bool live(ConeId id) const { return live_[id]; }
  std::size_t live_count() const { return live_count_; }
  std::size_t created_count() const { return created_.size(); }

  /// Live cones ascending by id.
  std::vector<ConeId> live_ids() const;

  /// Live cones having every vector of `face` among their generators,
  /// ascending by id.
  std::vector<ConeId> star(std::span<const LatticeVector> face) const;

  /// Replaces a live cone by its stellar subdivision at x with the given
  /// barycentric coordinates. Returns the ids of the children; returns {id}
  /// unchanged when x is already a generator of the cone.
  std::vector<ConeId> subdivide(ConeId id, const LatticeVector& x, const RationalVector& coords);

  Triangulation snapshot() const;

 private:
  using RayId = std::size_t;

  RayId ray_of(const LatticeVector& v);
  ConeId add(SimplicialCone cone);

  SimplicialCone base_;
  std::vector<SimplicialCone> created_;
  std::vector<bool> live_;
  std::size_t live_count_ = 0;
  std::vector<std::vector<RayId>> cone_rays_;
  std::unordered_map<LatticeVector, RayId, LatticeVectorHash> ray_ids_;
  std::vector<std::unordered_set<ConeId>> incidence_;
};

}  // namespace conetri
