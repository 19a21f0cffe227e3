#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "conetri/cone_geometry.hpp"

namespace conetri {

using RayId = std::uint32_t;

/// Simplicial cones stored as rows of ray indices into a shared ray table.
/// Meant for triangulations with millions of cones.
class FlatFan {
 public:
  explicit FlatFan(std::size_t dimension);
  /// Generators of every cone, in order.
  static FlatFan from_cones(std::span<const SimplicialCone> cones);

  std::size_t dimension() const { return d_; }

  RayId intern(const LatticeVector& v);
  std::size_t ray_count() const { return rays_.size(); }
  const LatticeVector& ray(RayId r) const { return rays_[r]; }
  /// Bit k set iff coordinate k is odd. Needs d <= 64.
  std::uint64_t ray_parity(RayId r) const { return parity_[r]; }

  std::size_t size() const { return rows_.size() / d_; }
  std::span<const RayId> cone(std::size_t i) const { return {rows_.data() + i * d_, d_}; }
  void add_cone(std::span<const RayId> rays);
  void set_cone(std::size_t i, std::span<const RayId> rays);
  void reserve(std::size_t cones) { rows_.reserve(cones * d_); }
  /// Drops every cone i with keep[i] == 0, preserving order.
  void retain(std::span<const std::uint8_t> keep);

  /// Coordinates of ray r as machine integers; empty once any ray of the
  /// fan has a coordinate beyond 64 bits.
  std::span<const std::int64_t> small_ray(RayId r) const {
    if (!small_ok_) return {};
    return {small_.data() + static_cast<std::size_t>(r) * d_, d_};
  }

  /// Signed determinant of the generator matrix of cone i.
  Integer determinant(std::size_t i) const;
  /// The same in 64-bit arithmetic, when every minor provably fits.
  std::optional<std::int64_t> small_determinant(std::size_t i) const;
  /// Cone i as a SimplicialCone with base labels and id i.
  SimplicialCone materialize(std::size_t i) const;
  std::vector<SimplicialCone> materialize_all() const;

 private:
  std::size_t d_;
  std::vector<LatticeVector> rays_;
  std::vector<std::uint64_t> parity_;
  std::vector<std::int64_t> small_;  // d entries per ray while small_ok_
  bool small_ok_ = true;
  std::unordered_map<LatticeVector, RayId, LatticeVectorHash> index_;
  std::vector<RayId> rows_;
};

}  // namespace conetri
