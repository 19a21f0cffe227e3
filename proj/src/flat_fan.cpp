#include "conetri/flat_fan.hpp"

#include <algorithm>
#include <limits>

#include "conetri/errors.hpp"

namespace conetri {

FlatFan::FlatFan(std::size_t dimension) : d_(dimension) {
  if (d_ < 1) throw DimensionError("fan dimension must be positive");
}

FlatFan FlatFan::from_cones(std::span<const SimplicialCone> cones) {
  if (cones.empty()) throw DimensionError("cannot infer the dimension of an empty cone list");
  FlatFan fan(cones.front().dimension());
  fan.reserve(cones.size());
  std::vector<RayId> row;
  for (const auto& c : cones) {
    if (c.dimension() != fan.d_) throw DimensionError("cones of mixed dimension");
    row.clear();
    for (const auto& g : c.generators()) row.push_back(fan.intern(g));
    fan.add_cone(row);
  }
  return fan;
}

RayId FlatFan::intern(const LatticeVector& v) {
  if (v.size() != d_) throw DimensionError("ray dimension differs from fan dimension");
  auto [it, inserted] = index_.emplace(v, static_cast<RayId>(rays_.size()));
  if (!inserted) return it->second;
  if (rays_.size() == std::numeric_limits<RayId>::max()) throw InternalError("ray table overflow");
  rays_.push_back(v);
  std::uint64_t parity = 0;
  for (std::size_t k = 0; k < d_; ++k) {
    const Integer& c = v[k];
    if (k < 64 && mpz_odd_p(c.get_mpz_t())) parity |= std::uint64_t{1} << k;
    if (small_ok_ && mpz_fits_slong_p(c.get_mpz_t())) small_.push_back(c.get_si());
    else small_ok_ = false;
  }
  parity_.push_back(parity);
  return it->second;
}

void FlatFan::add_cone(std::span<const RayId> rays) {
  if (rays.size() != d_) throw DimensionError("cone needs exactly d rays");
  for (RayId r : rays)
    if (r >= rays_.size()) throw DomainError("unknown ray id");
  rows_.insert(rows_.end(), rays.begin(), rays.end());
}

void FlatFan::set_cone(std::size_t i, std::span<const RayId> rays) {
  if (rays.size() != d_) throw DimensionError("cone needs exactly d rays");
  if (i >= size()) throw DomainError("cone index out of range");
  for (RayId r : rays)
    if (r >= rays_.size()) throw DomainError("unknown ray id");
  std::copy(rays.begin(), rays.end(), rows_.begin() + i * d_);
}

void FlatFan::retain(std::span<const std::uint8_t> keep) {
  if (keep.size() != size()) throw DimensionError("retain mask length differs from cone count");
  std::size_t out = 0;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!keep[i]) continue;
    if (out != i) std::copy_n(rows_.begin() + i * d_, d_, rows_.begin() + out * d_);
    ++out;
  }
  rows_.resize(out * d_);
  rows_.shrink_to_fit();
}

std::optional<std::int64_t> FlatFan::small_determinant(std::size_t i) const {
  if (!small_ok_) return std::nullopt;
  const auto rays = cone(i);
  std::int64_t buf[64];
  std::vector<std::int64_t> heap;
  std::int64_t* rows = buf;
  if (d_ * d_ > 64) {
    heap.resize(d_ * d_);
    rows = heap.data();
  }
  for (std::size_t j = 0; j < d_; ++j)
    for (std::size_t k = 0; k < d_; ++k) rows[j * d_ + k] = small_[rays[j] * d_ + k];
  return conetri::small_determinant({rows, d_ * d_}, d_);
}

Integer FlatFan::determinant(std::size_t i) const {
  if (auto v = small_determinant(i)) return Integer(static_cast<long>(*v));
  std::vector<std::vector<Integer>> cols;
  for (RayId r : cone(i)) cols.push_back(rays_[r].values());
  return conetri::determinant(IntMatrix::from_columns(cols));
}

SimplicialCone FlatFan::materialize(std::size_t i) const {
  std::vector<LatticeVector> gens;
  for (RayId r : cone(i)) gens.push_back(rays_[r]);
  const Integer mu = abs(determinant(i));
  return with_fresh_labels(SimplicialCone(std::move(gens), {}, nullptr, mu)).with_id(i);
}

std::vector<SimplicialCone> FlatFan::materialize_all() const {
  std::vector<SimplicialCone> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(materialize(i));
  return out;
}

}  // namespace conetri
