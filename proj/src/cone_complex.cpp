#include "conetri/cone_complex.hpp"

#include <algorithm>

#include "conetri/errors.hpp"

namespace conetri {

ConeComplex::ConeComplex(const Triangulation& t) : base_(t.base) {
  bool ids_dense = !t.all_created.empty();
  for (std::size_t i = 0; i < t.all_created.size() && ids_dense; ++i)
    ids_dense = t.all_created[i].id() == i;
  for (const auto& c : t.cones) {
    if (!ids_dense) break;
    ids_dense = c.id() < t.all_created.size();
  }

  if (ids_dense) {
    created_.reserve(t.all_created.size());
    for (const auto& c : t.all_created) {
      created_.push_back(c);
      live_.push_back(false);
      cone_rays_.emplace_back();
    }
    for (const auto& c : t.cones) {
      const ConeId id = c.id();
      if (live_[id]) throw DomainError("duplicate cone id in triangulation");
      live_[id] = true;
      ++live_count_;
      for (const auto& g : c.generators()) {
        const RayId r = ray_of(g);
        cone_rays_[id].push_back(r);
        incidence_[r].insert(id);
      }
    }
  } else {
    // Foreign triangulation: renumber its cones from zero.
    for (const auto& c : t.cones) add(c);
  }
}

ConeComplex::RayId ConeComplex::ray_of(const LatticeVector& v) {
  auto [it, inserted] = ray_ids_.emplace(v, incidence_.size());
  if (inserted) incidence_.emplace_back();
  return it->second;
}

ConeId ConeComplex::add(SimplicialCone cone) {
  const ConeId id = created_.size();
  std::vector<RayId> rays;
  rays.reserve(cone.dimension());
  for (const auto& g : cone.generators()) rays.push_back(ray_of(g));
  for (RayId r : rays) incidence_[r].insert(id);
  created_.push_back(cone.with_id(id));
  live_.push_back(true);
  ++live_count_;
  cone_rays_.push_back(std::move(rays));
  return id;
}

std::vector<ConeId> ConeComplex::live_ids() const {
  std::vector<ConeId> out;
  out.reserve(live_count_);
  for (ConeId id = 0; id < created_.size(); ++id)
    if (live_[id]) out.push_back(id);
  return out;
}

std::vector<ConeId> ConeComplex::star(std::span<const LatticeVector> face) const {
  if (face.empty()) return live_ids();
  std::vector<RayId> rays;
  for (const auto& v : face) {
    auto it = ray_ids_.find(v);
    if (it == ray_ids_.end()) return {};
    rays.push_back(it->second);
  }
  const RayId pivot = *std::min_element(rays.begin(), rays.end(), [&](RayId a, RayId b) {
    return incidence_[a].size() < incidence_[b].size();
  });
  std::vector<ConeId> out;
  for (ConeId id : incidence_[pivot]) {
    const auto& own = cone_rays_[id];
    const bool all = std::all_of(rays.begin(), rays.end(), [&](RayId r) {
      return std::find(own.begin(), own.end(), r) != own.end();
    });
    if (all) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ConeId> ConeComplex::subdivide(ConeId id, const LatticeVector& x, const RationalVector& coords) {
  if (id >= created_.size() || !live_[id]) throw InternalError("subdividing a cone that is not live");
  auto children = stellar_subdivide(created_[id], x, coords);
  if (children.size() == 1 && children.front().generators() == created_[id].generators()) return {id};

  live_[id] = false;
  --live_count_;
  for (RayId r : cone_rays_[id]) incidence_[r].erase(id);
  std::vector<ConeId> ids;
  ids.reserve(children.size());
  for (auto& child : children) ids.push_back(add(std::move(child)));
  return ids;
}

Triangulation ConeComplex::snapshot() const {
  Triangulation t{base_, {}, created_};
  t.cones.reserve(live_count_);
  for (ConeId id = 0; id < created_.size(); ++id)
    if (live_[id]) t.cones.push_back(created_[id]);
  return t;
}

}  // namespace conetri
