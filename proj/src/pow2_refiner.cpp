#include "conetri/pow2_refiner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "conetri/errors.hpp"
#include "conetri/number_theory.hpp"

namespace conetri {
namespace {

RationalVector half_coords(const std::vector<std::uint8_t>& subset) {
  RationalVector coords(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) coords[i] = subset[i] ? Rational(1, 2) : Rational(0);
  return coords;
}

}  // namespace

FlatFan refine_to_unimodular(const Triangulation& t) {
  const std::size_t d = t.base.dimension();
  if (d > 64) throw DimensionError("refine_to_unimodular supports d <= 64");
  FlatFan fan(d);
  std::vector<std::uint8_t> exponent;  // log2 of the multiplicity
  std::vector<std::uint8_t> alive;
  std::vector<std::uint32_t> free_slots;
  // ray -> cones through it; may hold stale ids, pruned when scanned or grown
  std::vector<std::vector<std::uint32_t>> incidence;
  std::vector<std::size_t> pruned_size;
  std::deque<std::uint32_t> queue;

  auto contains_ray = [&](std::uint32_t c, RayId r) {
    const auto rays = fan.cone(c);
    return alive[c] && std::find(rays.begin(), rays.end(), r) != rays.end();
  };
  auto prune = [&](RayId r) {
    auto& list = incidence[r];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    list.erase(std::remove_if(list.begin(), list.end(), [&](std::uint32_t c) { return !contains_ray(c, r); }),
               list.end());
    pruned_size[r] = list.size();
  };

  std::vector<RayId> row(d);
  auto add = [&](std::span<const RayId> rays, std::size_t e) {
    std::uint32_t id;
    if (!free_slots.empty()) {
      id = free_slots.back();
      free_slots.pop_back();
      fan.set_cone(id, rays);
      exponent[id] = static_cast<std::uint8_t>(e);
      alive[id] = 1;
    } else {
      id = static_cast<std::uint32_t>(fan.size());
      fan.add_cone(rays);
      exponent.push_back(static_cast<std::uint8_t>(e));
      alive.push_back(1);
    }
    if (incidence.size() < fan.ray_count()) {
      incidence.resize(fan.ray_count());
      pruned_size.resize(fan.ray_count(), 0);
    }
    for (RayId r : rays) {
      incidence[r].push_back(id);
      if (incidence[r].size() > 2 * pruned_size[r] + 16) prune(r);
    }
    if (e > 0) queue.push_back(id);
  };

  for (const auto& c : t.cones) {
    if (c.dimension() != d) throw DimensionError("cone dimension differs from base");
    if (!is_power_of_two(c.multiplicity()))
      throw PhaseOrderError("refine_to_unimodular needs a 2-triangulation");
    for (std::size_t s = 0; s < d; ++s) row[s] = fan.intern(c.generator(s));
    add(row, mpz_sizeinbase(c.multiplicity().get_mpz_t(), 2) - 1);
  }

  std::vector<std::uint64_t> parities(d);
  std::vector<RayId> face;
  std::vector<std::uint32_t> targets;
  std::vector<RayId> parent(d);
  while (!queue.empty()) {
    const std::uint32_t source = queue.front();
    queue.pop_front();
    // A queued slot may since have been freed or refilled; a refilled slot is
    // queued again on its own.
    if (!alive[source] || exponent[source] == 0) continue;

    const auto src = fan.cone(source);
    for (std::size_t s = 0; s < d; ++s) parities[s] = fan.ray_parity(src[s]);
    const auto kernel = min_weight_kernel_vector_mod2(parities);
    if (!kernel) throw InternalError("even multiplicity without a half-sum vector");
    face.clear();
    std::vector<Integer> sum(d);
    for (std::size_t s = 0; s < d; ++s) {
      if (!((*kernel >> s) & 1)) continue;
      face.push_back(src[s]);
      const auto& g = fan.ray(src[s]);
      for (std::size_t k = 0; k < d; ++k) sum[k] += g[k];
    }
    const RayId u = fan.intern(LatticeVector(std::move(sum)).divided_exactly(2));
    if (incidence.size() < fan.ray_count()) {
      incidence.resize(fan.ray_count());
      pruned_size.resize(fan.ray_count(), 0);
    }

    // The star of the face: live cones containing every face ray. u is the
    // half-sum of the same face in each of them.
    RayId pivot = face.front();
    for (RayId r : face)
      if (incidence[r].size() < incidence[pivot].size()) pivot = r;
    prune(pivot);
    targets.clear();
    for (std::uint32_t c : incidence[pivot])
      if (std::all_of(face.begin(), face.end(), [&](RayId r) { return contains_ray(c, r); })) targets.push_back(c);

    for (std::uint32_t c : targets) {
      alive[c] = 0;
      const auto rays = fan.cone(c);
      parent.assign(rays.begin(), rays.end());
      const std::size_t e = exponent[c] - 1u;
      free_slots.push_back(c);
      for (std::size_t s = 0; s < d; ++s) {
        if (std::find(face.begin(), face.end(), parent[s]) == face.end()) continue;
        row = parent;
        row[s] = u;
        add(row, e);
      }
    }
  }

  fan.retain(alive);
  return fan;
}

IsolatedRefinement refine_isolated(const SimplicialCone& cone) {
  if (!is_power_of_two(cone.multiplicity()))
    throw PhaseOrderError("isolated refinement needs a power-of-2 multiplicity");
  const SimplicialCone root = with_fresh_labels(cone);
  const BarycentricFrame frame(root);
  IsolatedRefinement out{root, {}, {}, {}};

  struct Pending {
    SimplicialCone cone;
    int generation;
  };
  std::deque<Pending> queue{{root, 0}};
  while (!queue.empty()) {
    Pending cur = std::move(queue.front());
    queue.pop_front();
    if (cur.cone.multiplicity() == 1) {
      out.leaf_generations.push_back(cur.generation);
      out.cones.push_back(cur.cone.with_id(out.cones.size()));
      continue;
    }
    const auto hs = half_sum(cur.cone);
    if (!hs) throw InternalError("even multiplicity without a half-sum vector");
    out.steps.push_back({cur.generation + 1, hs->u, frame.dilation(hs->u)});
    for (auto& child : stellar_subdivide(cur.cone, hs->u, half_coords(hs->subset)))
      queue.push_back({std::move(child), cur.generation + 1});
  }
  return out;
}

double hk_bound(std::size_t d, int k) {
  if (k <= 0) return 1.0;
  return static_cast<double>(d) / 2.0 * std::pow(1.5, k - 1);
}

Rational hk_exact(std::size_t d, int k) {
  if (k <= 0) return 1;
  // h[i] holds h_{i - d + 1}, so h[d - 1] = h_0.
  std::vector<Rational> h(d, Rational(1));
  h.push_back(Rational(static_cast<long>(d), 2));
  h.back().canonicalize();
  for (int step = 2; step <= k; ++step) {
    Rational sum = 0;
    for (std::size_t i = h.size() - d; i < h.size(); ++i) sum += h[i];
    h.push_back(sum / 2);
  }
  return h[d - 1 + static_cast<std::size_t>(k)];
}

Rational hk_bound_exact(std::size_t d, int k) {
  if (k <= 0) return 1;
  Rational out(static_cast<long>(d), 2);
  for (int i = 1; i < k; ++i) out *= Rational(3, 2);
  out.canonicalize();
  return out;
}

}  // namespace conetri
