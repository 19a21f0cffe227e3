#include "conetri/p2t_engine.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "conetri/cone_complex.hpp"
#include "conetri/errors.hpp"

namespace conetri {

std::size_t protected_count(const Integer& p) {
  const double ln_p = log2_of(p) * std::numbers::ln2;
  return static_cast<std::size_t>(std::floor(ln_p / kRosserTau));
}

bool coefficient_ok_protected(const Integer& z, const Integer& p) {
  return !is_prime(z) || 2 * z <= p || (z == 2 && p == 3);
}

FoundVector find_x(const SimplicialCone& cone, const Integer& p) {
  const Integer& mu = cone.multiplicity();
  if (is_power_of_two(mu)) throw DomainError("find_x called on a cone whose multiplicity is a power of 2");
  if (p != p_max(factorize(mu))) throw DomainError("find_x needs the largest prime divisor of the multiplicity");

  const std::size_t d = cone.dimension();
  const auto order = cone.label_order();
  const LatticeVector seed = order_p_element(cone, p);
  const RationalVector lambda = barycentric(cone, seed);
  std::vector<Integer> base_z(d);
  for (std::size_t j = 0; j < d; ++j) {
    const Rational scaled = lambda[order[j]] * p;
    if (scaled.get_den() != 1) throw InternalError("order-p element with non-integral coefficient");
    base_z[j] = scaled.get_num();
  }

  // Every multiple j * seed (0 < j < p) is an order-p box point. Among those
  // passing the protected test, take the one whose adjusted coefficients have
  // the least sum, then the fewest nonzero entries, then the smallest j.
  const std::size_t guarded = std::min(protected_count(p), d);
  std::vector<Integer> best;
  Integer best_sum;
  std::size_t best_support = 0;
  std::vector<Integer> z(d);
  for (Integer mult = 1; mult < p; ++mult) {
    if (!best.empty() && mult > kFindScanLimit) break;
    Integer raw_sum = 0;
    for (std::size_t j = 0; j < d; ++j) {
      mpz_mul(z[j].get_mpz_t(), mult.get_mpz_t(), base_z[j].get_mpz_t());
      mpz_fdiv_r(z[j].get_mpz_t(), z[j].get_mpz_t(), p.get_mpz_t());
      raw_sum += z[j];
    }
    if (!best.empty() && raw_sum > best_sum) continue;
    bool ok = true;
    for (std::size_t j = 0; j < guarded && ok; ++j) ok = coefficient_ok_protected(z[j], p);
    if (!ok) continue;
    const std::vector<Integer> adjusted = adjust_coefficients(z, p);
    Integer total = 0;
    std::size_t support = 0;
    for (const auto& v : adjusted) {
      total += v;
      support += sgn(v) != 0;
    }
    if (best.empty() || total < best_sum || (total == best_sum && support < best_support)) {
      best = z;
      best_sum = total;
      best_support = support;
    }
  }
  if (best.empty()) throw InternalError("no multiple of the order-p element avoids the protected primes");

  std::vector<Integer> sum(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& g = cone.generator(order[j]);
    for (std::size_t k = 0; k < d; ++k) sum[k] += best[j] * g[k];
  }
  return FoundVector{LatticeVector(std::move(sum)).divided_exactly(p), std::move(best), order};
}

std::vector<Integer> adjust_coefficients(std::span<const Integer> z, const Integer& p) {
  std::vector<Integer> out(z.begin(), z.end());
  for (std::size_t j = protected_count(p); j < out.size(); ++j) {
    if (!is_prime(z[j]) || 2 * z[j] <= p || z[j] == 2) continue;
    const OddAdjustment adj = odd_adjust(z[j], p);
    out[j] = z[j] + adj.k * p;
  }
  return out;
}

P2TState run_p2t(const SimplicialCone& base) {
  if (base.dimension() < 2) throw DimensionError("cone dimension must be at least 2");
  ConeComplex fan(Triangulation::single(with_fresh_labels(base)));
  std::vector<TraceEvent> trace;
  std::deque<ConeId> queue;
  if (!is_power_of_two(base.multiplicity())) queue.push_back(0);

  while (!queue.empty()) {
    const ConeId source = queue.front();
    queue.pop_front();
    if (!fan.live(source)) continue;
    const SimplicialCone& d_cone = fan.cone(source);
    if (is_power_of_two(d_cone.multiplicity())) continue;

    const Integer p = p_max(factorize(d_cone.multiplicity()));
    const FoundVector found = find_x(d_cone, p);
    const std::vector<Integer> z_prime = adjust_coefficients(found.z, p);

    const std::size_t d = d_cone.dimension();
    std::vector<Integer> sum(d);
    // Coefficients of x' per ray, keyed by generator vector; the face of
    // the fan containing x' in its relative interior is their support.
    std::unordered_map<LatticeVector, std::pair<Integer, Integer>, LatticeVectorHash> coeff;
    std::vector<LatticeVector> face;
    for (std::size_t j = 0; j < d; ++j) {
      const auto& g = d_cone.generator(found.order[j]);
      for (std::size_t k = 0; k < d; ++k) sum[k] += z_prime[j] * g[k];
      if (sgn(z_prime[j]) != 0) {
        coeff.emplace(g, std::make_pair(found.z[j], z_prime[j]));
        face.push_back(g);
      }
    }
    const LatticeVector x_prime = LatticeVector(std::move(sum)).divided_exactly(p);

    for (ConeId target : fan.star(face)) {
      const SimplicialCone parent = fan.cone(target);
      TraceEvent ev;
      ev.parent_id = target;
      ev.source_id = source;
      ev.p = p;
      ev.x_prime = x_prime;
      ev.mu_parent = parent.multiplicity();
      ev.new_label_index = parent.max_label() + 1;
      RationalVector coords(d);
      ev.z.assign(d, 0);
      ev.z_prime.assign(d, 0);
      for (std::size_t slot = 0; slot < d; ++slot) {
        auto it = coeff.find(parent.generator(slot));
        if (it == coeff.end()) continue;
        ev.z[slot] = it->second.first;
        ev.z_prime[slot] = it->second.second;
        coords[slot] = Rational(it->second.second, p);
        coords[slot].canonicalize();
      }
      const auto children = fan.subdivide(target, x_prime, coords);
      if (children.size() == 1 && children.front() == target) continue;
      for (ConeId c : children) {
        ev.children_ids.push_back(c);
        ev.mu_children.push_back(fan.cone(c).multiplicity());
        if (!is_power_of_two(fan.cone(c).multiplicity())) queue.push_back(c);
      }
      trace.push_back(std::move(ev));
    }
  }

  return P2TState{fan.snapshot(), kRosserTau, std::move(trace), std::move(queue)};
}

}  // namespace conetri
