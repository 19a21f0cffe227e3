#include "conetri/verifier.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "conetri/errors.hpp"
#include "conetri/number_theory.hpp"

namespace conetri {
namespace {

constexpr std::size_t kMaxViolations = 20;

void note(std::vector<std::string>& out, const std::string& msg) {
  if (out.size() < kMaxViolations) out.push_back(msg);
}

std::string str(const Integer& v) { return v.get_str(); }
std::string str(const Rational& v) { return v.get_str(); }

class PhiCache {
 public:
  double operator()(const Integer& n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(n, phi(n)).first->second;
  }

 private:
  std::map<Integer, double> cache_;
};

Integer abs_det(const SimplicialCone& c) { return abs(determinant(c.generator_matrix())); }

// Per-ray data of a fan measured against the base simplex. A ray's
// dilation is numer / mu(base).
struct RayFrame {
  std::vector<Integer> numer;
  std::vector<std::uint8_t> inside;      // in the base cone and not the origin
  std::vector<std::uint64_t> zero_mask;  // bit k: barycentric coordinate k is 0
};

RayFrame measure_rays(const SimplicialCone& base, const FlatFan& fan) {
  const BarycentricFrame frame(base);
  const std::size_t d = base.dimension();
  RayFrame out;
  out.numer.reserve(fan.ray_count());
  out.inside.reserve(fan.ray_count());
  out.zero_mask.reserve(fan.ray_count());
  std::vector<std::int64_t> small(d);
  for (RayId r = 0; r < fan.ray_count(); ++r) {
    bool inside = true;
    std::uint64_t zeros = 0;
    const auto x = fan.small_ray(r);
    if (!x.empty() && frame.scaled_coordinates(x, small)) {
      __int128 sum = 0;
      for (std::size_t k = 0; k < d; ++k) {
        inside = inside && small[k] >= 0;
        if (small[k] == 0 && k < 64) zeros |= std::uint64_t{1} << k;
        sum += small[k];
      }
      out.inside.push_back(inside && sum > 0);
      out.zero_mask.push_back(zeros);
      if (sum >= std::numeric_limits<std::int64_t>::min() && sum <= std::numeric_limits<std::int64_t>::max()) {
        out.numer.emplace_back(static_cast<long>(sum));
      } else {
        Integer v = 0;
        for (std::size_t k = 0; k < d; ++k) v += static_cast<long>(small[k]);
        out.numer.push_back(std::move(v));
      }
      continue;
    }
    const auto lambda = frame.scaled_coordinates(fan.ray(r));
    Integer sum = 0;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
      inside = inside && sgn(lambda[k]) >= 0;
      if (sgn(lambda[k]) == 0 && k < 64) zeros |= std::uint64_t{1} << k;
      sum += lambda[k];
    }
    out.inside.push_back(inside && sgn(sum) > 0);
    out.numer.push_back(std::move(sum));
    out.zero_mask.push_back(zeros);
  }
  return out;
}

// Sum of many fractions with balanced operand sizes.
class PairwiseSum {
 public:
  void add(Rational q) {
    std::size_t level = 0;
    while (!stack_.empty() && stack_.back().second == level) {
      q += stack_.back().first;
      stack_.pop_back();
      ++level;
    }
    stack_.emplace_back(std::move(q), level);
  }
  Rational total() const {
    Rational out = 0;
    for (const auto& [q, level] : stack_) out += q;
    return out;
  }

 private:
  std::vector<std::pair<Rational, std::size_t>> stack_;
};

Integer from_u128(unsigned __int128 v) {
  Integer out;
  mpz_import(out.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return out;
}

struct FacetRecord {
  std::uint64_t hash;
  std::uint32_t cone;
  std::uint16_t apex;
  std::int8_t side;
};

}  // namespace

bool TriangulationCheck::all_unimodular() const {
  return !unimodular.empty() && std::all_of(unimodular.begin(), unimodular.end(), [](bool b) { return b; });
}

TriangulationCheck verify_triangulation(const SimplicialCone& base, const FlatFan& fan, bool check_facets) {
  TriangulationCheck out;
  const std::size_t d = base.dimension();
  if (fan.dimension() != d) {
    out.unimodular.assign(fan.size(), false);
    return out;
  }
  const Integer base_mu = abs_det(base);
  const RayFrame rays = measure_rays(base, fan);
  out.containment_ok = true;
  for (std::size_t c = 0; c < fan.size(); ++c)
    for (RayId r : fan.cone(c))
      if (!rays.inside[r]) out.containment_ok = false;

  // Dilations are N_r / mu(base) with integral N_r, so each cone adds
  // |det| / prod N_r and the total must be mu(base)^(1 - d). Terms with the
  // same N multiset are merged first. Sorting by the descending N tuple
  // keeps neighbours sharing most factors, which keeps the partial
  // denominators of the pairwise sum small.
  const auto& numer = rays.numer;
  std::uint64_t max_n = 0;
  bool fits = true;
  for (RayId r = 0; r < fan.ray_count(); ++r) {
    fits = fits && mpz_fits_ulong_p(numer[r].get_mpz_t());
    if (fits) max_n = std::max<std::uint64_t>(max_n, numer[r].get_ui());
  }
  const unsigned n_bits = max_n == 0 ? 1 : static_cast<unsigned>(std::bit_width(max_n));
  // Packed mode: the sorted N tuple itself is the key. Product mode: the
  // key is prod N_r. Otherwise every term goes through exact rationals.
  const bool packed = fits && n_bits * d <= 128;
  const bool product = !packed && fits && static_cast<std::size_t>(n_bits) * d <= 127;

  std::vector<int> signs(fan.size());
  std::vector<std::pair<unsigned __int128, std::uint64_t>> terms;  // (key, |det|)
  PairwiseSum volume;
  bool degenerate = !out.containment_ok;
  out.unimodular.reserve(fan.size());
  std::vector<std::uint8_t> used(fan.ray_count(), 0);
  std::vector<std::uint64_t> ns(d);
  std::vector<std::uint64_t> small_numer;
  if (packed || product) {
    small_numer.resize(fan.ray_count());
    for (RayId r = 0; r < fan.ray_count(); ++r) small_numer[r] = numer[r].get_ui();
  }
  Integer det;
  for (std::size_t c = 0; c < fan.size(); ++c) {
    const auto small_det = fan.small_determinant(c);
    std::uint64_t small_mag = 0;
    bool small_ok = false;
    if (small_det) {
      signs[c] = (*small_det > 0) - (*small_det < 0);
      small_mag = *small_det < 0 ? 0 - static_cast<std::uint64_t>(*small_det) : static_cast<std::uint64_t>(*small_det);
      small_ok = true;
    } else {
      det = fan.determinant(c);
      signs[c] = sgn(det);
      if (mpz_fits_ulong_p(Integer(abs(det)).get_mpz_t())) {
        small_mag = Integer(abs(det)).get_ui();
        small_ok = true;
      }
    }
    out.unimodular.push_back(small_ok && small_mag == 1);
    if (signs[c] == 0) degenerate = true;
    for (RayId r : fan.cone(c)) used[r] = 1;
    if (degenerate) continue;
    if ((packed || product) && small_ok) {
      unsigned __int128 key = packed ? 0 : 1;
      if (packed) {
        std::size_t k = 0;
        for (RayId r : fan.cone(c)) ns[k++] = small_numer[r];
        std::sort(ns.begin(), ns.end(), std::greater<>());
        for (std::uint64_t v : ns) key = (key << n_bits) | v;
      } else {
        for (RayId r : fan.cone(c)) key *= small_numer[r];
      }
      terms.emplace_back(key, small_mag);
    } else {
      if (small_det) det = Integer(static_cast<long>(*small_det));
      Integer denom = 1;
      for (RayId r : fan.cone(c)) denom *= numer[r];
      Rational term(Integer(abs(det)), denom);
      term.canonicalize();
      volume.add(std::move(term));
    }
  }
  if (!degenerate) {
    std::sort(terms.begin(), terms.end());
    const unsigned __int128 mask = (static_cast<unsigned __int128>(1) << n_bits) - 1;
    for (std::size_t i = 0; i < terms.size();) {
      Integer num = 0;
      std::size_t j = i;
      for (; j < terms.size() && terms[j].first == terms[i].first; ++j) num += terms[j].second;
      Integer den;
      if (packed) {
        den = 1;
        unsigned __int128 key = terms[i].first;
        for (std::size_t k = 0; k < d; ++k, key >>= n_bits) den *= static_cast<unsigned long>(key & mask);
      } else {
        den = from_u128(terms[i].first);
      }
      Rational term(num, den);
      term.canonicalize();
      volume.add(std::move(term));
      i = j;
    }
    std::vector<std::pair<unsigned __int128, std::uint64_t>>().swap(terms);
    Integer scale = 1;
    for (std::size_t k = 1; k < d; ++k) scale *= base_mu;
    out.volume_ok = fan.size() > 0 && volume.total() * scale == 1;
  }
  if (out.containment_ok && out.all_unimodular()) {
    Integer best = 0;
    for (RayId r = 0; r < fan.ray_count(); ++r)
      if (used[r]) best = std::max(best, numer[r]);
    out.max_dilation = Rational(best, base_mu);
    out.max_dilation.canonicalize();
  }

  if (!check_facets || degenerate || d > 64) return out;

  // Every facet is recorded once per cone with the side its apex lies on:
  // the orientation of (facet rays sorted by id, apex) is the cone's sign
  // times the parity of that slot permutation.
  std::vector<FacetRecord> records;
  records.reserve(fan.size() * d);
  std::vector<std::size_t> order(d);
  auto facet_rays = [&](const FacetRecord& f, std::vector<RayId>& key) {
    const auto rs = fan.cone(f.cone);
    key.clear();
    for (std::size_t s = 0; s < d; ++s)
      if (s != f.apex) key.push_back(rs[s]);
    std::sort(key.begin(), key.end());
  };
  for (std::size_t c = 0; c < fan.size(); ++c) {
    const auto rs = fan.cone(c);
    for (std::size_t apex = 0; apex < d; ++apex) {
      order.clear();
      for (std::size_t s = 0; s < d; ++s)
        if (s != apex) order.push_back(s);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rs[a] < rs[b]; });
      order.push_back(apex);
      int parity = 1;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
          if (order[i] > order[j]) parity = -parity;
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (std::size_t i = 0; i + 1 < d; ++i) h = (h ^ rs[order[i]]) * 0x100000001b3ULL;
      records.push_back({h, static_cast<std::uint32_t>(c), static_cast<std::uint16_t>(apex),
                         static_cast<std::int8_t>(parity * signs[c])});
    }
  }
  std::sort(records.begin(), records.end(), [](const FacetRecord& a, const FacetRecord& b) {
    return std::tie(a.hash, a.cone, a.apex) < std::tie(b.hash, b.cone, b.apex);
  });

  out.facets_ok = true;
  const std::uint64_t all_coords = d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
  std::vector<std::vector<RayId>> keys;
  std::vector<std::array<int, 2>> sides;
  std::vector<RayId> key;
  for (std::size_t i = 0; i < records.size() && out.facets_ok;) {
    std::size_t j = i;
    while (j < records.size() && records[j].hash == records[i].hash) ++j;
    // Records sharing a hash, split by their actual ray sets.
    keys.clear();
    sides.clear();
    for (std::size_t k = i; k < j; ++k) {
      facet_rays(records[k], key);
      std::size_t g = 0;
      while (g < keys.size() && keys[g] != key) ++g;
      if (g == keys.size()) {
        keys.push_back(key);
        sides.push_back({0, 0});
      }
      sides[g][records[k].side > 0 ? 1 : 0] += 1;
    }
    for (std::size_t g = 0; g < keys.size() && out.facets_ok; ++g) {
      std::uint64_t common_zero = all_coords;
      for (RayId r : keys[g]) common_zero &= rays.zero_mask[r];
      const bool boundary = common_zero != 0;
      out.facets_ok = boundary ? sides[g][0] + sides[g][1] == 1 : sides[g][0] == 1 && sides[g][1] == 1;
    }
    i = j;
  }
  return out;
}

TriangulationCheck verify_triangulation(const SimplicialCone& base, std::span<const SimplicialCone> cones,
                                        bool check_facets) {
  const std::size_t d = base.dimension();
  if (cones.empty() || std::any_of(cones.begin(), cones.end(), [&](const auto& c) { return c.dimension() != d; })) {
    TriangulationCheck out;
    out.unimodular.assign(cones.size(), false);
    return out;
  }
  return verify_triangulation(base, FlatFan::from_cones(cones), check_facets);
}

Rational max_dilation(const SimplicialCone& base, const FlatFan& fan) {
  const RayFrame rays = measure_rays(base, fan);
  Integer best = 0;
  std::vector<std::uint8_t> used(fan.ray_count(), 0);
  for (std::size_t c = 0; c < fan.size(); ++c) {
    const Integer det = fan.determinant(c);
    if (det != 1 && det != -1) throw PhaseOrderError("max_dilation needs a unimodular triangulation");
    for (RayId r : fan.cone(c)) used[r] = 1;
  }
  for (RayId r = 0; r < fan.ray_count(); ++r)
    if (used[r]) best = std::max(best, rays.numer[r]);
  Rational out(best, abs_det(base));
  out.canonicalize();
  return out;
}

Rational max_dilation(const SimplicialCone& base, std::span<const SimplicialCone> cones) {
  if (cones.empty()) return 0;
  return max_dilation(base, FlatFan::from_cones(cones));
}

double mu_ceiling_log2(const Integer& mu) {
  const double l = log2_of(mu);
  return 0.5 * l * (l + 3.0);
}

double mu_ceiling(const Integer& mu) { return std::exp2(mu_ceiling_log2(mu)); }

double corollary_exponent() { return 5.0 + 1.5 * std::log2(1.5); }

double theorem_bound(const Integer& mu, std::size_t d) {
  const double l = log2_of(mu);
  const double dd = static_cast<double>(d);
  // Evaluated in log2 space to postpone overflow.
  const double lg = std::log2(dd * dd / 4.0) + l + 2.0 * phi(mu) + 0.5 * l * (l + 3.0) * std::log2(1.5);
  return std::exp2(lg);
}

double corollary_bound(const Integer& mu, std::size_t d) {
  if (mu <= 1) throw DomainError("the simplified bound needs mu > 1");
  const double l = log2_of(mu);
  const double dd = static_cast<double>(d);
  const double lg = std::log2(dd * dd / 64.0) + corollary_exponent() * l + 0.5 * l * l * std::log2(1.5);
  return std::exp2(lg);
}

FinalBounds final_bounds(const Integer& mu, std::size_t d) {
  FinalBounds b;
  b.thm = theorem_bound(mu, d);
  if (mu > 1) b.cor = corollary_bound(mu, d);
  b.mu_ceiling = mu_ceiling(mu);
  return b;
}

bool within_bound(const Rational& value, double bound) {
  if (std::isnan(bound)) return false;
  if (std::isinf(bound)) return bound > 0;
  const double up = std::nextafter(bound, std::numeric_limits<double>::infinity());
  return value <= Rational(up);
}

TraceAudit audit_trace(const SimplicialCone& base, std::span<const TraceEvent> trace,
                       std::span<const SimplicialCone> all_created) {
  TraceAudit out;
  PhiCache phi_of;
  const Integer& mu = base.multiplicity();
  const std::size_t d = base.dimension();
  const double phi_base = phi_of(mu);

  auto lookup = [&](ConeId id) -> const SimplicialCone* {
    if (id < all_created.size() && all_created[id].id() == id) return &all_created[id];
    return nullptr;
  };

  std::unordered_set<ConeId> parents;
  for (const auto& ev : trace) {
    parents.insert(ev.parent_id);
    const double phi_parent = phi_of(ev.mu_parent);
    for (const auto& child_mu : ev.mu_children) {
      if (phi_of(child_mu) > phi_parent - 1.0 + kPhiSlack) {
        out.phi_descent_ok = false;
        note(out.violations, "phi descent: cone " + std::to_string(ev.parent_id) + " mu " + str(ev.mu_parent) +
                                 " -> child mu " + str(child_mu));
      }
    }

    const SimplicialCone* parent = lookup(ev.parent_id);
    bool consistent = parent != nullptr && ev.z_prime.size() == parent->dimension() &&
                      ev.children_ids.size() == ev.mu_children.size() && parent->multiplicity() == ev.mu_parent;
    if (consistent) {
      std::vector<Integer> sum(d);
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) sum[k] += ev.z_prime[j] * parent->generator(j)[k];
      for (std::size_t k = 0; k < d && consistent; ++k) consistent = sum[k] == ev.p * ev.x_prime[k];

      std::size_t next_child = 0;
      for (std::size_t j = 0; j < d && consistent; ++j) {
        if (sgn(ev.z_prime[j]) == 0) continue;
        if (next_child >= ev.children_ids.size()) {
          consistent = false;
          break;
        }
        Rational expected(ev.z_prime[j] * ev.mu_parent, ev.p);
        expected.canonicalize();
        const SimplicialCone* child = lookup(ev.children_ids[next_child]);
        consistent = expected.get_den() == 1 && expected.get_num() == ev.mu_children[next_child] &&
                     child != nullptr && child->multiplicity() == ev.mu_children[next_child];
        ++next_child;
      }
      consistent = consistent && next_child == ev.children_ids.size();
    }
    if (!consistent) {
      out.trace_consistent_ok = false;
      note(out.violations, "inconsistent trace event for cone " + std::to_string(ev.parent_id));
    }
  }

  const double ceiling_log2 = mu_ceiling_log2(mu);
  for (const auto& cone : all_created) {
    if (cone.max_label() > phi_base - 1.0 + kPhiSlack) {
      out.label_depth_ok = false;
      note(out.violations, "label depth " + std::to_string(cone.max_label()) + " on cone " + std::to_string(cone.id()));
    }
    if (log2_of(cone.multiplicity()) > ceiling_log2 + 1e-9) {
      out.mu_bound_ok = false;
      note(out.violations, "multiplicity " + str(cone.multiplicity()) + " above ceiling on cone " +
                               std::to_string(cone.id()));
    }
  }

  const BarycentricFrame frame(base);
  const double global_bound = static_cast<double>(d) / 2.0 * mu.get_d() * std::exp2(2.0 * phi_base);
  std::unordered_set<const LabelNode*> checked;
  for (const auto& cone : all_created) {
    if (parents.count(cone.id())) continue;
    for (const LabelNode* node = cone.label_chain().get(); node != nullptr; node = node->prev.get()) {
      if (!checked.insert(node).second) break;  // the rest of this chain was checked already
      const Rational dil = frame.dilation(node->vector);
      Rational bound = 1;
      if (node->index >= 0) {
        Integer scaled = d * mu;
        mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * static_cast<unsigned>(node->index));
        bound = Rational(scaled, 2);
        bound.canonicalize();
      }
      if (dil > bound) {
        out.xi_length_ok = false;
        note(out.violations, "xi(" + std::to_string(node->index) + ") dilation " + str(dil) + " exceeds " +
                                 str(bound) + " in cone " + std::to_string(cone.id()));
      }
      if (!within_bound(dil, global_bound)) {
        out.xi_length_global_ok = false;
        note(out.violations, "xi(" + std::to_string(node->index) + ") dilation " + str(dil) +
                                 " exceeds the phi-based bound in cone " + std::to_string(cone.id()));
      }
    }
  }
  return out;
}

IsolatedAudit audit_isolated(const IsolatedRefinement& refinement) {
  IsolatedAudit out;
  const SimplicialCone& root = refinement.root;
  const std::size_t d = root.dimension();
  const int l = static_cast<int>(mpz_sizeinbase(root.multiplicity().get_mpz_t(), 2)) - 1;

  std::map<int, Rational> hk;
  for (const auto& step : refinement.steps) {
    auto it = hk.find(step.generation);
    if (it == hk.end()) it = hk.emplace(step.generation, hk_exact(d, step.generation)).first;
    if (step.dilation > it->second) {
      out.generation_ok = false;
      note(out.violations, "generation " + std::to_string(step.generation) + " vector dilation " +
                               str(step.dilation) + " exceeds h_k = " + str(it->second));
    }
  }

  for (int g : refinement.leaf_generations)
    if (g != l) out.exact_depth_ok = false;

  const BarycentricFrame frame(root);
  Rational bound(static_cast<long>(d), 2);
  for (int i = 0; i < l; ++i) bound *= Rational(3, 2);
  out.max_dilation = 0;
  for (const auto& cone : refinement.cones) {
    for (const auto& g : cone.generators()) {
      const Rational dil = frame.dilation(g);
      out.max_dilation = std::max(out.max_dilation, dil);
      if (dil > bound) {
        out.final_ok = false;
        note(out.violations, "leaf generator dilation " + str(dil) + " exceeds " + str(bound));
      }
    }
  }
  return out;
}

std::vector<std::string> CertificateReport::failing() const {
  std::vector<std::string> out;
  auto check = [&](bool ok, const char* name) {
    if (!ok) out.emplace_back(name);
  };
  check(volume_ok, "volume_ok");
  check(containment_ok, "containment_ok");
  if (facets_checked) check(facets_ok, "facets_ok");
  check(all_unimodular, "all_unimodular");
  check(phi_descent_ok, "phi_descent_ok");
  check(label_depth_ok, "label_depth_ok");
  check(mu_bound_ok, "mu_bound_ok");
  check(xi_length_ok, "xi_length_ok");
  check(xi_length_global_ok, "xi_length_global_ok");
  check(trace_consistent_ok, "trace_consistent_ok");
  check(final_bound_ok, "final_bound_ok");
  if (isolated_generation_ok) check(*isolated_generation_ok, "isolated_generation_ok");
  if (isolated_final_ok) check(*isolated_final_ok, "isolated_final_ok");
  return out;
}

}  // namespace conetri
