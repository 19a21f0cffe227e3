#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conetri/cone_geometry.hpp"
#include "conetri/flat_fan.hpp"
#include "conetri/p2t_engine.hpp"
#include "conetri/pow2_refiner.hpp"

namespace conetri {

/// Slack for inequalities between values of phi; their true gaps are >= 1.
inline constexpr double kPhiSlack = 1e-6;

struct TriangulationCheck {
  /// sum over cones of mu(D) / prod_g dilation(g) equals mu(base). This is the
  /// normalized volume of Delta_base; it reduces to sum mu(D) = mu(base) when
  /// every generator lies on the base simplex's outer facet.
  bool volume_ok = false;
  /// Every generator is a nonzero point of the base cone.
  bool containment_ok = false;
  /// Every interior facet is shared by exactly two cones lying on opposite
  /// sides; every boundary facet lies in a facet of the base and is used once.
  bool facets_ok = false;
  std::vector<bool> unimodular;
  /// Largest dilation of a generator; filled in when the cones are contained
  /// and unimodular.
  Rational max_dilation;

  bool all_unimodular() const;
};

TriangulationCheck verify_triangulation(const SimplicialCone& base, const FlatFan& fan, bool check_facets = true);
TriangulationCheck verify_triangulation(const SimplicialCone& base, std::span<const SimplicialCone> cones,
                                        bool check_facets = true);

/// Largest dilation of any generator of the (unimodular) cones w.r.t. base.
Rational max_dilation(const SimplicialCone& base, const FlatFan& fan);
Rational max_dilation(const SimplicialCone& base, std::span<const SimplicialCone> cones);

/// 2^((1/2) ld mu (ld mu + 3)), the ceiling on intermediate multiplicities.
double mu_ceiling(const Integer& mu);
/// Exponent of mu_ceiling, (1/2) ld mu (ld mu + 3).
double mu_ceiling_log2(const Integer& mu);

/// 5 + (3/2) ld(3/2)
double corollary_exponent();

struct FinalBounds {
  double thm = 0;
  std::optional<double> cor;  // undefined for mu = 1
  double mu_ceiling = 0;
};

double theorem_bound(const Integer& mu, std::size_t d);
/// Throws DomainError for mu = 1.
double corollary_bound(const Integer& mu, std::size_t d);
FinalBounds final_bounds(const Integer& mu, std::size_t d);

/// value <= bound, with the bound rounded up by one ulp before an exact
/// comparison.
bool within_bound(const Rational& value, double bound);

struct TraceAudit {
  bool phi_descent_ok = true;
  bool label_depth_ok = true;
  bool mu_bound_ok = true;
  bool xi_length_ok = true;         // (d/2) mu 4^s for s >= 0, 1 for s < 0
  bool xi_length_global_ok = true;  // (d/2) mu 4^phi(mu) for every label
  bool trace_consistent_ok = true;  // x' and child multiplicities match z'
  std::vector<std::string> violations;
};

/// Checks every bound on the P2T run. The final 2-triangulation is
/// recovered as the created cones that never appear as a trace parent.
TraceAudit audit_trace(const SimplicialCone& base, std::span<const TraceEvent> trace,
                       std::span<const SimplicialCone> all_created);

struct IsolatedAudit {
  bool generation_ok = true;  // every generation-k vector has dilation <= h_k
  bool final_ok = true;       // leaves within (d/2) (3/2)^l of the root simplex
  bool exact_depth_ok = true; // leaves sit at generation l
  Rational max_dilation;
  std::vector<std::string> violations;
};

IsolatedAudit audit_isolated(const IsolatedRefinement& refinement);

struct CertificateReport {
  bool volume_ok = false;
  bool containment_ok = false;
  bool facets_ok = false;
  bool facets_checked = false;
  bool all_unimodular = false;
  Rational max_dilation;
  bool phi_descent_ok = false;
  bool label_depth_ok = false;
  bool mu_bound_ok = false;
  bool xi_length_ok = false;
  bool xi_length_global_ok = false;
  bool trace_consistent_ok = false;
  double final_bound_thm = 0;
  std::optional<double> final_bound_cor;
  double mu_ceiling = 0;
  bool final_bound_ok = false;
  std::optional<bool> isolated_generation_ok;
  std::optional<bool> isolated_final_ok;
  std::vector<std::string> violations;

  /// Names of the flags that failed, in report order.
  std::vector<std::string> failing() const;
  bool all_ok() const { return failing().empty(); }
};

}  // namespace conetri
