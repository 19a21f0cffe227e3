#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "conetri/cone_geometry.hpp"
#include "conetri/number_theory.hpp"

namespace conetri {

/// One stellar subdivision of one cone. When x' produced by cone `source_id`
/// also lies on a face of other cones, each of those gets its own event.
/// Coefficient lists are in the parent's generator slot order and satisfy
/// x_prime = (1/p) * sum z_prime[j] * parent.generator(j).
struct TraceEvent {
  ConeId parent_id = 0;
  ConeId source_id = 0;
  Integer p;
  std::vector<Integer> z;
  std::vector<Integer> z_prime;
  LatticeVector x_prime;
  int new_label_index = 0;
  std::vector<ConeId> children_ids;
  Integer mu_parent;
  std::vector<Integer> mu_children;
};

struct P2TState {
  /// cones: the current 2-triangulation; all_created: every cone ever made.
  Triangulation triangulation;
  double tau = kRosserTau;
  std::vector<TraceEvent> trace;
  std::deque<ConeId> work_queue;
};

/// Number of leading (highest-label) positions whose coefficient is
/// constrained by the FIND step: floor(ln p / tau).
std::size_t protected_count(const Integer& p);

/// z is not prime, or z <= p/2, or (z = 2 and p = 3).
bool coefficient_ok_protected(const Integer& z, const Integer& p);

struct FoundVector {
  LatticeVector x;
  /// Coefficients in decreasing-label order: x = (1/p) sum z[j] * generator(order[j]).
  std::vector<Integer> z;
  std::vector<std::size_t> order;
};

/// Multiples of the order-p seed examined by find_x once a valid one is known.
inline constexpr unsigned long kFindScanLimit = 1UL << 16;

/// Order-p par-box point whose protected coefficients pass
/// coefficient_ok_protected, chosen among the multiples of order_p_element
/// to minimise the sum of the adjusted coefficients (ties: fewer nonzero
/// coefficients, then the smaller multiple). Requires p = p_max(mu) and mu
/// not a power of 2.
FoundVector find_x(const SimplicialCone& cone, const Integer& p);

/// Lifts unprotected odd-prime coefficients above p/2 to z + k*p = 2^s * t.
/// Input and output are in decreasing-label order.
std::vector<Integer> adjust_coefficients(std::span<const Integer> z, const Integer& p);

/// Subdivides until every multiplicity is a power of two.
P2TState run_p2t(const SimplicialCone& base);

}  // namespace conetri
