#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "conetri/exact_linalg.hpp"

namespace conetri {

/// Immutable integer point of Z^d. Copies share coordinate storage.
class LatticeVector {
 public:
  LatticeVector();
  explicit LatticeVector(std::vector<Integer> coords);
  LatticeVector(std::initializer_list<long> coords);

  static LatticeVector zero(std::size_t d);

  std::size_t size() const { return coords_->size(); }
  const Integer& operator[](std::size_t i) const { return (*coords_)[i]; }
  std::span<const Integer> coords() const { return *coords_; }
  const std::vector<Integer>& values() const { return *coords_; }

  bool is_zero() const;
  /// gcd of the coordinates (0 for the zero vector).
  Integer content() const;
  bool primitive() const { return content() == 1; }

  /// Exact division by a scalar known to divide every coordinate.
  LatticeVector divided_exactly(const Integer& k) const;

  friend LatticeVector operator+(const LatticeVector& a, const LatticeVector& b);
  friend LatticeVector operator-(const LatticeVector& a, const LatticeVector& b);
  friend LatticeVector operator*(const Integer& k, const LatticeVector& v);
  friend bool operator==(const LatticeVector& a, const LatticeVector& b);
  /// Lexicographic, shorter vectors first.
  friend bool operator<(const LatticeVector& a, const LatticeVector& b);

  std::size_t hash() const;

 private:
  std::shared_ptr<const std::vector<Integer>> coords_;
};

struct LatticeVectorHash {
  std::size_t operator()(const LatticeVector& v) const { return v.hash(); }
};

using ConeId = std::uint64_t;

/// One entry of the xi label history. Nodes form a persistent list sorted by
/// decreasing index, so children share their parent's history.
struct LabelNode {
  int index;
  LatticeVector vector;
  std::shared_ptr<const LabelNode> prev;
};
using LabelChain = std::shared_ptr<const LabelNode>;

/// Simplicial cone with its xi label history.
///
/// Every generator carries the label index under which it is recorded in the
/// history; unlabeled indices read as the zero vector. Base cones carry labels
/// -1..-d on generators 1..d.
class SimplicialCone {
 public:
  /// Unchecked assembly; use make_cone for validated base cones.
  SimplicialCone(std::vector<LatticeVector> generators, std::vector<int> generator_labels,
                 LabelChain labels, Integer multiplicity, ConeId id = 0);

  const std::vector<LatticeVector>& generators() const { return generators_; }
  const LatticeVector& generator(std::size_t slot) const { return generators_[slot]; }
  std::size_t dimension() const { return generators_.size(); }
  const Integer& multiplicity() const { return multiplicity_; }
  ConeId id() const { return id_; }
  SimplicialCone with_id(ConeId id) const;

  const std::vector<int>& generator_labels() const { return generator_labels_; }
  const LabelChain& label_chain() const { return labels_; }
  /// max{i : xi(i) != 0}
  int max_label() const;
  /// xi(index), or the zero vector when unset.
  LatticeVector xi(int index) const;
  /// All nonzero labels in ascending index order.
  std::vector<std::pair<int, LatticeVector>> labels() const;
  /// Generator slots sorted by decreasing label index.
  std::vector<std::size_t> label_order() const;

  IntMatrix generator_matrix() const;

 private:
  std::vector<LatticeVector> generators_;
  std::vector<int> generator_labels_;
  LabelChain labels_;
  Integer multiplicity_;
  ConeId id_;
};

/// A subdivision of `base` into simplicial cones. `all_created` records every
/// cone ever produced on the way, indexed by id.
struct Triangulation {
  SimplicialCone base;
  std::vector<SimplicialCone> cones;
  std::vector<SimplicialCone> all_created;

  static Triangulation single(const SimplicialCone& cone);
};

/// Smallest c with x in c * Delta, i.e. the sum of barycentric coordinates.
struct DilationFactor {
  Rational value;

  friend bool operator==(const DilationFactor&, const DilationFactor&) = default;
};

/// Validated cone: d >= 2, independent and primitive generators.
SimplicialCone make_cone(std::vector<LatticeVector> generators);

/// Same generators and id-0, with the history reset to base labels -1..-d.
/// Generators are taken as given (primitivity is not required).
SimplicialCone with_fresh_labels(const SimplicialCone& cone);

RationalVector barycentric(const SimplicialCone& cone, const LatticeVector& x);
bool contains(const SimplicialCone& cone, const LatticeVector& x);
DilationFactor dilation(const SimplicialCone& base, const LatticeVector& x);

/// True when x lies in the lattice spanned by the generators.
bool in_generator_lattice(const SimplicialCone& cone, const LatticeVector& x);

/// Representative of x modulo the generator lattice inside the half-open
/// parallelepiped.
LatticeVector par_normalize(const SimplicialCone& cone, const LatticeVector& x);

/// Deterministic par-box point of order p in Z^d / (generator lattice),
/// built from the Smith normal form of the generator matrix.
LatticeVector order_p_element(const SimplicialCone& cone, const Integer& p);

/// Children of the stellar subdivision of `cone` at x. Child i replaces
/// generator i (for every i with positive coordinate) and records x under
/// label max_label() + 1. If x equals a generator, returns {cone}.
std::vector<SimplicialCone> stellar_subdivide(const SimplicialCone& cone, const LatticeVector& x);
/// As above with the barycentric coordinates of x already known.
std::vector<SimplicialCone> stellar_subdivide(const SimplicialCone& cone, const LatticeVector& x,
                                              const RationalVector& coords);

struct HalfSum {
  LatticeVector u;
  std::vector<std::uint8_t> subset;  // 0/1 per generator slot
};

/// u = (1/2) sum of the generators in a nonempty subset, when the
/// multiplicity is even. The subset is a least-weight vector of the mod-2
/// kernel of the generator matrix.
std::optional<HalfSum> half_sum(const SimplicialCone& cone);
std::optional<LatticeVector> half_vector(const SimplicialCone& cone);

/// Precomputed inverse of a cone's generator matrix for repeated coordinate
/// queries against the same cone.
class BarycentricFrame {
 public:
  explicit BarycentricFrame(const SimplicialCone& cone);

  RationalVector coordinates(const LatticeVector& x) const;
  /// mu * coordinates(x); always integral.
  std::vector<Integer> scaled_coordinates(const LatticeVector& x) const;
  /// The same for a point given as machine integers. Returns false, leaving
  /// `out` unspecified, when some value does not fit in 64 bits.
  bool scaled_coordinates(std::span<const std::int64_t> x, std::span<std::int64_t> out) const;
  /// The multiplicity mu of the frame's cone.
  Integer multiplicity() const { return abs(det_); }
  Rational dilation(const LatticeVector& x) const;
  bool contains(const LatticeVector& x) const;

 private:
  IntMatrix scaled_inverse_;  // det * G^{-1}
  Integer det_;
  std::vector<std::int64_t> small_inverse_;  // sign(det) * scaled_inverse_, if it fits
};

}  // namespace conetri
