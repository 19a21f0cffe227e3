#include "conetri/cone_geometry.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

#include "conetri/errors.hpp"

namespace conetri {
namespace {

const std::shared_ptr<const std::vector<Integer>>& empty_coords() {
  static const auto empty = std::make_shared<const std::vector<Integer>>();
  return empty;
}

void require_same_dim(const LatticeVector& a, const LatticeVector& b) {
  if (a.size() != b.size()) throw DimensionError("lattice vectors differ in dimension");
}

Integer floor_of(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

}  // namespace

// ---------------------------------------------------------------- LatticeVector

LatticeVector::LatticeVector() : coords_(empty_coords()) {}

LatticeVector::LatticeVector(std::vector<Integer> coords)
    : coords_(std::make_shared<const std::vector<Integer>>(std::move(coords))) {}

LatticeVector::LatticeVector(std::initializer_list<long> coords) {
  std::vector<Integer> v;
  v.reserve(coords.size());
  for (long c : coords) v.emplace_back(c);
  coords_ = std::make_shared<const std::vector<Integer>>(std::move(v));
}

LatticeVector LatticeVector::zero(std::size_t d) { return LatticeVector(std::vector<Integer>(d)); }

bool LatticeVector::is_zero() const {
  return std::all_of(coords_->begin(), coords_->end(), [](const Integer& c) { return sgn(c) == 0; });
}

Integer LatticeVector::content() const {
  Integer g = 0;
  for (const auto& c : *coords_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

LatticeVector LatticeVector::divided_exactly(const Integer& k) const {
  std::vector<Integer> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (!mpz_divisible_p((*coords_)[i].get_mpz_t(), k.get_mpz_t()))
      throw DivisibilityError("vector is not divisible by the given scalar");
    mpz_divexact(out[i].get_mpz_t(), (*coords_)[i].get_mpz_t(), k.get_mpz_t());
  }
  return LatticeVector(std::move(out));
}

LatticeVector operator+(const LatticeVector& a, const LatticeVector& b) {
  require_same_dim(a, b);
  std::vector<Integer> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return LatticeVector(std::move(out));
}

LatticeVector operator-(const LatticeVector& a, const LatticeVector& b) {
  require_same_dim(a, b);
  std::vector<Integer> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return LatticeVector(std::move(out));
}

LatticeVector operator*(const Integer& k, const LatticeVector& v) {
  std::vector<Integer> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = k * v[i];
  return LatticeVector(std::move(out));
}

bool operator==(const LatticeVector& a, const LatticeVector& b) {
  return a.coords_ == b.coords_ || *a.coords_ == *b.coords_;
}

bool operator<(const LatticeVector& a, const LatticeVector& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int c = cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

std::size_t LatticeVector::hash() const {
  std::size_t h = coords_->size();
  for (const auto& c : *coords_) {
    const std::size_t x = std::hash<long>{}(mpz_get_si(c.get_mpz_t())) ^ static_cast<std::size_t>(sgn(c) + 1);
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

// --------------------------------------------------------------- SimplicialCone

SimplicialCone::SimplicialCone(std::vector<LatticeVector> generators, std::vector<int> generator_labels,
                               LabelChain labels, Integer multiplicity, ConeId id)
    : generators_(std::move(generators)),
      generator_labels_(std::move(generator_labels)),
      labels_(std::move(labels)),
      multiplicity_(std::move(multiplicity)),
      id_(id) {}

SimplicialCone SimplicialCone::with_id(ConeId id) const {
  SimplicialCone copy = *this;
  copy.id_ = id;
  return copy;
}

int SimplicialCone::max_label() const {
  if (!labels_) throw InternalError("cone without label history");
  return labels_->index;
}

LatticeVector SimplicialCone::xi(int index) const {
  for (const LabelNode* node = labels_.get(); node != nullptr; node = node->prev.get()) {
    if (node->index == index) return node->vector;
    if (node->index < index) break;
  }
  return LatticeVector::zero(dimension());
}

std::vector<std::pair<int, LatticeVector>> SimplicialCone::labels() const {
  std::vector<std::pair<int, LatticeVector>> out;
  for (const LabelNode* node = labels_.get(); node != nullptr; node = node->prev.get())
    out.emplace_back(node->index, node->vector);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> SimplicialCone::label_order() const {
  std::vector<std::size_t> order(dimension());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return generator_labels_[a] > generator_labels_[b]; });
  return order;
}

IntMatrix SimplicialCone::generator_matrix() const {
  std::vector<std::vector<Integer>> cols;
  cols.reserve(dimension());
  for (const auto& g : generators_) cols.push_back(g.values());
  return IntMatrix::from_columns(cols);
}

Triangulation Triangulation::single(const SimplicialCone& cone) {
  const SimplicialCone c = cone.with_id(0);
  return Triangulation{c, {c}, {c}};
}

// ------------------------------------------------------------------- operations

namespace {

SimplicialCone assemble_base(std::vector<LatticeVector> generators, Integer multiplicity) {
  const int d = static_cast<int>(generators.size());
  LabelChain chain;
  // Built from -d upward so that the head carries the largest index, -1.
  for (int i = d; i >= 1; --i) chain = std::make_shared<const LabelNode>(LabelNode{-i, generators[i - 1], chain});
  std::vector<int> labels(d);
  for (int i = 0; i < d; ++i) labels[i] = -(i + 1);
  return SimplicialCone(std::move(generators), std::move(labels), std::move(chain), std::move(multiplicity), 0);
}

}  // namespace

SimplicialCone make_cone(std::vector<LatticeVector> generators) {
  const std::size_t d = generators.size();
  if (d < 2) throw DimensionError("a cone needs d >= 2 generators");
  for (const auto& g : generators) {
    if (g.size() != d) throw DimensionError("generator dimension differs from generator count");
  }
  for (const auto& g : generators) {
    if (!g.primitive()) throw PrimitivityError("generator is not primitive");
  }
  std::vector<std::vector<Integer>> cols;
  for (const auto& g : generators) cols.push_back(g.values());
  Integer det = determinant(IntMatrix::from_columns(cols));
  if (sgn(det) == 0) throw SingularMatrixError("generators are linearly dependent");
  return assemble_base(std::move(generators), abs(det));
}

SimplicialCone with_fresh_labels(const SimplicialCone& cone) {
  return assemble_base(cone.generators(), cone.multiplicity());
}

RationalVector barycentric(const SimplicialCone& cone, const LatticeVector& x) {
  if (x.size() != cone.dimension()) throw DimensionError("point dimension differs from cone dimension");
  return solve_rational(cone.generator_matrix(), x.coords());
}

bool contains(const SimplicialCone& cone, const LatticeVector& x) {
  const auto lambda = barycentric(cone, x);
  return std::all_of(lambda.begin(), lambda.end(), [](const Rational& q) { return sgn(q) >= 0; });
}

DilationFactor dilation(const SimplicialCone& base, const LatticeVector& x) {
  const auto lambda = barycentric(base, x);
  Rational sum = 0;
  for (const auto& q : lambda) {
    if (sgn(q) < 0) throw ContainmentError("point lies outside the base cone");
    sum += q;
  }
  return DilationFactor{sum};
}

bool in_generator_lattice(const SimplicialCone& cone, const LatticeVector& x) {
  const auto lambda = barycentric(cone, x);
  return std::all_of(lambda.begin(), lambda.end(), [](const Rational& q) { return q.get_den() == 1; });
}

LatticeVector par_normalize(const SimplicialCone& cone, const LatticeVector& x) {
  const auto lambda = barycentric(cone, x);
  std::vector<Integer> out = x.values();
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const Integer f = floor_of(lambda[i]);
    if (sgn(f) == 0) continue;
    const auto& g = cone.generator(i);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] -= f * g[k];
  }
  return LatticeVector(std::move(out));
}

LatticeVector order_p_element(const SimplicialCone& cone, const Integer& p) {
  if (p < 2 || !mpz_divisible_p(cone.multiplicity().get_mpz_t(), p.get_mpz_t()))
    throw DivisibilityError("p does not divide the multiplicity");
  const SmithForm snf = smith_normal_form(cone.generator_matrix());
  const std::size_t d = cone.dimension();
  std::size_t slot = d;
  for (std::size_t i = 0; i < d; ++i) {
    if (mpz_divisible_p(snf.diag[i].get_mpz_t(), p.get_mpz_t())) {
      slot = i;
      break;
    }
  }
  if (slot == d) throw InternalError("no invariant factor divisible by p");

  std::vector<Integer> y(d);
  y[slot] = snf.diag[slot] / p;
  // x0 = left^{-1} y; left is unimodular so the solution is integral.
  const RationalVector x0 = solve_rational(snf.left, y);
  std::vector<Integer> coords(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (x0[i].get_den() != 1) throw InternalError("non-integral preimage under a unimodular transform");
    coords[i] = x0[i].get_num();
  }
  return par_normalize(cone, LatticeVector(std::move(coords)));
}

std::vector<SimplicialCone> stellar_subdivide(const SimplicialCone& cone, const LatticeVector& x) {
  return stellar_subdivide(cone, x, barycentric(cone, x));
}

std::vector<SimplicialCone> stellar_subdivide(const SimplicialCone& cone, const LatticeVector& x,
                                              const RationalVector& coords) {
  const std::size_t d = cone.dimension();
  if (coords.size() != d || x.size() != d) throw DimensionError("subdivision vector dimension mismatch");
  if (x.is_zero()) throw DegenerateVectorError("cannot subdivide by the zero vector");
  std::size_t positive = 0;
  for (const auto& q : coords) {
    if (sgn(q) < 0) throw ContainmentError("subdivision vector lies outside the cone");
    if (sgn(q) > 0) ++positive;
  }
  if (positive == 1) {
    for (std::size_t i = 0; i < d; ++i)
      if (coords[i] == 1 && x == cone.generator(i)) return {cone};
  }

  const int label = cone.max_label() + 1;
  const LabelChain chain = std::make_shared<const LabelNode>(LabelNode{label, x, cone.label_chain()});
  std::vector<SimplicialCone> children;
  children.reserve(positive);
  for (std::size_t i = 0; i < d; ++i) {
    if (sgn(coords[i]) == 0) continue;
    const Rational mu = coords[i] * cone.multiplicity();
    if (mu.get_den() != 1) throw InternalError("child multiplicity is not integral");
    auto gens = cone.generators();
    gens[i] = x;
    auto labels = cone.generator_labels();
    labels[i] = label;
    children.emplace_back(std::move(gens), std::move(labels), chain, mu.get_num(), 0);
  }
  return children;
}

std::optional<HalfSum> half_sum(const SimplicialCone& cone) {
  if (mpz_odd_p(cone.multiplicity().get_mpz_t())) return std::nullopt;
  const std::size_t d = cone.dimension();
  std::vector<std::uint8_t> subset(d, 0);
  if (d <= 64) {
    std::vector<std::uint64_t> columns(d, 0);
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t r = 0; r < d; ++r)
        if (mpz_odd_p(cone.generator(c)[r].get_mpz_t())) columns[c] |= std::uint64_t{1} << r;
    const auto mask = min_weight_kernel_vector_mod2(columns);
    if (!mask) throw InternalError("even multiplicity but trivial mod-2 kernel");
    for (std::size_t i = 0; i < d; ++i) subset[i] = (*mask >> i) & 1;
  } else {
    const auto kernel = nullspace_mod2(cone.generator_matrix());
    if (kernel.empty()) throw InternalError("even multiplicity but trivial mod-2 kernel");
    subset = kernel.front();
  }
  std::vector<Integer> sum(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!subset[i]) continue;
    const auto& g = cone.generator(i);
    for (std::size_t k = 0; k < d; ++k) sum[k] += g[k];
  }
  return HalfSum{LatticeVector(std::move(sum)).divided_exactly(2), std::move(subset)};
}

std::optional<LatticeVector> half_vector(const SimplicialCone& cone) {
  auto hs = half_sum(cone);
  if (!hs) return std::nullopt;
  return hs->u;
}

// ------------------------------------------------------------ BarycentricFrame

BarycentricFrame::BarycentricFrame(const SimplicialCone& cone)
    : scaled_inverse_(cone.dimension(), cone.dimension()) {
  const IntMatrix g = cone.generator_matrix();
  det_ = determinant(g);
  if (sgn(det_) == 0) throw SingularMatrixError("degenerate cone");
  const std::size_t d = cone.dimension();
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Integer> e(d);
    e[j] = 1;
    const RationalVector col = solve_rational(g, e);
    for (std::size_t i = 0; i < d; ++i) {
      const Rational scaled = col[i] * det_;
      scaled_inverse_(i, j) = scaled.get_num();  // adjugate entries are integral
    }
  }
  if (d > 64) return;
  const Integer limit = Integer(1) << 56;
  small_inverse_.resize(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Integer v = scaled_inverse_(i, j);
      if (sgn(det_) < 0) v = -v;
      if (abs(v) >= limit) {
        small_inverse_.clear();
        return;
      }
      small_inverse_[i * d + j] = v.get_si();
    }
}

std::vector<Integer> BarycentricFrame::scaled_coordinates(const LatticeVector& x) const {
  auto num = scaled_inverse_ * x.coords();
  if (sgn(det_) < 0)
    for (auto& v : num) v = -v;
  return num;
}

bool BarycentricFrame::scaled_coordinates(std::span<const std::int64_t> x, std::span<std::int64_t> out) const {
  const std::size_t d = scaled_inverse_.rows();
  if (small_inverse_.empty() || x.size() != d || out.size() != d) return false;
  for (std::size_t i = 0; i < d; ++i) {
    __int128 acc = 0;
    for (std::size_t j = 0; j < d; ++j) acc += static_cast<__int128>(small_inverse_[i * d + j]) * x[j];
    if (acc > std::numeric_limits<std::int64_t>::max() || acc < std::numeric_limits<std::int64_t>::min()) return false;
    out[i] = static_cast<std::int64_t>(acc);
  }
  return true;
}

RationalVector BarycentricFrame::coordinates(const LatticeVector& x) const {
  const auto num = scaled_inverse_ * x.coords();
  RationalVector out(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    out[i] = Rational(num[i], det_);
    out[i].canonicalize();
  }
  return out;
}

Rational BarycentricFrame::dilation(const LatticeVector& x) const {
  const auto num = scaled_inverse_ * x.coords();
  Integer sum = 0;
  for (const auto& v : num) sum += v;
  Rational out(sum, det_);
  out.canonicalize();
  return out;
}

bool BarycentricFrame::contains(const LatticeVector& x) const {
  const auto num = scaled_inverse_ * x.coords();
  const int s = sgn(det_);
  return std::all_of(num.begin(), num.end(), [s](const Integer& v) { return sgn(v) * s >= 0; });
}

}  // namespace conetri
