#include <doctest.h>

#include <random>
#include <set>

#include "conetri/cone_geometry.hpp"
#include "conetri/errors.hpp"
#include "conetri/flat_fan.hpp"
#include "support.hpp"

using namespace conetri;
using testing::cone2;
using testing::vec;

namespace {

Rational q(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

LatticeVector random_vector(std::size_t d, long bound, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> entry(-bound, bound);
  std::vector<Integer> v(d);
  for (auto& x : v) x = entry(rng);
  return LatticeVector(std::move(v));
}

// Nonnegative integer combination of the generators, not all coefficients zero.
LatticeVector random_point_inside(const SimplicialCone& cone, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> coef(0, 3);
  for (;;) {
    LatticeVector x = LatticeVector::zero(cone.dimension());
    for (const auto& g : cone.generators()) x = x + Integer(coef(rng)) * g;
    if (!x.is_zero()) return x;
  }
}

Integer sum_child_multiplicities(const std::vector<SimplicialCone>& children) {
  Integer total = 0;
  for (const auto& c : children) total += c.multiplicity();
  return total;
}

}  // namespace

TEST_CASE("make_cone examples") {
  CHECK(make_cone({vec({1, 0}), vec({0, 1})}).multiplicity() == 1);
  CHECK(make_cone({vec({1, 0}), vec({1, 2})}).multiplicity() == 2);
  CHECK_THROWS_AS(make_cone({vec({1, 0}), vec({2, 4})}), PrimitivityError);
  CHECK_THROWS_AS(make_cone({vec({1, 0}), vec({-1, 0})}), SingularMatrixError);
  CHECK_THROWS_AS(make_cone({vec({1, 0, 0}), vec({0, 1, 0})}), DimensionError);
}

TEST_CASE("base cones carry labels -1..-d") {
  const SimplicialCone c = cone2(1, 0, 1, 3);
  CHECK(c.xi(-1) == vec({1, 0}));
  CHECK(c.xi(-2) == vec({1, 3}));
  CHECK(c.xi(0).is_zero());
  CHECK(c.max_label() == -1);
}

TEST_CASE("barycentric and contains examples") {
  CHECK(barycentric(cone2(1, 0, 1, 2), vec({1, 1})) == RationalVector{q(1, 2), q(1, 2)});
  CHECK(barycentric(cone2(1, 0, 1, 3), vec({1, 1})) == RationalVector{q(2, 3), q(1, 3)});
  CHECK(barycentric(cone2(2, 1, 1, 3), vec({2, 1})) == RationalVector{1, 0});

  const SimplicialCone unit = cone2(1, 0, 0, 1);
  CHECK(contains(unit, vec({2, 3})));
  CHECK_FALSE(contains(unit, vec({-1, 0})));
  CHECK(contains(cone2(1, 0, 1, 2), vec({1, 1})));
}

TEST_CASE("dilation examples") {
  CHECK(dilation(cone2(1, 0, 0, 1), vec({1, 1})).value == 2);
  CHECK(dilation(cone2(1, 0, 1, 3), vec({1, 2})).value == 1);
  CHECK(dilation(cone2(1, 0, 1, 3), vec({0, 0})).value == 0);
  CHECK_THROWS_AS(dilation(cone2(1, 0, 0, 1), vec({-1, 0})), ContainmentError);
}

TEST_CASE("par_normalize examples") {
  const SimplicialCone c = cone2(1, 0, 1, 3);
  CHECK(par_normalize(c, vec({1, 0})).is_zero());
  CHECK(par_normalize(c, vec({1, 3})).is_zero());
  CHECK(par_normalize(c, vec({1, 1})) == vec({1, 1}));
  CHECK(par_normalize(c, vec({2, 1})) == vec({1, 1}));
}

TEST_CASE("order_p_element examples") {
  CHECK(order_p_element(cone2(1, 0, 1, 2), 2) == vec({1, 1}));

  const SimplicialCone c3 = cone2(1, 0, 1, 3);
  const LatticeVector x = order_p_element(c3, 3);
  const RationalVector lambda = barycentric(c3, x);
  std::vector<Rational> z;
  for (const auto& l : lambda) z.push_back(l * 3);
  CHECK((z == std::vector<Rational>{1, 2} || z == std::vector<Rational>{2, 1}));

  CHECK_THROWS_AS(order_p_element(cone2(1, 0, 0, 1), 2), DivisibilityError);
}

TEST_CASE("stellar_subdivide examples") {
  const SimplicialCone unit = cone2(1, 0, 0, 1);
  const auto halves = stellar_subdivide(unit, vec({1, 1}));
  REQUIRE(halves.size() == 2);
  CHECK(halves[0].generators() == std::vector<LatticeVector>{vec({1, 1}), vec({0, 1})});
  CHECK(halves[1].generators() == std::vector<LatticeVector>{vec({1, 0}), vec({1, 1})});
  CHECK(halves[0].multiplicity() == 1);
  CHECK(halves[1].multiplicity() == 1);
  CHECK(halves[0].xi(0) == vec({1, 1}));
  CHECK(halves[0].max_label() == 0);

  const auto thirds = stellar_subdivide(cone2(1, 0, 1, 3), vec({1, 1}));
  REQUIRE(thirds.size() == 2);
  CHECK(thirds[0].multiplicity() == 2);
  CHECK(thirds[1].multiplicity() == 1);

  const auto same = stellar_subdivide(unit, vec({0, 1}));
  REQUIRE(same.size() == 1);
  CHECK(same[0].generators() == unit.generators());

  CHECK_THROWS_AS(stellar_subdivide(unit, vec({-1, 1})), ContainmentError);
  CHECK_THROWS_AS(stellar_subdivide(unit, vec({0, 0})), DegenerateVectorError);
}

TEST_CASE("half_vector examples") {
  CHECK(half_vector(cone2(1, 0, 1, 2)) == vec({1, 1}));
  CHECK_FALSE(half_vector(cone2(1, 0, 0, 1)).has_value());
  CHECK(half_vector(cone2(1, 0, 1, 4)) == vec({1, 2}));
}

TEST_CASE("children multiplicities sum to mu times the dilation of x") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t d = 2 + trial % 4;
    const SimplicialCone cone = testing::random_primitive_cone(d, 6, rng);
    const LatticeVector x = random_point_inside(cone, rng);
    const auto children = stellar_subdivide(cone, x);
    const Rational expected = cone.multiplicity() * dilation(cone, x).value;
    CHECK(Rational(sum_child_multiplicities(children)) == expected);
    for (const auto& child : children) {
      CHECK(child.multiplicity() > 0);
      for (const auto& g : child.generators()) CHECK(contains(cone, g));
    }
  }
}

TEST_CASE("children of a subdivision at a par-box point carry mu * lambda_i") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const SimplicialCone cone = testing::random_primitive_cone(2 + trial % 3, 5, rng);
    const LatticeVector x = par_normalize(cone, random_vector(cone.dimension(), 20, rng));
    if (x.is_zero()) continue;
    const RationalVector lambda = barycentric(cone, x);
    const auto children = stellar_subdivide(cone, x);
    std::size_t k = 0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      if (sgn(lambda[i]) == 0) continue;
      REQUIRE(k < children.size());
      CHECK(Rational(children[k].multiplicity()) == lambda[i] * cone.multiplicity());
      ++k;
    }
    CHECK(k == children.size());
  }
}

TEST_CASE("par_normalize is idempotent and stays in the coset") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    const SimplicialCone cone = testing::random_primitive_cone(2 + trial % 4, 6, rng);
    const LatticeVector x = random_vector(cone.dimension(), 30, rng);
    const LatticeVector y = par_normalize(cone, x);
    CHECK(par_normalize(cone, y) == y);
    CHECK(in_generator_lattice(cone, x - y));
    for (const auto& l : barycentric(cone, y)) {
      CHECK(sgn(l) >= 0);
      CHECK(l < 1);
    }
  }
}

TEST_CASE("box points of a 2D cone match brute-force enumeration") {
  // The par-box of ((1,0),(1,n)) holds exactly the points (1,k), k < n, and 0.
  for (long n = 1; n <= 12; ++n) {
    const SimplicialCone cone = cone2(1, 0, 1, n);
    std::set<LatticeVector> box;
    for (long a = -15; a <= 15; ++a)
      for (long b = -15; b <= 15; ++b) box.insert(par_normalize(cone, vec({a, b})));
    std::set<LatticeVector> expected{vec({0, 0})};
    for (long k = 1; k < n; ++k) expected.insert(vec({1, k}));
    CHECK(box == expected);
  }
}

TEST_CASE("order_p_element has order p and box coefficients") {
  std::mt19937_64 rng(34);
  int tested = 0;
  for (int trial = 0; trial < 600 && tested < 200; ++trial) {
    const SimplicialCone cone = testing::random_primitive_cone(2 + trial % 4, 6, rng);
    const Integer& mu = cone.multiplicity();
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
      if (mu % p != 0) continue;
      ++tested;
      const LatticeVector x = order_p_element(cone, p);
      CHECK_FALSE(in_generator_lattice(cone, x));
      CHECK(in_generator_lattice(cone, Integer(p) * x));
      for (const auto& l : barycentric(cone, x)) {
        const Rational z = l * p;
        CHECK(z.get_den() == 1);
        CHECK(sgn(z) >= 0);
        CHECK(z < p);
      }
    }
  }
  CHECK(tested >= 100);
}

TEST_CASE("dilation is homogeneous on lattice multiples") {
  std::mt19937_64 rng(35);
  std::uniform_int_distribution<long> scale(1, 9);
  for (int trial = 0; trial < 400; ++trial) {
    const SimplicialCone cone = testing::random_primitive_cone(2 + trial % 4, 6, rng);
    const LatticeVector x = random_point_inside(cone, rng);
    const long k = scale(rng);
    CHECK(dilation(cone, Integer(k) * x).value == k * dilation(cone, x).value);
  }
}

TEST_CASE("half_vector exists exactly for even multiplicity") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 1000; ++trial) {
    const SimplicialCone cone = testing::random_primitive_cone(2 + trial % 2, 8, rng);
    const auto h = half_sum(cone);
    const bool even = cone.multiplicity() % 2 == 0;
    REQUIRE(h.has_value() == even);
    if (!even) continue;
    LatticeVector twice = LatticeVector::zero(cone.dimension());
    for (std::size_t j = 0; j < cone.dimension(); ++j)
      if (h->subset[j]) twice = twice + cone.generator(j);
    CHECK(Integer(2) * h->u == twice);
    for (const auto& l : barycentric(cone, h->u)) CHECK((sgn(l) == 0 || l == q(1, 2)));
  }
}

TEST_CASE("barycentric frame agrees with barycentric") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const SimplicialCone cone = testing::random_primitive_cone(2 + trial % 4, 7, rng);
    const BarycentricFrame frame(cone);
    CHECK(frame.multiplicity() == cone.multiplicity());
    const LatticeVector x = random_vector(cone.dimension(), 20, rng);
    const RationalVector lambda = barycentric(cone, x);
    CHECK(frame.coordinates(x) == lambda);
    const auto scaled = frame.scaled_coordinates(x);
    for (std::size_t i = 0; i < lambda.size(); ++i) CHECK(Rational(scaled[i]) == lambda[i] * cone.multiplicity());
    CHECK(frame.contains(x) == contains(cone, x));
  }
}

TEST_CASE("flat fan interns rays and computes determinants") {
  const std::vector<SimplicialCone> cones{cone2(1, 0, 1, 1), cone2(1, 1, 1, 3), cone2(1, 3, 0, 1)};
  FlatFan fan = FlatFan::from_cones(cones);
  CHECK(fan.size() == 3);
  CHECK(fan.ray_count() == 4);
  CHECK(fan.cone(1)[0] == fan.cone(0)[1]);
  CHECK(fan.ray_parity(fan.cone(0)[1]) == 0b11);
  CHECK(fan.determinant(0) == 1);
  CHECK(fan.determinant(1) == 2);
  CHECK(fan.determinant(2) == 1);
  CHECK(fan.materialize(1).generators() == cones[1].generators());
  CHECK(fan.materialize(1).id() == 1);

  const std::vector<std::uint8_t> keep{1, 0, 1};
  fan.retain(keep);
  REQUIRE(fan.size() == 2);
  CHECK(fan.materialize(1).generators() == cones[2].generators());
}

TEST_CASE("flat fan determinant falls back to exact arithmetic") {
  const Integer big("100000000000000000000");
  FlatFan fan(2);
  const std::array<RayId, 2> rays{fan.intern(LatticeVector(std::vector<Integer>{big, 1})),
                                  fan.intern(LatticeVector(std::vector<Integer>{1, 0}))};
  fan.add_cone(rays);
  CHECK(fan.determinant(0) == -1);

  std::mt19937_64 rng(38);
  for (int trial = 0; trial < 100; ++trial) {
    const SimplicialCone cone = testing::random_primitive_cone(2 + trial % 5, 9, rng);
    const std::vector<SimplicialCone> one{cone};
    CHECK(abs(FlatFan::from_cones(one).determinant(0)) == cone.multiplicity());
  }
}
