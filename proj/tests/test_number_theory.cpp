#include <doctest.h>

#include <cmath>
#include <random>

#include "conetri/errors.hpp"
#include "conetri/number_theory.hpp"

using namespace conetri;
using Integer = mpz_class;

namespace {

Integer pow2(unsigned k) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, k);
  return out;
}

}  // namespace

TEST_CASE("factorize examples") {
  CHECK(factorize(1).factors.empty());
  CHECK(factorize(12).factors == std::vector<PrimePower>{{2, 2}, {3, 1}});
  CHECK(factorize(1024).factors == std::vector<PrimePower>{{2, 10}});
  const Integer mersenne = pow2(61) - 1;
  CHECK(factorize(mersenne).factors == std::vector<PrimePower>{{mersenne, 1}});
  CHECK(factorize(3 * mersenne).factors == std::vector<PrimePower>{{3, 1}, {mersenne, 1}});
  CHECK_THROWS_AS(factorize(0), DomainError);
}

TEST_CASE("factorize multiplies back") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<long> draw(1, 2'000'000);
  for (int trial = 0; trial < 2000; ++trial) {
    const Integer n = draw(rng);
    const Factorization f = factorize(n);
    Integer product = 1;
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
      CHECK(is_prime(f.factors[i].prime));
      if (i > 0) CHECK(f.factors[i - 1].prime < f.factors[i].prime);
      for (unsigned e = 0; e < f.factors[i].exponent; ++e) product *= f.factors[i].prime;
    }
    CHECK(product == n);
  }
}

TEST_CASE("eta, phi and p_max examples") {
  CHECK(eta(factorize(12)) == 3);
  CHECK(eta(factorize(1)) == 0);
  CHECK(eta(factorize(8)) == 3);
  CHECK(phi(Integer(8)) == 0.0);
  CHECK(phi(Integer(1)) == 0.0);
  CHECK(phi(Integer(12)) == doctest::Approx(1.1699250014423122).epsilon(1e-12));
  CHECK(p_max(factorize(12)) == 3);
  CHECK(p_max(factorize(32)) == 2);
  CHECK(p_max(factorize(35)) == 7);
  CHECK_THROWS_AS(p_max(factorize(1)), DomainError);
}

TEST_CASE("phi is zero exactly on powers of two") {
  for (long n = 2; n <= 100'000; ++n) {
    const double v = phi(Integer(n));
    REQUIRE(v >= 0.0);
    REQUIRE((std::floor(v) == 0.0) == is_power_of_two(Integer(n)));
    REQUIRE(v <= 2.0 * std::log2(static_cast<double>(n)) - 2.0 + 1e-9);
  }
}

TEST_CASE("phi is additive") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<long> draw(1, 10'000);
  for (int trial = 0; trial < 3000; ++trial) {
    const Integer a = draw(rng), b = draw(rng);
    CHECK(std::abs(phi(Integer(a * b)) - phi(a) - phi(b)) < 1e-9);
  }
}

TEST_CASE("primality") {
  CHECK(is_prime(Integer(2)));
  CHECK_FALSE(is_prime(Integer(1)));
  CHECK_FALSE(is_prime(Integer(91)));
  CHECK_FALSE(is_prime(Integer(561)));
  CHECK(is_prime(pow2(61) - 1));
  CHECK(is_prime(pow2(89) - 1));
  CHECK_FALSE(is_prime(pow2(89) + 1));
  const PrimeSieve sieve(100'000);
  for (std::uint64_t n = 0; n <= 100'000; ++n) REQUIRE(is_prime(n) == sieve.is_prime(n));
}

TEST_CASE("power of two and log2") {
  CHECK(is_power_of_two(Integer(1)));
  CHECK(is_power_of_two(pow2(100)));
  CHECK_FALSE(is_power_of_two(Integer(12)));
  CHECK_FALSE(is_power_of_two(Integer(0)));
  CHECK(log2_of(pow2(100)) == 100.0);
  CHECK(log2_of(pow2(3000) * 3) == doctest::Approx(3000 + std::log2(3.0)));
}

TEST_CASE("prime counting examples") {
  CHECK(prime_pi(2) == 0);
  CHECK(prime_pi(10) == 4);
  CHECK(prime_pi(100) == 25);
  CHECK(rosser_bound(100) == doctest::Approx(27.25328162287476).epsilon(1e-12));
  CHECK(rosser_bound(10) == doctest::Approx(5.450656324574952).epsilon(1e-12));
  CHECK(rosser_bound(2) == doctest::Approx(3.6213376760362053).epsilon(1e-12));
  CHECK_THROWS_AS(rosser_bound(1), DomainError);
  const PrimeSieve sieve(1000);
  CHECK(sieve.count_below(100) == 25);
  CHECK(sieve.count_below(1001) == 168);
}

TEST_CASE("odd_adjust examples") {
  auto a = odd_adjust(5, 7);
  CHECK(a.s == 2);
  CHECK(a.t == 3);
  CHECK(a.k == 1);
  a = odd_adjust(7, 11);
  CHECK(a.s == 3);
  CHECK(a.t == 5);
  CHECK(a.k == 3);
  a = odd_adjust(3, 5);
  CHECK(a.s == 2);
  CHECK(a.t == 2);
  CHECK(a.k == 1);
  CHECK_THROWS_AS(odd_adjust(4, 7), DomainError);
  CHECK_THROWS_AS(odd_adjust(3, 7), DomainError);
}

TEST_CASE("odd_adjust postconditions for odd p below 300") {
  for (long p = 3; p <= 299; p += 2) {
    for (long m = p / 2 + 1; m < p; ++m) {
      if (m % 2 == 0) continue;
      const OddAdjustment a = odd_adjust(m, p);
      REQUIRE(a.s >= 1);
      REQUIRE(static_cast<double>(a.s) <= std::log2(static_cast<double>(p)));
      REQUIRE(2 * a.t < p);
      REQUIRE(a.k == pow2(a.s - 1) - 1);
      REQUIRE(pow2(a.s) * a.t == a.k * p + m);
    }
  }
}
