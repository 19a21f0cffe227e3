#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace conetri {

/// Constant of the Rosser-Schoenfeld prime counting bound.
inline constexpr double kRosserTau = 1.25506;

struct PrimePower {
  mpz_class prime;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime decomposition of a positive integer, primes strictly increasing.
struct Factorization {
  mpz_class n;
  std::vector<PrimePower> factors;
};

Factorization factorize(const mpz_class& n);

/// Number of prime factors counted with multiplicity.
unsigned eta(const Factorization& f);

/// Potential 2 * (log2 n - eta(n)).
double phi(const Factorization& f);
double phi(const mpz_class& n);

/// Largest prime divisor; throws DomainError for n = 1.
mpz_class p_max(const Factorization& f);

bool is_power_of_two(const mpz_class& n);
bool is_prime(const mpz_class& n);
bool is_prime(std::uint64_t n);

/// log2 for arbitrary-precision positive integers.
double log2_of(const mpz_class& n);

/// Sieve of Eratosthenes over [0, limit] with prefix counts.
class PrimeSieve {
 public:
  explicit PrimeSieve(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  bool is_prime(std::uint64_t n) const { return n <= limit_ && composite_flags_[n] == 0; }
  /// Number of primes p with p < x; requires x <= limit + 1.
  std::uint64_t count_below(std::uint64_t x) const;
  const std::vector<std::uint32_t>& primes() const { return primes_; }

 private:
  std::uint64_t limit_;
  std::vector<std::uint8_t> composite_flags_;
  std::vector<std::uint32_t> primes_;
};

/// Number of primes strictly below x.
std::uint64_t prime_pi(double x);

/// 1.25506 * x / ln(x), for x > 1.
double rosser_bound(double x);

struct OddAdjustment {
  unsigned s = 0;
  mpz_class t;
  mpz_class k;
};

/// For odd m, p with p/2 < m < p: s <= log2 p, t < p/2, k = 2^(s-1) - 1 and
/// 2^s * t = k * p + m.
OddAdjustment odd_adjust(const mpz_class& m, const mpz_class& p);

}  // namespace conetri
