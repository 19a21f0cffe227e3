#include "conetri/number_theory.hpp"

#include <cmath>
#include <limits>

#include "conetri/errors.hpp"

namespace conetri {
namespace {

constexpr std::uint64_t kSmallSieveLimit = 1u << 20;

const PrimeSieve& small_sieve() {
  static const PrimeSieve sieve(kSmallSieveLimit);
  return sieve;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool fits_u64(const mpz_class& n) {
  return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

std::uint64_t to_u64(const mpz_class& n) {
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, n.get_mpz_t());
  return out;
}

mpz_class from_u64(std::uint64_t v) {
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return out;
}

void push_factor(std::vector<PrimePower>& out, const mpz_class& p, unsigned e) {
  if (e > 0) out.push_back({p, e});
}

// Trial division for word-sized n; the cofactor test short-circuits large
// prime remainders.
std::vector<PrimePower> factor_u64(std::uint64_t n) {
  std::vector<PrimePower> out;
  if (is_prime(n)) {
    push_factor(out, from_u64(n), 1);
    return out;
  }
  for (std::uint32_t p : small_sieve().primes()) {
    const std::uint64_t pp = p;
    if (pp * pp > n) break;
    unsigned e = 0;
    while (n % pp == 0) {
      n /= pp;
      ++e;
    }
    push_factor(out, from_u64(pp), e);
    if (e > 0 && is_prime(n)) break;
  }
  std::uint64_t d = kSmallSieveLimit + 1;
  while (n > 1 && !is_prime(n) && d <= n / d) {
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    push_factor(out, from_u64(d), e);
    d += 2;
  }
  if (n > 1) push_factor(out, from_u64(n), 1);
  return out;
}

std::vector<PrimePower> factor_big(mpz_class n) {
  std::vector<PrimePower> out;
  for (std::uint32_t p : small_sieve().primes()) {
    if (fits_u64(n)) break;
    unsigned e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++e;
    }
    push_factor(out, mpz_class(p), e);
  }
  if (fits_u64(n)) {
    auto rest = factor_u64(to_u64(n));
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
  mpz_class d = kSmallSieveLimit + 1;
  while (!is_prime(n) && d * d <= n) {
    unsigned e = 0;
    while (mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t())) {
      mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
      ++e;
    }
    push_factor(out, d, e);
    d += 2;
  }
  if (n > 1) push_factor(out, n, 1);
  return out;
}

}  // namespace

PrimeSieve::PrimeSieve(std::uint64_t limit) : limit_(limit), composite_flags_(limit + 1, 0) {
  composite_flags_[0] = 1;
  if (limit >= 1) composite_flags_[1] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite_flags_[i]) continue;
    primes_.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite_flags_[j] = 1;
  }
}

std::uint64_t PrimeSieve::count_below(std::uint64_t x) const {
  if (x > limit_ + 1) throw DomainError("count_below beyond sieve limit");
  // primes_ is sorted; count those < x.
  std::uint64_t lo = 0, hi = primes_.size();
  while (lo < hi) {
    const std::uint64_t mid = (lo + hi) / 2;
    if (primes_[mid] < x) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // Deterministic witness set for all 64-bit n.
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_prime(const mpz_class& n) {
  if (sgn(n) <= 0) return false;
  if (fits_u64(n)) return is_prime(to_u64(n));
  // Beyond 64 bits gmp's Baillie-PSW plus Miller-Rabin rounds.
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

Factorization factorize(const mpz_class& n) {
  if (sgn(n) <= 0) throw DomainError("factorize needs n >= 1");
  Factorization f{n, {}};
  if (n == 1) return f;
  f.factors = fits_u64(n) ? factor_u64(to_u64(n)) : factor_big(n);
  return f;
}

unsigned eta(const Factorization& f) {
  unsigned total = 0;
  for (const auto& pp : f.factors) total += pp.exponent;
  return total;
}

double log2_of(const mpz_class& n) {
  if (sgn(n) <= 0) throw DomainError("log2 of a non-positive integer");
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

double phi(const Factorization& f) {
  // Summed per prime so that powers of two give exactly 0.
  double total = 0.0;
  for (const auto& pp : f.factors) total += pp.exponent * (2.0 * log2_of(pp.prime) - 2.0);
  return total;
}

double phi(const mpz_class& n) { return phi(factorize(n)); }

mpz_class p_max(const Factorization& f) {
  if (f.factors.empty()) throw DomainError("1 has no prime divisor");
  return f.factors.back().prime;
}

bool is_power_of_two(const mpz_class& n) {
  return sgn(n) > 0 && mpz_popcount(n.get_mpz_t()) == 1;
}

std::uint64_t prime_pi(double x) {
  if (!(x > 0)) throw DomainError("prime_pi needs x > 0");
  if (x <= 2.0) return 0;
  const auto below = static_cast<std::uint64_t>(std::ceil(x)) - 1;  // largest integer < x
  if (below <= kSmallSieveLimit) return small_sieve().count_below(below + 1);
  return PrimeSieve(below).count_below(below + 1);
}

double rosser_bound(double x) {
  if (!(x > 1.0)) throw DomainError("rosser_bound needs x > 1");
  return kRosserTau * x / std::log(x);
}

OddAdjustment odd_adjust(const mpz_class& m, const mpz_class& p) {
  if (mpz_even_p(m.get_mpz_t()) || mpz_even_p(p.get_mpz_t()))
    throw DomainError("odd_adjust needs odd m and p");
  if (!(2 * m > p && m < p)) throw DomainError("odd_adjust needs p/2 < m < p");
  const mpz_class diff = p - m;
  const auto e = static_cast<unsigned>(mpz_scan1(diff.get_mpz_t(), 0));  // p - m = 2^e * q
  const mpz_class q = diff >> e;
  OddAdjustment out;
  out.s = e + 1;
  out.t = (p - q) / 2;
  out.k = (mpz_class(1) << e) - 1;
  return out;
}

}  // namespace conetri
