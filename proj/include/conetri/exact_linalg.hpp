#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace conetri {

using Integer = mpz_class;
using Rational = mpq_class;

/// Dense row-major matrix of arbitrary-precision integers.
class IntMatrix {
 public:
  IntMatrix(std::size_t rows, std::size_t cols);
  /// Builds a matrix from its rows; all rows must have equal nonzero length.
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  /// Matrix whose j-th column is `columns[j]`.
  static IntMatrix from_columns(std::span<const std::vector<Integer>> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Integer& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::vector<Integer> column(std::size_t c) const;
  IntMatrix transposed() const;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend std::vector<Integer> operator*(const IntMatrix& a, std::span<const Integer> x);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Integer> entries_;
};

/// Exact rational vector; gmp keeps every entry canonical (lowest terms,
/// positive denominator).
using RationalVector = std::vector<Rational>;

/// Fraction-free (Bareiss) determinant.
Integer determinant(const IntMatrix& m);

/// Determinant of an n x n row-major matrix in 64-bit arithmetic. Empty when
/// Hadamard's bound does not guarantee every Bareiss minor fits.
std::optional<std::int64_t> small_determinant(std::span<const std::int64_t> entries, std::size_t n);

/// Exact solution of m * x = b.
RationalVector solve_rational(const IntMatrix& m, std::span<const Integer> b);

/// Basis of the kernel of (m mod 2) over GF(2), in the order produced by
/// reduced row-echelon elimination (one vector per free column, ascending).
std::vector<std::vector<std::uint8_t>> nullspace_mod2(const IntMatrix& m);

/// Kernel basis of nullspace_mod2 for an n x n matrix given by column parity
/// masks (bit r of columns[c] is entry (r, c) mod 2), as column masks.
/// Needs n <= 64.
std::vector<std::uint64_t> kernel_basis_mod2(std::span<const std::uint64_t> columns);

/// Nonzero kernel vector of least weight, ties broken by the smallest mask.
/// Empty when the matrix is invertible mod 2.
std::optional<std::uint64_t> min_weight_kernel_vector_mod2(std::span<const std::uint64_t> columns);

struct SmithForm {
  std::vector<Integer> diag;
  IntMatrix left;
  IntMatrix right;
};

/// Smith normal form with unimodular transforms: left * m * right = diag(diag),
/// every diag entry positive and dividing the next.
SmithForm smith_normal_form(const IntMatrix& m);

}  // namespace conetri
