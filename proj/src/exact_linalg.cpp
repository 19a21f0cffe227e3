#include "conetri/exact_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "conetri/errors.hpp"

namespace conetri {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix must have at least one row and column");
}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix must have at least one row and column");
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ragged matrix rows");
    for (long v : row) entries_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_columns(std::span<const std::vector<Integer>> columns) {
  if (columns.empty()) throw DimensionError("no columns");
  const std::size_t rows = columns.front().size();
  IntMatrix m(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) throw DimensionError("columns differ in length");
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
  }
  return m;
}

std::vector<Integer> IntMatrix::column(std::size_t c) const {
  std::vector<Integer> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
  IntMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      if (sgn(a(i, k)) == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

std::vector<Integer> operator*(const IntMatrix& a, std::span<const Integer> x) {
  if (a.cols_ != x.size()) throw DimensionError("matrix-vector shape mismatch");
  std::vector<Integer> out(a.rows_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) out[i] += a(i, k) * x[k];
  return out;
}

Integer determinant(const IntMatrix& m) {
  if (!m.square()) throw DimensionError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  IntMatrix a = m;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(a(k, k)) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && sgn(a(swap_row, k)) == 0) ++swap_row;
      if (swap_row == n) return 0;
      for (std::size_t c = k; c < n; ++c) std::swap(a(k, c), a(swap_row, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = a(k, k) * a(i, j) - a(i, k) * a(k, j);
        // Sylvester's identity guarantees exact division.
        mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a(k, k);
  }
  Integer det = a(n - 1, n - 1);
  if (sign < 0) det = -det;
  return det;
}

std::optional<std::int64_t> small_determinant(std::span<const std::int64_t> entries, std::size_t n) {
  if (n == 0 || entries.size() != n * n) throw DimensionError("small_determinant shape mismatch");
  double hadamard = 1;
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = static_cast<double>(entries[i * n + j]);
      norm2 += x * x;
    }
    if (norm2 == 0) return 0;
    hadamard *= std::sqrt(norm2);
  }
  if (!(hadamard < 0x1p60)) return std::nullopt;

  std::int64_t buf[64];
  std::vector<std::int64_t> heap;
  std::int64_t* a = buf;
  if (n * n > 64) {
    heap.resize(n * n);
    a = heap.data();
  }
  std::copy(entries.begin(), entries.end(), a);
  auto at = [&](std::size_t r, std::size_t c) -> std::int64_t& { return a[r * n + c]; };
  std::int64_t prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && at(swap_row, k) == 0) ++swap_row;
      if (swap_row == n) return 0;
      for (std::size_t c = k; c < n; ++c) std::swap(at(k, c), at(swap_row, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        std::int64_t p1, p2, v;
        if (!__builtin_mul_overflow(at(k, k), at(i, j), &p1) && !__builtin_mul_overflow(at(i, k), at(k, j), &p2) &&
            !__builtin_sub_overflow(p1, p2, &v)) {
          at(i, j) = v / prev;
        } else {
          const __int128 w = static_cast<__int128>(at(k, k)) * at(i, j) - static_cast<__int128>(at(i, k)) * at(k, j);
          at(i, j) = static_cast<std::int64_t>(w / prev);
        }
      }
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

RationalVector solve_rational(const IntMatrix& m, std::span<const Integer> b) {
  if (!m.square()) throw DimensionError("solve_rational needs a square matrix");
  const std::size_t n = m.rows();
  if (b.size() != n) throw DimensionError("right-hand side length mismatch");

  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
    a[i][n] = b[i];
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && sgn(a[pivot][k]) == 0) ++pivot;
    if (pivot == n) throw SingularMatrixError("matrix is singular");
    std::swap(a[k], a[pivot]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || sgn(a[i][k]) == 0) continue;
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j <= n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  RationalVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
  return x;
}

std::vector<std::vector<std::uint8_t>> nullspace_mod2(const IntMatrix& m) {
  if (!m.square()) throw DimensionError("nullspace_mod2 needs a square matrix");
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<std::vector<std::uint8_t>> a(rows, std::vector<std::uint8_t>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) a[r][c] = mpz_odd_p(m(r, c).get_mpz_t()) ? 1 : 0;

  // Reduced row-echelon form over GF(2).
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < rows; ++c) {
    std::size_t p = row;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[row], a[p]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r != row && a[r][c]) {
        for (std::size_t j = c; j < cols; ++j) a[r][j] ^= a[row][j];
      }
    }
    pivot_cols.push_back(c);
    ++row;
  }

  std::vector<std::vector<std::uint8_t>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (std::find(pivot_cols.begin(), pivot_cols.end(), free) != pivot_cols.end()) continue;
    std::vector<std::uint8_t> v(cols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) v[pivot_cols[r]] = a[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<std::uint64_t> kernel_basis_mod2(std::span<const std::uint64_t> columns) {
  const std::size_t n = columns.size();
  if (n == 0 || n > 64) throw DimensionError("kernel_basis_mod2 needs 1 <= n <= 64");
  std::uint64_t rows[64] = {};
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r)
      if ((columns[c] >> r) & 1) rows[r] |= std::uint64_t{1} << c;

  std::size_t pivot_cols[64];
  std::size_t rank = 0;
  std::uint64_t pivot_mask = 0;
  for (std::size_t c = 0; c < n && rank < n; ++c) {
    const std::uint64_t bit = std::uint64_t{1} << c;
    std::size_t p = rank;
    while (p < n && !(rows[p] & bit)) ++p;
    if (p == n) continue;
    std::swap(rows[rank], rows[p]);
    for (std::size_t r = 0; r < n; ++r)
      if (r != rank && (rows[r] & bit)) rows[r] ^= rows[rank];
    pivot_cols[rank++] = c;
    pivot_mask |= bit;
  }
  std::vector<std::uint64_t> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if ((pivot_mask >> free) & 1) continue;
    std::uint64_t v = std::uint64_t{1} << free;
    for (std::size_t r = 0; r < rank; ++r)
      if ((rows[r] >> free) & 1) v |= std::uint64_t{1} << pivot_cols[r];
    basis.push_back(v);
  }
  return basis;
}

std::optional<std::uint64_t> min_weight_kernel_vector_mod2(std::span<const std::uint64_t> columns) {
  const auto basis = kernel_basis_mod2(columns);
  if (basis.empty()) return std::nullopt;
  if (basis.size() > 20) throw DomainError("kernel too large to search exhaustively");
  // Gray-code walk over all nonzero combinations.
  std::uint64_t best = basis.front();
  std::uint64_t v = 0;
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << basis.size()); ++i) {
    v ^= basis[static_cast<std::size_t>(__builtin_ctzll(i))];
    const int w = __builtin_popcountll(v), bw = __builtin_popcountll(best);
    if (w < bw || (w == bw && v < best)) best = v;
  }
  return best;
}

namespace {

struct SmithWork {
  IntMatrix a;
  IntMatrix left;
  IntMatrix right;
  std::size_t n;

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(a(i, c), a(j, c));
      std::swap(left(i, c), left(j, c));
    }
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < n; ++r) {
      std::swap(a(r, i), a(r, j));
      std::swap(right(r, i), right(r, j));
    }
  }
  // row_i += f * row_j
  void add_row(std::size_t i, std::size_t j, const Integer& f) {
    for (std::size_t c = 0; c < n; ++c) {
      a(i, c) += f * a(j, c);
      left(i, c) += f * left(j, c);
    }
  }
  // col_i += f * col_j
  void add_col(std::size_t i, std::size_t j, const Integer& f) {
    for (std::size_t r = 0; r < n; ++r) {
      a(r, i) += f * a(r, j);
      right(r, i) += f * right(r, j);
    }
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
  if (!m.square()) throw DimensionError("smith_normal_form needs a square matrix");
  const std::size_t n = m.rows();
  SmithWork w{m, IntMatrix::identity(n), IntMatrix::identity(n), n};

  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      // Smallest nonzero |entry| in the trailing block, scanning row-major.
      std::size_t pr = n, pc = n;
      for (std::size_t r = t; r < n; ++r)
        for (std::size_t c = t; c < n; ++c) {
          if (sgn(w.a(r, c)) == 0) continue;
          if (pr == n || mpz_cmpabs(w.a(r, c).get_mpz_t(), w.a(pr, pc).get_mpz_t()) < 0) {
            pr = r;
            pc = c;
          }
        }
      if (pr == n) throw SingularMatrixError("smith_normal_form of a singular matrix");
      w.swap_rows(t, pr);
      w.swap_cols(t, pc);

      bool clear = true;
      for (std::size_t r = t + 1; r < n; ++r) {
        if (sgn(w.a(r, t)) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), w.a(r, t).get_mpz_t(), w.a(t, t).get_mpz_t());
        w.add_row(r, t, -q);
        if (sgn(w.a(r, t)) != 0) clear = false;
      }
      for (std::size_t c = t + 1; c < n; ++c) {
        if (sgn(w.a(t, c)) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), w.a(t, c).get_mpz_t(), w.a(t, t).get_mpz_t());
        w.add_col(c, t, -q);
        if (sgn(w.a(t, c)) != 0) clear = false;
      }
      if (!clear) continue;

      // Enforce the divisibility chain: fold an offending row into row t.
      std::size_t bad_row = n;
      for (std::size_t r = t + 1; r < n && bad_row == n; ++r)
        for (std::size_t c = t + 1; c < n; ++c)
          if (!mpz_divisible_p(w.a(r, c).get_mpz_t(), w.a(t, t).get_mpz_t())) {
            bad_row = r;
            break;
          }
      if (bad_row == n) break;
      w.add_row(t, bad_row, 1);
    }
    if (sgn(w.a(t, t)) < 0) {
      for (std::size_t c = 0; c < n; ++c) {
        w.a(t, c) = -w.a(t, c);
        w.left(t, c) = -w.left(t, c);
      }
    }
  }

  SmithForm out{{}, std::move(w.left), std::move(w.right)};
  out.diag.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.diag.push_back(w.a(i, i));
  return out;
}

}  // namespace conetri
