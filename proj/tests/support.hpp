#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "conetri/cone_geometry.hpp"
#include "conetri/exact_linalg.hpp"

namespace testing {

using namespace conetri;

inline IntMatrix random_matrix(std::size_t n, long bound, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> entry(-bound, bound);
  IntMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = entry(rng);
  return m;
}

inline LatticeVector vec(std::initializer_list<long> xs) { return LatticeVector(xs); }

inline SimplicialCone cone2(long a, long b, long c, long e) { return make_cone({vec({a, b}), vec({c, e})}); }

/// Primitive random cone with nonzero determinant.
inline SimplicialCone random_primitive_cone(std::size_t d, long bound, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> entry(-bound, bound);
  for (;;) {
    std::vector<LatticeVector> gens;
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<Integer> v(d);
      for (auto& x : v) x = entry(rng);
      LatticeVector g(std::move(v));
      if (g.is_zero()) break;
      gens.push_back(g.divided_exactly(g.content()));
    }
    if (gens.size() != d) continue;
    std::vector<std::vector<Integer>> cols;
    for (const auto& g : gens) cols.push_back(g.values());
    if (sgn(determinant(IntMatrix::from_columns(cols))) == 0) continue;
    return make_cone(std::move(gens));
  }
}

}  // namespace testing
