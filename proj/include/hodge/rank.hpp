#pragma once

#include <cstdint>
#include <vector>

namespace hodge {

struct IntTriplet {
  int row = 0;
  int col = 0;
  std::int64_t value = 0;
};

/// Exact rank over GF(p) by sparse Gaussian elimination with a
/// Markowitz-style pivot choice. For an integer matrix this is a lower bound
/// on the rational rank, with equality unless p divides an elementary
/// divisor.
std::int64_t rank_mod_prime(int rows, int cols,
                            const std::vector<IntTriplet>& entries,
                            std::uint64_t p);

/// Exact rational rank by dense fraction-free (Bareiss) elimination with
/// arbitrary-precision integers. Intended for small matrices; quadratic
/// memory in the dimensions.
std::int64_t rank_rational(int rows, int cols,
                           const std::vector<IntTriplet>& entries);

/// Rank of an integer matrix, exact. Small matrices take the rational route;
/// larger ones are eliminated over two distinct 61-bit primes, which must
/// agree.
std::int64_t integer_rank(int rows, int cols,
                          const std::vector<IntTriplet>& entries);

}  // namespace hodge
