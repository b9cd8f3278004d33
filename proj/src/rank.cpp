#include "hodge/rank.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

namespace hodge {

namespace {

using Row = std::vector<std::pair<int, std::uint64_t>>;  // sorted by column

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t result = 1;
  base %= p;
  while (exp > 0) {
    if (exp & 1) result = mod_mul(result, base, p);
    base = mod_mul(base, base, p);
    exp >>= 1;
  }
  return result;
}

std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) {
  return mod_pow(a, p - 2, p);
}

// dst := dst - factor * src (mod p), merging sorted column lists.
Row axpy_rows(const Row& dst, const Row& src, std::uint64_t factor,
              std::uint64_t p) {
  Row out;
  out.reserve(dst.size() + src.size());
  std::size_t i = 0, j = 0;
  while (i < dst.size() || j < src.size()) {
    if (j == src.size() || (i < dst.size() && dst[i].first < src[j].first)) {
      out.push_back(dst[i++]);
    } else if (i == dst.size() || src[j].first < dst[i].first) {
      const std::uint64_t v = p - mod_mul(factor, src[j].second, p);
      if (v % p != 0) out.push_back({src[j].first, v % p});
      ++j;
    } else {
      const std::uint64_t sub = mod_mul(factor, src[j].second, p);
      const std::uint64_t v = (dst[i].second + p - sub) % p;
      if (v != 0) out.push_back({dst[i].first, v});
      ++i;
      ++j;
    }
  }
  return out;
}

bool row_contains(const Row& row, int col) {
  auto it = std::lower_bound(
      row.begin(), row.end(), col,
      [](const std::pair<int, std::uint64_t>& e, int c) { return e.first < c; });
  return it != row.end() && it->first == col;
}

std::uint64_t row_value(const Row& row, int col) {
  auto it = std::lower_bound(
      row.begin(), row.end(), col,
      [](const std::pair<int, std::uint64_t>& e, int c) { return e.first < c; });
  return it->second;
}

}  // namespace

std::int64_t rank_mod_prime(int rows, int cols,
                            const std::vector<IntTriplet>& entries,
                            std::uint64_t p) {
  std::vector<Row> row(static_cast<std::size_t>(rows));
  for (const IntTriplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("triplet index out of range");
    const std::int64_t m = static_cast<std::int64_t>(p);
    std::uint64_t v = static_cast<std::uint64_t>(((t.value % m) + m) % m);
    row[static_cast<std::size_t>(t.row)].push_back({t.col, v});
  }
  std::vector<int> col_count(static_cast<std::size_t>(cols), 0);
  std::vector<std::vector<int>> col_rows(static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    Row& rw = row[static_cast<std::size_t>(r)];
    std::sort(rw.begin(), rw.end());
    Row merged;
    for (const auto& e : rw) {
      if (!merged.empty() && merged.back().first == e.first)
        merged.back().second = (merged.back().second + e.second) % p;
      else
        merged.push_back(e);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const auto& e) { return e.second == 0; }),
                 merged.end());
    rw = std::move(merged);
    for (const auto& e : rw) {
      ++col_count[static_cast<std::size_t>(e.first)];
      col_rows[static_cast<std::size_t>(e.first)].push_back(r);
    }
  }

  std::vector<char> active(static_cast<std::size_t>(rows), 1);
  std::int64_t rank = 0;
  for (;;) {
    // Shortest active row; ties broken by index for determinism.
    int pivot_row = -1;
    std::size_t best_len = std::numeric_limits<std::size_t>::max();
    for (int r = 0; r < rows; ++r) {
      if (!active[static_cast<std::size_t>(r)]) continue;
      const std::size_t len = row[static_cast<std::size_t>(r)].size();
      if (len > 0 && len < best_len) {
        best_len = len;
        pivot_row = r;
      }
    }
    if (pivot_row < 0) break;

    const Row& prow = row[static_cast<std::size_t>(pivot_row)];
    int pivot_col = prow.front().first;
    int best_count = col_count[static_cast<std::size_t>(pivot_col)];
    for (const auto& e : prow) {
      const int c = col_count[static_cast<std::size_t>(e.first)];
      if (c < best_count) {
        best_count = c;
        pivot_col = e.first;
      }
    }

    const std::uint64_t inv =
        mod_inv(row_value(prow, pivot_col), p);
    std::vector<int> victims =
        col_rows[static_cast<std::size_t>(pivot_col)];
    for (int r2 : victims) {
      if (r2 == pivot_row || !active[static_cast<std::size_t>(r2)]) continue;
      Row& target = row[static_cast<std::size_t>(r2)];
      if (!row_contains(target, pivot_col)) continue;  // stale index entry
      const std::uint64_t factor = mod_mul(row_value(target, pivot_col), inv, p);
      Row updated = axpy_rows(target, prow, factor, p);
      for (const auto& e : target)
        --col_count[static_cast<std::size_t>(e.first)];
      for (const auto& e : updated) {
        ++col_count[static_cast<std::size_t>(e.first)];
        col_rows[static_cast<std::size_t>(e.first)].push_back(r2);
      }
      target = std::move(updated);
    }
    for (const auto& e : prow) --col_count[static_cast<std::size_t>(e.first)];
    active[static_cast<std::size_t>(pivot_row)] = 0;
    ++rank;
  }
  return rank;
}

std::int64_t rank_rational(int rows, int cols,
                           const std::vector<IntTriplet>& entries) {
  using Int = boost::multiprecision::cpp_int;
  std::vector<std::vector<Int>> a(
      static_cast<std::size_t>(rows),
      std::vector<Int>(static_cast<std::size_t>(cols), 0));
  for (const IntTriplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("triplet index out of range");
    a[static_cast<std::size_t>(t.row)][static_cast<std::size_t>(t.col)] +=
        t.value;
  }
  const int nmin = std::min(rows, cols);
  Int prev = 1;
  int k = 0;
  for (; k < nmin; ++k) {
    int pr = -1, pc = -1;
    for (int i = k; i < rows && pr < 0; ++i)
      for (int j = k; j < cols; ++j)
        if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) {
          pr = i;
          pc = j;
          break;
        }
    if (pr < 0) break;
    std::swap(a[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(pr)]);
    if (pc != k)
      for (int i = 0; i < rows; ++i)
        std::swap(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                  a[static_cast<std::size_t>(i)][static_cast<std::size_t>(pc)]);
    for (int i = k + 1; i < rows; ++i) {
      for (int j = k + 1; j < cols; ++j) {
        Int num = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                      a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] -
                  a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                      a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = num / prev;
      }
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = 0;
    }
    prev = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
  }
  return k;
}

std::int64_t integer_rank(int rows, int cols,
                          const std::vector<IntTriplet>& entries) {
  if (rows <= 256 && cols <= 256) return rank_rational(rows, cols, entries);
  const std::uint64_t p1 = (1ULL << 61) - 1;
  const std::uint64_t p2 = 2147483647ULL;  // 2^31 - 1
  const std::int64_t r1 = rank_mod_prime(rows, cols, entries, p1);
  const std::int64_t r2 = rank_mod_prime(rows, cols, entries, p2);
  if (r1 != r2)
    throw std::runtime_error("modular rank disagreement between primes");
  return r1;
}

}  // namespace hodge
