#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "hodge/sparse.hpp"

using namespace hodge;

TEST_CASE("duplicate triplets merge by summation") {
  std::vector<Triplet> ts = {
      {0, 0, 1.0}, {1, 2, 2.5}, {0, 0, 2.0}, {1, 2, -0.5}, {2, 1, 4.0}};
  auto m = SparseOperator::from_triplets(3, 3, ts, false);
  REQUIRE(m.nnz() == 3);
  CHECK(m.entries()[0].row == 0);
  CHECK(m.entries()[0].col == 0);
  CHECK(m.entries()[0].value == 3.0);
  CHECK(m.entries()[1].row == 1);
  CHECK(m.entries()[1].col == 2);
  CHECK(m.entries()[1].value == 2.0);
  CHECK(m.entries()[2].row == 2);
  CHECK(m.entries()[2].value == 4.0);
}

TEST_CASE("entries are sorted by row then column") {
  std::vector<Triplet> ts = {{2, 0, 1}, {0, 2, 1}, {0, 1, 1}, {1, 1, 1}};
  auto m = SparseOperator::from_triplets(3, 3, ts, false);
  std::int64_t prev = -1;
  for (const auto& e : m.entries()) {
    const std::int64_t key = static_cast<std::int64_t>(e.row) * 3 + e.col;
    CHECK(key > prev);
    prev = key;
  }
}

TEST_CASE("identical assembly order gives identical entry lists") {
  std::vector<Triplet> ts;
  for (int k = 0; k < 257; ++k)
    ts.push_back({k % 17, (k * 7) % 13, 0.1 * k - 3.0});
  auto a = SparseOperator::from_triplets(17, 13, ts, false);
  auto b = SparseOperator::from_triplets(17, 13, ts, false);
  REQUIRE(a.nnz() == b.nnz());
  for (std::size_t i = 0; i < a.nnz(); ++i) {
    CHECK(a.entries()[i].row == b.entries()[i].row);
    CHECK(a.entries()[i].col == b.entries()[i].col);
    CHECK(a.entries()[i].value == b.entries()[i].value);
  }
}

TEST_CASE("symmetric flag is verified at construction") {
  std::vector<Triplet> sym = {{0, 1, 2.0}, {1, 0, 2.0}, {0, 0, 1.0}};
  CHECK_NOTHROW(SparseOperator::from_triplets(2, 2, sym, true));
  std::vector<Triplet> asym = {{0, 1, 2.0}, {1, 0, 1.0}};
  CHECK_THROWS(SparseOperator::from_triplets(2, 2, asym, true));
}

TEST_CASE("symmetry gap measures the largest asymmetry") {
  std::vector<Triplet> ts = {{0, 1, 2.0}, {1, 0, 1.5}, {0, 0, 3.0}};
  auto m = SparseOperator::from_triplets(2, 2, ts, false);
  CHECK(m.symmetry_gap() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("round trip through Eigen preserves values") {
  std::vector<Triplet> ts = {{0, 0, 1.25}, {2, 1, -4.0}, {1, 2, 0.5}};
  auto m = SparseOperator::from_triplets(3, 3, ts, false);
  auto e = m.to_eigen();
  auto back = SparseOperator::from_eigen(e, false);
  REQUIRE(back.nnz() == m.nnz());
  for (std::size_t i = 0; i < m.nnz(); ++i)
    CHECK(back.entries()[i].value == m.entries()[i].value);
  CHECK(m.to_dense()(2, 1) == -4.0);
}

TEST_CASE("transpose swaps indices") {
  std::vector<Triplet> ts = {{0, 2, 7.0}, {1, 0, -1.0}};
  auto t = SparseOperator::from_triplets(2, 3, ts, false).transposed();
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 2);
  CHECK(t.to_dense()(2, 0) == 7.0);
  CHECK(t.to_dense()(0, 1) == -1.0);
}

TEST_CASE("matrix market output matches the format") {
  SUBCASE("general matrix") {
    std::vector<Triplet> ts = {{0, 1, 2.5}, {1, 0, -1.0}};
    auto m = SparseOperator::from_triplets(2, 2, ts, false);
    std::ostringstream out;
    m.write_matrix_market(out);
    const std::string text = out.str();
    CHECK(text.find("%%MatrixMarket matrix coordinate real general") !=
          std::string::npos);
    CHECK(text.find("2 2 2") != std::string::npos);
    // 1-based indices
    CHECK(text.find("1 2 2.5") != std::string::npos);
    CHECK(text.find("2 1 -1") != std::string::npos);
  }
  SUBCASE("symmetric matrix stores the lower triangle") {
    std::vector<Triplet> ts = {{0, 0, 1.0}, {0, 1, 3.0}, {1, 0, 3.0}};
    auto m = SparseOperator::from_triplets(2, 2, ts, true);
    std::ostringstream out;
    m.write_matrix_market(out);
    const std::string text = out.str();
    CHECK(text.find("symmetric") != std::string::npos);
    CHECK(text.find("2 2 2") != std::string::npos);  // upper entry dropped
    CHECK(text.find("2 1 3") != std::string::npos);
  }
}

TEST_CASE("dimension bounds are enforced") {
  CHECK_THROWS(SparseOperator::from_triplets(2, 2, {{2, 0, 1.0}}, false));
  CHECK_THROWS(SparseOperator::from_triplets(2, 2, {{0, -1, 1.0}}, false));
}
