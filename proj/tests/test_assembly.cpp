#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "hodge/assembly.hpp"
#include "hodge/complex.hpp"
#include "hodge/metric.hpp"

using namespace hodge;

namespace {

// Single unit right triangle 0-1-2 with legs along the axes.
MetricField unit_right_triangle() {
  auto K = SimplicialComplex::from_top_simplices(
      2, {{0, 1, 2}}, ComplexKind::Generic, {0, 0, 1, 0, 0, 1}, 2);
  return flat_metric(*K, K);
}

// Single unit interval as a 1-complex.
MetricField unit_interval() {
  auto K = SimplicialComplex::from_top_simplices(1, {{0, 1}},
                                                 ComplexKind::Generic,
                                                 {0, 1}, 1);
  return flat_metric(*K, K);
}

// Monte Carlo integral of <w_a, w_b> over the unit right triangle for
// Whitney 1-forms w_01, w_02, w_12 under the Euclidean metric. Barycentric
// gradients on this triangle: grad l0 = (-1,-1), grad l1 = (1,0),
// grad l2 = (0,1). w_ij = l_i grad l_j - l_j grad l_i.
double mc_whitney_pair(int i0, int j0, int i1, int j1, unsigned seed,
                       std::int64_t samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double grad[3][2] = {{-1, -1}, {1, 0}, {0, 1}};
  double acc = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    double x = uni(rng), y = uni(rng);
    if (x + y > 1) {  // reflect into the triangle
      x = 1 - x;
      y = 1 - y;
    }
    const double l[3] = {1 - x - y, x, y};
    double wa[2], wb[2];
    for (int c = 0; c < 2; ++c) {
      wa[c] = l[i0] * grad[j0][c] - l[j0] * grad[i0][c];
      wb[c] = l[i1] * grad[j1][c] - l[j1] * grad[i1][c];
    }
    acc += wa[0] * wb[0] + wa[1] * wb[1];
  }
  return acc / static_cast<double>(samples) * 0.5;  // triangle area 1/2
}

}  // namespace

TEST_CASE("interval mass matrices carry the classic hat and volume weights") {
  auto g = unit_interval();
  const auto M0 = whitney_mass(g, 0).to_eigen();
  CHECK(M0.coeff(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(M0.coeff(1, 1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(M0.coeff(0, 1) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  const auto M1 = whitney_mass(g, 1).to_eigen();
  CHECK(M1.coeff(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("unit right triangle vertex and edge mass entries are exact") {
  auto g = unit_right_triangle();
  // Vertex masses: area/6 diagonal, area/12 off-diagonal.
  const auto M0 = whitney_mass(g, 0).to_eigen();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(M0.coeff(i, j) ==
            doctest::Approx((i == j ? 1.0 / 12 : 1.0 / 24)).epsilon(1e-13));

  // Edge table is sorted: 01, 02, 12.
  const auto M1 = whitney_mass(g, 1).to_eigen();
  CHECK(M1.coeff(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-13));   // <01,01>
  CHECK(M1.coeff(0, 1) == doctest::Approx(1.0 / 6).epsilon(1e-13));   // <01,02>
  CHECK(M1.coeff(0, 2) == doctest::Approx(0.0).epsilon(1e-13));       // <01,12>

  // Top-degree mass is 1/volume.
  const auto M2 = whitney_mass(g, 2).to_eigen();
  CHECK(M2.coeff(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("monte carlo quadrature agrees with the closed-form edge mass") {
  auto g = unit_right_triangle();
  const auto M1 = whitney_mass(g, 1).to_eigen();
  const std::int64_t N = 400000;
  struct Pair {
    int r, c, a0, a1, b0, b1;
  };
  // (row, col) in the sorted edge table vs vertex pairs.
  for (auto [r, c, a0, a1, b0, b1] : {Pair{0, 0, 0, 1, 0, 1},
                                      Pair{1, 1, 0, 2, 0, 2},
                                      Pair{2, 2, 1, 2, 1, 2},
                                      Pair{0, 1, 0, 1, 0, 2},
                                      Pair{0, 2, 0, 1, 1, 2},
                                      Pair{1, 2, 0, 2, 1, 2}}) {
    const double mc = mc_whitney_pair(a0, a1, b0, b1, 12345u, N);
    CHECK(std::abs(M1.coeff(r, c) - mc) < 5e-3);
  }
}

TEST_CASE("top degree mass is the inverse volume diagonal") {
  auto K = build_torus(2, 3, 0.9);
  auto g = flat_metric(K);
  const auto Mn = whitney_mass(g, 2).to_eigen();
  for (std::int64_t t = 0; t < K->simplex_count(2); ++t) {
    CHECK(Mn.coeff(t, t) ==
          doctest::Approx(1.0 / g.simplex_volume(t)).epsilon(1e-12));
    for (std::int64_t s = 0; s < t; ++s) CHECK(Mn.coeff(t, s) == 0.0);
  }
}

TEST_CASE("conformal scaling acts on mass matrices with exponent n/2 - p") {
  auto K = build_torus(3, 3, 1.0);
  auto g = flat_metric(K);
  const double c = 1.9;
  std::vector<double> f(static_cast<std::size_t>(K->simplex_count(0)), c);
  auto gc = apply_conformal(g, f);
  for (int p = 0; p <= 3; ++p) {
    const auto M = whitney_mass(g, p).to_eigen();
    const auto Mc = whitney_mass(gc, p).to_eigen();
    const double factor = std::pow(c, 3.0 / 2.0 - p);
    const Eigen::MatrixXd diff =
        Eigen::MatrixXd(Mc) - factor * Eigen::MatrixXd(M);
    CHECK(diff.cwiseAbs().maxCoeff() <
          1e-12 * Eigen::MatrixXd(M).cwiseAbs().maxCoeff() * factor);
  }
}

TEST_CASE("mass matrices are symmetric positive definite") {
  auto K = build_torus(2, 4, 1.0);
  RadialProfile prof{1.0, {2.0, 2.0}};
  auto g = apply_conformal(flat_metric(K), cigar_factor_field(*K, prof));
  for (int p = 0; p <= 2; ++p) {
    auto M = whitney_mass(g, p);
    CHECK(M.symmetric());
    Eigen::MatrixXd Md = Eigen::MatrixXd(M.to_eigen());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Md);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK((Md - Md.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("stiffness matches the coboundary sandwich and its kernel rank") {
  auto K = build_torus(2, 4, 1.0);
  auto g = flat_metric(K);
  for (int p = 0; p <= 1; ++p) {
    const auto Kp = stiffness(g, p).to_eigen();
    const auto D = K->coboundary(p).to_eigen();
    const auto M1 = whitney_mass(g, p + 1).to_eigen();
    const Eigen::MatrixXd want =
        Eigen::MatrixXd(D.transpose() * (M1 * D).eval());
    CHECK((Eigen::MatrixXd(Kp) - want).cwiseAbs().maxCoeff() < 1e-12);
    // Kernel dimension equals the count of closed cochains.
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(Kp));
    lu.setThreshold(1e-10);
    CHECK(lu.rank() == K->coboundary_rank(p));
  }
  // Top degree stiffness is identically zero.
  const auto Kn = stiffness(g, 2).to_eigen();
  CHECK(Kn.nonZeros() == 0);
}

TEST_CASE("assembly is deterministic") {
  auto K = build_torus(2, 4, 1.0);
  RadialProfile prof{2.0, {2.0, 2.0}};
  auto g = apply_conformal(flat_metric(K), cigar_factor_field(*K, prof));
  for (int p = 0; p <= 2; ++p) {
    auto A = whitney_mass(g, p);
    auto B = whitney_mass(g, p);
    REQUIRE(A.entries().size() == B.entries().size());
    for (std::size_t i = 0; i < A.entries().size(); ++i) {
      CHECK(A.entries()[i].row == B.entries()[i].row);
      CHECK(A.entries()[i].col == B.entries()[i].col);
      CHECK(A.entries()[i].value == B.entries()[i].value);
    }
  }
}

TEST_CASE("form space dimensions follow the simplex tables") {
  auto K = build_torus(3, 3, 1.0);
  for (int p = 0; p <= 3; ++p) {
    auto V = form_space(*K, p);
    CHECK(V.degree == p);
    CHECK(V.dimension == K->simplex_count(p));
  }
  CHECK_THROWS_AS(form_space(*K, 4), std::invalid_argument);
  CHECK_THROWS_AS(form_space(*K, -1), std::invalid_argument);
}
