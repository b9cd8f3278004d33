#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <numbers>

#include "hodge/analytic.hpp"

using namespace hodge;

namespace {

constexpr double kPi = std::numbers::pi;

// Finite difference oracle for the interval [0, L]. Neumann uses the
// cell-centered second difference (reflected ghost cells), Dirichlet the
// vertex-centered one on interior nodes; both are second order in h.
std::vector<double> fd_interval(double L, bool neumann, int count) {
  const int N = 800;
  const double h = L / N;
  const int dim = neumann ? N : N - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    A(i, i) = 2.0;
    if (i > 0) A(i, i - 1) = -1.0;
    if (i + 1 < dim) A(i, i + 1) = -1.0;
  }
  if (neumann) {
    A(0, 0) = 1.0;
    A(dim - 1, dim - 1) = 1.0;
  }
  A /= h * h;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

double nth_value(const AnalyticSpectrum& s, std::size_t i) {
  REQUIRE(i < s.size());
  return s[i].value;
}

}  // namespace

TEST_CASE("interval spectra against the finite difference oracle") {
  for (double L : {1.0, kPi, 2.5}) {
    const auto f0 = interval_form_spectrum(L, 0, 4);
    const auto fd0 = fd_interval(L, true, 8);
    // Neumann: 0, (pi/L)^2, (2pi/L)^2, ...
    CHECK(f0[0].value == 0.0);
    CHECK(f0[0].multiplicity == 1);
    for (int k = 1; k <= 3; ++k)
      CHECK(nth_value(f0, static_cast<std::size_t>(k)) ==
            doctest::Approx(std::pow(k * kPi / L, 2)).epsilon(1e-12));
    // FD eigenvalues converge O(h^2): compare loosely.
    CHECK(fd0[1] == doctest::Approx(f0[1].value).epsilon(1e-4));
    CHECK(fd0[2] == doctest::Approx(f0[2].value).epsilon(1e-4));

    const auto f1 = interval_form_spectrum(L, 1, 4);
    const auto fd1 = fd_interval(L, false, 8);
    // Absolute 1-forms on an interval: Dirichlet values (k pi/L)^2, k >= 1,
    // no zero mode.
    CHECK(f1[0].value ==
          doctest::Approx(std::pow(kPi / L, 2)).epsilon(1e-12));
    CHECK(fd1[0] == doctest::Approx(f1[0].value).epsilon(1e-4));
    CHECK(fd1[1] == doctest::Approx(f1[1].value).epsilon(1e-4));
  }
  SUBCASE("unit values at L = pi") {
    const auto f0 = interval_form_spectrum(kPi, 0, 4);
    CHECK(f0[0].value == 0.0);
    CHECK(f0[1].value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f0[2].value == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(f0[3].value == doctest::Approx(9.0).epsilon(1e-14));
  }
  SUBCASE("doubling the length divides eigenvalues by four") {
    const auto a = interval_form_spectrum(1.0, 1, 3);
    const auto b = interval_form_spectrum(2.0, 1, 3);
    for (int i = 0; i < 3; ++i)
      CHECK(b[static_cast<std::size_t>(i)].value ==
            doctest::Approx(a[static_cast<std::size_t>(i)].value / 4)
                .epsilon(1e-14));
  }
}

TEST_CASE("sphere coexact spectra match the closed form with multiplicities") {
  // S^2 functions (p = 0): k(k+1), multiplicity 2k+1, k >= 1.
  const auto s2 = sphere_coexact_spectrum(2, 0, 4);
  for (int k = 1; k <= 4; ++k) {
    CHECK(nth_value(s2, static_cast<std::size_t>(k - 1)) ==
          doctest::Approx(k * (k + 1.0)).epsilon(1e-14));
    CHECK(s2[static_cast<std::size_t>(k - 1)].multiplicity == 2 * k + 1);
  }
  // S^3 coexact 1-forms: first value (1+1)(1+3-1-1) = 4 at k = 1? The
  // closed form is (k+p)(k+m-p-1): m=3, p=1, k=1 -> 2*2 = 4.
  const auto s31 = sphere_coexact_spectrum(3, 1, 3);
  CHECK(s31[0].value == doctest::Approx(4.0).epsilon(1e-14));
  // S^4 coexact 1-forms: k=1 -> (1+1)(1+4-1-1) = 6.
  const auto s41 = sphere_coexact_spectrum(4, 1, 3);
  CHECK(s41[0].value == doctest::Approx(6.0).epsilon(1e-14));
  // S^4 coexact 2-forms: k=1 -> (1+2)(1+4-2-1) = 6.
  const auto s42 = sphere_coexact_spectrum(4, 2, 3);
  CHECK(s42[0].value == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("sphere form spectra include both branches and the right kernels") {
  // Functions on S^2 gain the zero mode.
  const auto f0 = sphere_form_spectrum(2, 0, 4);
  CHECK(f0[0].value == 0.0);
  CHECK(f0[0].multiplicity == 1);
  CHECK(f0[1].value == doctest::Approx(2.0).epsilon(1e-14));

  // Middle degrees of spheres have no harmonic forms: spectra start
  // strictly positive.
  for (int m = 2; m <= 4; ++m)
    for (int p = 1; p <= m - 1; ++p) {
      const auto s = sphere_form_spectrum(m, p, 3);
      CHECK(s[0].value > 0.0);
    }

  // Top forms mirror functions (Hodge duality): same positive values.
  const auto top = sphere_form_spectrum(3, 3, 4);
  const auto fun = sphere_form_spectrum(3, 0, 4);
  REQUIRE(top.size() == fun.size());
  for (std::size_t i = 0; i < top.size(); ++i) {
    CHECK(top[i].value == doctest::Approx(fun[i].value).epsilon(1e-14));
    CHECK(top[i].multiplicity == fun[i].multiplicity);
  }

  // 1-forms on S^3 at k=1: coexact branch gives 4, exact branch gives the
  // function eigenvalue 3 = 1*(1+2); the merged list starts at 3.
  const auto s31 = sphere_form_spectrum(3, 1, 3);
  CHECK(s31[0].value == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("product spectra agree with a brute force double loop") {
  const double L = 1.3;
  auto I = interval_factor(L);
  auto S = sphere_factor(2);
  for (int p = 0; p <= 3; ++p) {
    const auto got = product_form_spectrum(I, S, p, 6);
    // Brute force: sum over degree splits (a on the interval, p - a on the
    // sphere), value sums, multiplicity products.
    std::map<double, long long> acc;
    const int count = 40;
    for (int a = 0; a <= 1; ++a) {
      const int b = p - a;
      if (b < 0 || b > 2) continue;
      const auto fa = I.forms(a, count);
      const auto fb = S.forms(b, count);
      for (const auto& ea : fa)
        for (const auto& eb : fb) {
          // Round to kill floating point split noise in the map key.
          const double v = ea.value + eb.value;
          const double key = std::round(v * 1e9) / 1e9;
          acc[key] += static_cast<long long>(ea.multiplicity) *
                      eb.multiplicity;
        }
    }
    auto it = acc.begin();
    for (const auto& e : got) {
      REQUIRE(it != acc.end());
      CHECK(e.value == doctest::Approx(it->first).epsilon(1e-9));
      CHECK(e.multiplicity == it->second);
      ++it;
    }
  }
}

TEST_CASE("product assembly commutes") {
  auto I = interval_factor(0.8);
  auto S = sphere_factor(3);
  for (int p = 0; p <= 2; ++p) {
    const auto ab = product_form_spectrum(I, S, p, 5);
    const auto ba = product_form_spectrum(S, I, p, 5);
    REQUIRE(ab.size() == ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
      CHECK(ab[i].value == doctest::Approx(ba[i].value).epsilon(1e-13));
      CHECK(ab[i].multiplicity == ba[i].multiplicity);
    }
  }
}

TEST_CASE("cylinder lower bound is length independent and correct at n=4") {
  CHECK(cylinder_lower_bound(4, 2) == doctest::Approx(3.0).epsilon(1e-14));
  // min over coexact branches of S^3: p=2 forms have first positive 3
  // (exact branch from coexact 1-forms at k=1 -> 4; functions 3 enters
  // through p-1 = 1 forms).
  // Independence: the bound takes no length argument at all; check it
  // bounds actual cylinder spectra for several lengths.
  for (double L : {0.5, 1.0, 4.0}) {
    auto I = interval_factor(L);
    auto S = sphere_factor(3);
    const auto spec = product_form_spectrum(I, S, 2, 8);
    CHECK(first_positive(spec) >= cylinder_lower_bound(4, 2) - 1e-12);
  }
}

TEST_CASE("cylinder control at n=3 decays with length") {
  // In three dimensions the excluded degree p=1 has cylinder eigenvalues
  // falling like (pi/L)^2: no uniform positive bound.
  auto S = sphere_factor(2);
  double prev = 1e300;
  for (double L : {2.0, 4.0, 8.0, 16.0}) {
    auto I = interval_factor(L);
    const auto spec = product_form_spectrum(I, S, 1, 8);
    const double mu = first_positive(spec);
    CHECK(mu < prev);
    CHECK(mu <= std::pow(kPi / L, 2) * 1.0001);
    prev = mu;
  }
}

TEST_CASE("theorem curve rows carry the scale invariant product") {
  const double cap = 2 * kPi * kPi;  // fixed cap volume
  const auto rows = theorem_curve(4, 2, {1.0, 2.0, 4.0}, cap);
  REQUIRE(rows.size() == 3);
  const double vol_s3 = sphere_volume(3);
  CHECK(vol_s3 == doctest::Approx(2 * kPi * kPi).epsilon(1e-14));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    CHECK(r.mu == doctest::Approx(3.0).epsilon(1e-12));  // bound attained
    CHECK(r.volume ==
          doctest::Approx(cap + r.length * vol_s3).epsilon(1e-12));
    CHECK(r.product ==
          doctest::Approx(std::pow(r.volume, 2.0 / 4) * r.mu).epsilon(1e-12));
  }
  // Growth: V^{2/n} mu increases without bound in L.
  CHECK(rows[2].product > rows[1].product);
  CHECK(rows[1].product > rows[0].product);

  const std::string csv = theorem_curve_to_csv(rows);
  CHECK(csv.rfind("L,mu,V,product", 0) == 0);
}

TEST_CASE("sphere volumes match the closed forms") {
  CHECK(sphere_volume(1) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(sphere_volume(2) == doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK(sphere_volume(3) == doctest::Approx(2 * kPi * kPi).epsilon(1e-14));
  CHECK(sphere_volume(4) ==
        doctest::Approx(8 * kPi * kPi / 3).epsilon(1e-14));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(sphere_coexact_spectrum(2, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(interval_form_spectrum(-1.0, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(interval_form_spectrum(1.0, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(cylinder_lower_bound(4, 5), std::invalid_argument);
  AnalyticSpectrum empty;
  CHECK_THROWS_AS(first_positive(empty), std::out_of_range);
}
