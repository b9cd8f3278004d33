#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "hodge/complex.hpp"

using namespace hodge;

TEST_CASE("torus simplex counts follow the Kuhn pattern") {
  SUBCASE("T2 at 3 cells") {
    auto K = build_torus(2, 3, 1.0);
    CHECK(K->simplex_count(0) == 9);
    CHECK(K->simplex_count(1) == 27);
    CHECK(K->simplex_count(2) == 18);
    CHECK(K->euler_characteristic() == 0);
  }
  SUBCASE("T3 at 4 cells") {
    auto K = build_torus(3, 4, 1.0);
    CHECK(K->simplex_count(0) == 64);
    CHECK(K->simplex_count(1) == 448);
    CHECK(K->simplex_count(2) == 768);
    CHECK(K->simplex_count(3) == 384);
  }
  SUBCASE("T4 at 3 cells") {
    auto K = build_torus(4, 3, 1.0);
    CHECK(K->simplex_count(0) == 81);
    CHECK(K->simplex_count(1) == 1215);
    CHECK(K->simplex_count(2) == 4050);
    CHECK(K->simplex_count(3) == 4860);
    CHECK(K->simplex_count(4) == 1944);
    CHECK(K->euler_characteristic() == 0);
  }
}

TEST_CASE("torus rejects fewer than three cells per axis") {
  CHECK_THROWS_AS(build_torus(2, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_torus(3, 1, 1.0), std::invalid_argument);
}

TEST_CASE("sphere refinements quadruple the face count") {
  auto S0 = build_sphere(2, 0);  // octahedron boundary
  CHECK(S0->simplex_count(0) == 6);
  CHECK(S0->simplex_count(1) == 12);
  CHECK(S0->simplex_count(2) == 8);
  CHECK(S0->euler_characteristic() == 2);

  auto S2 = build_sphere(2, 2);
  CHECK(S2->simplex_count(0) == 66);
  CHECK(S2->simplex_count(1) == 192);
  CHECK(S2->simplex_count(2) == 128);
  CHECK(S2->euler_characteristic() == 2);

  auto S3 = build_sphere(3, 2);
  CHECK(S3->simplex_count(0) == 192);
  CHECK(S3->simplex_count(1) == 1216);
  CHECK(S3->simplex_count(2) == 2048);
  CHECK(S3->simplex_count(3) == 1024);
  CHECK(S3->euler_characteristic() == 0);
}

TEST_CASE("sphere vertices sit on the unit sphere") {
  auto S = build_sphere(2, 2);
  for (std::int64_t v = 0; v < S->simplex_count(0); ++v) {
    auto x = S->vertex_coordinates(v);
    double r2 = 0;
    for (double c : x) r2 += c * c;
    CHECK(std::abs(std::sqrt(r2) - 1.0) < 1e-14);
  }
}

TEST_CASE("coboundary composes to zero exactly") {
  for (auto K : {build_torus(2, 3, 1.0), build_torus(3, 3, 1.0),
                 build_sphere(2, 1), build_sphere(3, 1)}) {
    for (int q = 0; q + 1 < K->dimension(); ++q) {
      const auto prod =
          (K->coboundary(q + 1).to_eigen() * K->coboundary(q).to_eigen())
              .eval();
      CHECK(prod.norm() == 0.0);  // exact integer cancellation
    }
  }
}

TEST_CASE("coboundary entries are plus or minus one") {
  auto K = build_torus(3, 3, 1.0);
  for (int q = 0; q < 3; ++q)
    for (const auto& e : K->coboundary(q).entries())
      CHECK(std::abs(e.value) == 1.0);
}

TEST_CASE("every codimension-one simplex of a closed mesh has two cofaces") {
  for (auto K : {build_torus(2, 4, 1.0), build_sphere(2, 1)}) {
    const int n = K->dimension();
    std::vector<int> cofaces(static_cast<std::size_t>(K->simplex_count(n - 1)), 0);
    for (const auto& e : K->coboundary(n - 1).entries())
      cofaces[static_cast<std::size_t>(e.col)]++;
    for (int c : cofaces) CHECK(c == 2);
    CHECK_NOTHROW(verify_closed_manifold(*K));
  }
}

TEST_CASE("betti numbers of the standard spaces") {
  CHECK(build_torus(2, 3, 1.0)->betti() == std::vector<int>{1, 2, 1});
  CHECK(build_torus(3, 3, 1.0)->betti() == std::vector<int>{1, 3, 3, 1});
  CHECK(build_torus(4, 3, 1.0)->betti() == std::vector<int>{1, 4, 6, 4, 1});
  CHECK(build_sphere(2, 1)->betti() == std::vector<int>{1, 0, 1});
  CHECK(build_sphere(3, 1)->betti() == std::vector<int>{1, 0, 0, 1});
}

TEST_CASE("cohomology representatives are closed and span") {
  auto K = build_torus(2, 4, 1.0);
  const auto reps = cohomology_representatives(*K, 1);
  REQUIRE(reps.size() == 2);
  const auto D1 = K->coboundary(1).to_eigen();
  for (const auto& z : reps) {
    Eigen::Map<const Eigen::VectorXd> zv(z.data(),
                                         static_cast<Eigen::Index>(z.size()));
    CHECK((D1 * zv).cwiseAbs().maxCoeff() == 0.0);
  }
  // Orientation cochain generates top cohomology of the sphere.
  auto S = build_sphere(2, 1);
  const auto top = cohomology_representatives(*S, 2);
  REQUIRE(top.size() == 1);
}

TEST_CASE("simplex tables are sorted and searchable") {
  auto K = build_torus(2, 3, 1.0);
  for (std::int64_t i = 0; i < K->simplex_count(1); ++i) {
    auto s = K->simplex(1, i);
    CHECK(s[0] < s[1]);
    CHECK(K->simplex_index(1, s) == i);
  }
  std::vector<int> missing = {0, static_cast<int>(K->simplex_count(0))};
  CHECK(K->simplex_index(1, missing) == -1);
}

TEST_CASE("top faces enumerate all boundary faces of each top simplex") {
  auto K = build_torus(2, 3, 1.0);
  const auto& edges_of_tri = K->top_faces(1);  // 3 edges per triangle
  REQUIRE(edges_of_tri.size() ==
          static_cast<std::size_t>(3 * K->simplex_count(2)));
  for (std::int64_t t = 0; t < K->simplex_count(2); ++t) {
    auto tri = K->simplex(2, t);
    std::set<std::int64_t> expect;
    for (int drop = 0; drop < 3; ++drop) {
      std::vector<int> e;
      for (int j = 0; j < 3; ++j)
        if (j != drop) e.push_back(tri[j]);
      expect.insert(K->simplex_index(1, e));
    }
    std::set<std::int64_t> got(edges_of_tri.begin() + 3 * t,
                               edges_of_tri.begin() + 3 * (t + 1));
    CHECK(expect == got);
  }
}

TEST_CASE("chart periods and displacement wrap minimally") {
  auto K = build_torus(2, 4, 0.5);  // period 2 per axis
  REQUIRE(K->has_flat_chart());
  CHECK(K->chart_periods()[0] == doctest::Approx(2.0));
  // Vertices at chart corners: distance wraps through the boundary.
  const auto d = K->displacement(0, 3);  // (0,0) to (1.5,0)
  CHECK(d[0] == doctest::Approx(-0.5));
  CHECK(d[1] == doctest::Approx(0.0));
}

TEST_CASE("radial grading compresses toward the center and keeps the mesh") {
  auto K = build_torus(2, 5, 1.0);  // period 5 > 4, so the grading ball embeds
  std::vector<double> center = {2.5, 2.5};
  auto G = apply_radial_grading(*K, center, 3.0);
  CHECK(G->simplex_count(2) == K->simplex_count(2));
  CHECK(G->betti() == K->betti());
  // Vertices inside the ball move toward the center; far ones stay.
  double moved = 0.0;
  for (std::int64_t v = 0; v < K->simplex_count(0); ++v) {
    auto a = K->vertex_coordinates(v);
    auto b = G->vertex_coordinates(v);
    double da = 0, db = 0;
    for (int i = 0; i < 2; ++i) {
      da += (a[i] - center[i]) * (a[i] - center[i]);
      db += (b[i] - center[i]) * (b[i] - center[i]);
    }
    da = std::sqrt(da);
    db = std::sqrt(db);
    CHECK(db <= da + 1e-12);
    if (da >= 2.0) CHECK(db == doctest::Approx(da).epsilon(1e-12));
    moved += da - db;
  }
  CHECK(moved > 0.1);
}

TEST_CASE("json round trip is byte identical") {
  auto K = build_torus(2, 3, 1.0);
  const std::string once = complex_to_json(*K);
  auto back = complex_from_json(once);
  CHECK(complex_to_json(*back) == once);
  CHECK(back->simplex_count(2) == K->simplex_count(2));
  CHECK(back->betti() == K->betti());

  auto S = build_sphere(2, 1);
  const std::string s_once = complex_to_json(*S);
  CHECK(complex_to_json(*complex_from_json(s_once)) == s_once);
}
