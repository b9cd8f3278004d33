#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hodge/sparse.hpp"

namespace hodge {

enum class ComplexKind { Generic, Torus, Sphere };

/// Immutable simplicial complex with per-degree sorted simplex tables,
/// optional vertex coordinates (flat chart for tori, ambient embedding for
/// spheres), cached coboundary operators and exact Betti numbers.
///
/// Caches mutate lazily behind const accessors; the object is built for
/// single-threaded use.
class SimplicialComplex {
 public:
  int dimension() const { return dim_; }
  std::int64_t simplex_count(int q) const;
  /// Sorted vertex ids of the i-th q-simplex (tables are lexicographically
  /// sorted, so indices are reproducible).
  std::span<const int> simplex(int q, std::int64_t i) const;
  std::int64_t simplex_index(int q, std::span<const int> vertices) const;

  /// D_q: q-cochains -> (q+1)-cochains, entries ±1 by sorted-tuple
  /// orientation. Defined for 0 <= q <= n-1.
  const SparseOperator& coboundary(int q) const;
  std::int64_t coboundary_rank(int q) const;  // exact; rank D_n = 0
  const std::vector<int>& betti() const;

  /// Global indices of the C(n+1, q+1) q-faces of each top simplex,
  /// flattened, subsets enumerated in lexicographic local order.
  const std::vector<std::int64_t>& top_faces(int q) const;

  bool has_coordinates() const { return coord_dim_ > 0; }
  int coordinate_dimension() const { return coord_dim_; }
  std::span<const double> vertex_coordinates(std::int64_t v) const;
  bool has_flat_chart() const { return !periods_.empty(); }
  std::span<const double> chart_periods() const { return periods_; }
  ComplexKind kind() const { return kind_; }

  /// Consistent global orientation signs of top simplices (from coordinates);
  /// empty for complexes without geometry.
  const std::vector<signed char>& top_orientations() const {
    return orientations_;
  }

  /// Coordinate difference b - a, wrapped per-component to the minimal
  /// periodic image when a flat chart is present.
  std::vector<double> displacement(std::int64_t a, std::int64_t b) const;

  int euler_characteristic() const;

  static std::shared_ptr<const SimplicialComplex> from_top_simplices(
      int dim, std::vector<std::vector<int>> tops,
      ComplexKind kind = ComplexKind::Generic,
      std::vector<double> coords = {}, int coord_dim = 0,
      std::vector<double> periods = {});

 private:
  friend std::shared_ptr<const SimplicialComplex> apply_radial_grading(
      const SimplicialComplex&, std::span<const double>, double);

  SimplicialComplex() = default;

  int dim_ = 0;
  int coord_dim_ = 0;
  ComplexKind kind_ = ComplexKind::Generic;
  std::vector<std::vector<int>> tables_;  // tables_[q]: tuples, stride q+1
  std::vector<double> coords_;            // flattened, stride coord_dim_
  std::vector<double> periods_;
  std::vector<signed char> orientations_;

  mutable std::vector<std::unique_ptr<SparseOperator>> coboundary_cache_;
  mutable std::vector<std::unique_ptr<std::vector<std::int64_t>>> face_cache_;
  mutable std::vector<std::int64_t> rank_cache_;  // -1 = not computed
  mutable std::vector<int> betti_cache_;

  void compute_orientations();
};

using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

/// Kuhn (Freudenthal) triangulation of the periodic n-cube grid:
/// n! simplices per grid cell, flat chart with per-axis period
/// cells_per_axis * side_length. Rejects cells_per_axis < 3.
ComplexPtr build_torus(int n, int cells_per_axis, double side_length);

/// Boundary of the (m+1)-dimensional cross-polytope, refined by
/// refinement_level rounds of edge bisection; vertices are radially projected
/// to the unit sphere after each round.
ComplexPtr build_sphere(int m, int refinement_level);

/// Radial vertex compression toward `center` inside the radius-2 chart ball:
/// r -> 2(e^{rate(r/2-1)} - e^{-rate})/(1 - e^{-rate}), identity outside.
/// Requires a flat chart; verifies no simplex inverts.
ComplexPtr apply_radial_grading(const SimplicialComplex& K,
                                std::span<const double> center, double rate);

/// Checks that every (n-1)-simplex has exactly two n-cofaces whose induced
/// orientations (coboundary sign times global top orientation) cancel.
/// Throws on violation; requires top orientations.
void verify_closed_manifold(const SimplicialComplex& K);

/// Closed q-cochains spanning degree-q cohomology, when the complex kind
/// supports constructing them: component indicators at q = 0 for any complex,
/// coordinate-plane projected volumes for tori, the orientation cochain at
/// top degree for spheres. Returns exactly betti-many independent cochains,
/// or throws if the kind cannot supply them and b_q > 0.
std::vector<std::vector<double>> cohomology_representatives(
    const SimplicialComplex& K, int q);

/// Connected components of the vertex set via the edge table.
std::vector<int> vertex_components(const SimplicialComplex& K);

std::string complex_to_json(const SimplicialComplex& K);
ComplexPtr complex_from_json(const std::string& text);

}  // namespace hodge
