#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hodge/complex.hpp"

namespace hodge {

/// Piecewise-constant Riemannian metric: one symmetric positive-definite
/// Gram matrix of edge vectors (e_i = v_i - v_0 in sorted local vertex
/// order) per top simplex. Units: length squared.
class MetricField {
 public:
  MetricField(ComplexPtr complex, std::vector<double> grams);

  const SimplicialComplex& complex() const { return *complex_; }
  const ComplexPtr& complex_ptr() const { return complex_; }

  Eigen::Map<const Eigen::MatrixXd> gram(std::int64_t top) const {
    const int n = complex_->dimension();
    return {grams_.data() + top * n * n, n, n};
  }
  double simplex_volume(std::int64_t top) const;
  const std::vector<double>& raw() const { return grams_; }

 private:
  ComplexPtr complex_;
  std::vector<double> grams_;  // row-major n*n blocks
};

/// Cigar deformation parameters: profile length L and the chart center of
/// the radius-2 support ball (inner radius 1 and outer radius 2 are fixed by
/// the construction). L = 0 is the degenerate baseline profile.
struct RadialProfile {
  double length = 1.0;
  std::vector<double> center;
};

MetricField flat_metric(const SimplicialComplex& K, ComplexPtr keepalive);
MetricField flat_metric(const ComplexPtr& K);

/// f_L(r): 4e^{2L}/(1+e^{2L}r^2)^2 on [0, e^-L], 1/r^2 on [e^-L, 1], a
/// quintic-smoothstep blend h(r) of 1/r^2 into 1 on [1, 2] (h = 1/r^2 on
/// [1, 4/3], h = 1 on [5/3, 2], 1/2 <= h <= 1), and 1 beyond 2.
double eval_profile(const RadialProfile& profile, double r);

/// Per-vertex field v -> f_L(dist(v, center)) with minimal-image periodic
/// distances. Requires the radius-2 ball to embed in the chart.
std::vector<double> cigar_factor_field(const SimplicialComplex& K,
                                       const RadialProfile& profile);

/// Conformal rescale: each top simplex's Gram matrix is multiplied by the
/// arithmetic mean of the factor over its vertices.
MetricField apply_conformal(const MetricField& g,
                            std::span<const double> vertex_factors);

/// Conformal rescale by a radial profile: each top simplex's Gram matrix is
/// multiplied by the volume average of f over the simplex, computed by
/// adaptive bisection quadrature in the chart. Unlike vertex sampling this
/// stays accurate when the factor varies by orders of magnitude across one
/// cell, e.g. across the tip of a long cigar.
MetricField apply_conformal_profile(const MetricField& g,
                                    const RadialProfile& profile);

/// Riemannian volume of the conformal family member f^{n/2} on an
/// n-dimensional flat chart of the given total volume:
/// box_volume - omega_{n-1} * int_0^2 (1 - f(r)^{n/2}) r^{n-1} dr,
/// by piecewise adaptive quadrature between the profile breakpoints.
/// Exact to ~1e-10 relative; independent of any mesh. For n = 4 the cap
/// contributes 4 pi^2 / 3 (a unit half-sphere) at every L and the neck
/// grows as 2 pi^2 L.
double profile_volume(const RadialProfile& profile, int n, double box_volume);

double volume(const MetricField& g);

/// Returns (V^{-2/n} * g, V^{-2/n}); the result has unit volume.
std::pair<MetricField, double> normalize_volume(const MetricField& g);

/// Smallest alpha >= 1 with alpha^-2 g2 <= g1 <= alpha^2 g2 per simplex.
double quasi_isometry_ratio(const MetricField& g1, const MetricField& g2);

std::string metric_to_json(const MetricField& g);
MetricField metric_from_json(const std::string& text);

}  // namespace hodge
