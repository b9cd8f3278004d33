#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hodge {

/// Closed-form reference spectra for round spheres, flat intervals, and
/// Riemannian products of the two. Values are exact up to floating point
/// evaluation of the formulas; lists are ascending with distinct entries
/// and exact multiplicities.

struct AnalyticEntry {
  double value = 0.0;
  int multiplicity = 0;
};

using AnalyticSpectrum = std::vector<AnalyticEntry>;

/// First `count` distinct eigenvalues of the Laplacian on coexact p-forms
/// of the unit round sphere S^m (0 <= p <= m-1).
AnalyticSpectrum sphere_coexact_spectrum(int m, int p, int count);

/// First `count` distinct eigenvalues of the Laplacian on all p-forms of
/// S^m, zero modes included.
AnalyticSpectrum sphere_form_spectrum(int m, int p, int count);

/// First `count` distinct eigenvalues of the Laplacian on p-forms of the
/// interval [0, L] under absolute boundary conditions (p in {0, 1}).
AnalyticSpectrum interval_form_spectrum(double L, int p, int count);

/// A closed factor for product spectra: its dimension and a generator for
/// per-degree form spectra.
struct AnalyticFactor {
  int dimension = 0;
  std::function<AnalyticSpectrum(int degree, int count)> forms;
};

AnalyticFactor interval_factor(double L);
AnalyticFactor sphere_factor(int m);

/// p-form spectrum of the Riemannian product A x B, assembled degree by
/// degree as sums of factor eigenvalues with multiplied multiplicities.
AnalyticSpectrum product_form_spectrum(const AnalyticFactor& a,
                                       const AnalyticFactor& b, int p,
                                       int count);

/// Smallest strictly positive value of a spectrum; throws if none listed.
double first_positive(const AnalyticSpectrum& spectrum);

/// Riemannian volume of the unit round sphere S^m.
double sphere_volume(int m);

/// L-independent lower bound for the first positive eigenvalue of the
/// Laplacian on p-forms of the cylinder [0, L] x S^{n-1} under absolute
/// boundary conditions: the minimum of the first positive eigenvalues on
/// p-forms and (p-1)-forms of the cross-section sphere.
double cylinder_lower_bound(int n, int p);

/// One sample of the scale-invariant growth curve: a cylinder of length L
/// glued to a fixed cap of the given volume, its first positive p-form
/// eigenvalue mu, total volume V, and the product V^{2/n} * mu.
struct TheoremCurveRow {
  double length = 0.0;
  double mu = 0.0;
  double volume = 0.0;
  double product = 0.0;
};

std::vector<TheoremCurveRow> theorem_curve(int n, int p,
                                           const std::vector<double>& lengths,
                                           double fixed_part_volume);

/// CSV with header "L,mu,V,product".
std::string theorem_curve_to_csv(const std::vector<TheoremCurveRow>& rows);

}  // namespace hodge
