#include "hodge/metric.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace hodge {

namespace {

constexpr double kPi = 3.14159265358979323846;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Mass of the profile (integral of f) over a simplex with the given chart
/// positions (columns, relative to the profile center), by longest-edge
/// bisection. A piece is accepted once f is nearly constant across it, its
/// largest possible mass is below the floor (this prunes the cascade around
/// the 1/r^2 spike, whose mass is integrable), or the depth runs out. The
/// radius bound max(rmin - diam, sqrt(rmin^2 - diam^2/2)) is valid for
/// interior points by Jung's theorem, so pieces the profile cannot touch are
/// integrated exactly even when every sample point reads 1. A negative
/// mass_floor derives the floor from the root piece's own bound.
double profile_cell_mass(const RadialProfile& profile,
                         const Eigen::MatrixXd& pos, double vol,
                         double mass_floor, int depth) {
  const int m = static_cast<int>(pos.cols());
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  for (int j = 0; j < m; ++j) {
    const double r = pos.col(j).norm();
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  double diam2 = 0.0;
  int ea = 0, eb = 1;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double d2 = (pos.col(i) - pos.col(j)).squaredNorm();
      if (d2 > diam2) {
        diam2 = d2;
        ea = i;
        eb = j;
      }
    }
  const double rlo = std::max(
      rmin - std::sqrt(diam2),
      std::sqrt(std::max(rmin * rmin - 0.5 * diam2, 0.0)));
  if (rlo >= 5.0 / 3.0) return vol;  // profile is identically 1 from 5/3 out
  const double fhi = eval_profile(profile, rlo);
  const double flo = eval_profile(profile, rmax);
  if (mass_floor < 0) mass_floor = 1e-5 * vol * std::max(fhi, 1.0);
  if (depth == 0 || fhi <= 1.25 * flo || fhi * vol <= mass_floor) {
    double sum = eval_profile(profile, pos.rowwise().mean().norm());
    for (int j = 0; j < m; ++j) sum += eval_profile(profile, pos.col(j).norm());
    return vol * sum / (m + 1);
  }
  const Eigen::VectorXd mid = 0.5 * (pos.col(ea) + pos.col(eb));
  Eigen::MatrixXd child = pos;
  child.col(ea) = mid;
  const double left =
      profile_cell_mass(profile, child, 0.5 * vol, mass_floor, depth - 1);
  child.col(ea) = pos.col(ea);
  child.col(eb) = mid;
  const double right =
      profile_cell_mass(profile, child, 0.5 * vol, mass_floor, depth - 1);
  return left + right;
}

}  // namespace

MetricField::MetricField(ComplexPtr complex, std::vector<double> grams)
    : complex_(std::move(complex)), grams_(std::move(grams)) {
  const int n = complex_->dimension();
  const std::int64_t ntop = complex_->simplex_count(n);
  if (grams_.size() != static_cast<std::size_t>(ntop) *
                           static_cast<std::size_t>(n) *
                           static_cast<std::size_t>(n))
    throw std::invalid_argument("gram array size mismatch");
  for (std::int64_t t = 0; t < ntop; ++t) {
    Eigen::Map<const Eigen::MatrixXd> g = gram(t);
    if ((g - g.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("gram matrix not symmetric at simplex " +
                                  std::to_string(t));
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("gram matrix not positive definite at simplex " +
                                  std::to_string(t));
  }
}

double MetricField::simplex_volume(std::int64_t top) const {
  const int n = complex_->dimension();
  const double det = gram(top).determinant();
  if (!(det > 0))
    throw std::runtime_error("degenerate metric at simplex " +
                             std::to_string(top));
  return std::sqrt(det) / factorial(n);
}

MetricField flat_metric(const SimplicialComplex& K, ComplexPtr keepalive) {
  if (!K.has_coordinates())
    throw std::invalid_argument("flat metric needs coordinates");
  const int n = K.dimension();
  const int a = K.coordinate_dimension();
  const std::int64_t ntop = K.simplex_count(n);
  std::vector<double> grams(static_cast<std::size_t>(ntop) *
                            static_cast<std::size_t>(n) *
                            static_cast<std::size_t>(n));
  Eigen::MatrixXd edges(a, n);
  for (std::int64_t t = 0; t < ntop; ++t) {
    std::span<const int> top = K.simplex(n, t);
    for (int j = 1; j <= n; ++j) {
      const std::vector<double> d = K.displacement(top[0], top[static_cast<std::size_t>(j)]);
      for (int i = 0; i < a; ++i) edges(i, j - 1) = d[static_cast<std::size_t>(i)];
    }
    const Eigen::MatrixXd g = edges.transpose() * edges;
    if (!(g.determinant() > 0))
      throw std::invalid_argument("degenerate simplex " + std::to_string(t) +
                                  " in flat metric construction");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        grams[(static_cast<std::size_t>(t) * n + static_cast<std::size_t>(i)) * n +
              static_cast<std::size_t>(j)] = g(i, j);
  }
  return MetricField(std::move(keepalive), std::move(grams));
}

MetricField flat_metric(const ComplexPtr& K) { return flat_metric(*K, K); }

double eval_profile(const RadialProfile& profile, double r) {
  const double L = profile.length;
  if (L < 0) throw std::invalid_argument("profile length must be nonnegative");
  if (r < 0) throw std::invalid_argument("negative radius");
  const double a = std::exp(-L);
  if (r <= a) {
    const double t = std::exp(2.0 * L);
    const double denom = 1.0 + t * r * r;
    return 4.0 * t / (denom * denom);
  }
  if (r <= 1.0) return 1.0 / (r * r);
  if (r >= 2.0) return 1.0;
  // Quintic smoothstep blend of 1/r^2 into 1 over [4/3, 5/3].
  const double s = std::clamp((r - 4.0 / 3.0) * 3.0, 0.0, 1.0);
  const double sigma = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
  return (1.0 - sigma) / (r * r) + sigma;
}

std::vector<double> cigar_factor_field(const SimplicialComplex& K,
                                       const RadialProfile& profile) {
  if (!K.has_flat_chart())
    throw std::invalid_argument("cigar factor field needs a flat chart");
  const int n = K.coordinate_dimension();
  if (static_cast<int>(profile.center.size()) != n)
    throw std::invalid_argument("profile center dimension mismatch");
  for (double p : K.chart_periods())
    if (!(p > 4.0))
      throw std::invalid_argument(
          "radius-2 profile ball does not embed in the chart");
  std::vector<double> field(static_cast<std::size_t>(K.simplex_count(0)));
  for (std::int64_t v = 0; v < K.simplex_count(0); ++v) {
    std::span<const double> x = K.vertex_coordinates(v);
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = x[static_cast<std::size_t>(i)] - profile.center[static_cast<std::size_t>(i)];
      const double P = K.chart_periods()[static_cast<std::size_t>(i)];
      d -= P * std::floor(d / P + 0.5);
      r2 += d * d;
    }
    field[static_cast<std::size_t>(v)] = eval_profile(profile, std::sqrt(r2));
  }
  return field;
}

MetricField apply_conformal(const MetricField& g,
                            std::span<const double> vertex_factors) {
  const SimplicialComplex& K = g.complex();
  const int n = K.dimension();
  if (static_cast<std::int64_t>(vertex_factors.size()) != K.simplex_count(0))
    throw std::invalid_argument("factor field size mismatch");
  for (double f : vertex_factors)
    if (!(f > 0)) throw std::invalid_argument("conformal factor must be positive");
  std::vector<double> grams = g.raw();
  const std::int64_t ntop = K.simplex_count(n);
  for (std::int64_t t = 0; t < ntop; ++t) {
    std::span<const int> top = K.simplex(n, t);
    double mean = 0.0;
    for (int v : top) mean += vertex_factors[static_cast<std::size_t>(v)];
    mean /= (n + 1);
    for (int k = 0; k < n * n; ++k)
      grams[static_cast<std::size_t>(t) * n * n + static_cast<std::size_t>(k)] *= mean;
  }
  return MetricField(g.complex_ptr(), std::move(grams));
}

MetricField apply_conformal_profile(const MetricField& g,
                                    const RadialProfile& profile) {
  const SimplicialComplex& K = g.complex();
  if (!K.has_flat_chart())
    throw std::invalid_argument("conformal profile needs a flat chart");
  const int n = K.dimension();
  const int a = K.coordinate_dimension();
  if (static_cast<int>(profile.center.size()) != a)
    throw std::invalid_argument("profile center dimension mismatch");
  for (double p : K.chart_periods())
    if (!(p > 4.0))
      throw std::invalid_argument(
          "radius-2 profile ball does not embed in the chart");
  std::vector<double> grams = g.raw();
  const std::int64_t ntop = K.simplex_count(n);
  Eigen::MatrixXd pos(a, n + 1);
  Eigen::VectorXd d0(a);
  for (std::int64_t t = 0; t < ntop; ++t) {
    std::span<const int> top = K.simplex(n, t);
    // Anchor the cell at its vertex nearest the center. Every point the
    // profile distinguishes from 1 then sits at its true minimal-image
    // radius: with periods > 4 a cell anchored inside the radius-5/3 ball
    // has no closer wrap for any of its points.
    int anchor = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= n; ++j) {
      std::span<const double> x =
          K.vertex_coordinates(top[static_cast<std::size_t>(j)]);
      double r2 = 0.0;
      for (int i = 0; i < a; ++i) {
        double d = x[static_cast<std::size_t>(i)] -
                   profile.center[static_cast<std::size_t>(i)];
        const double P = K.chart_periods()[static_cast<std::size_t>(i)];
        d -= P * std::floor(d / P + 0.5);
        pos(i, j) = d;
        r2 += d * d;
      }
      if (r2 < best) {
        best = r2;
        anchor = j;
      }
    }
    d0 = pos.col(anchor);
    for (int j = 0; j <= n; ++j) {
      const std::vector<double> e = K.displacement(
          top[static_cast<std::size_t>(anchor)], top[static_cast<std::size_t>(j)]);
      for (int i = 0; i < a; ++i)
        pos(i, j) = d0(i) + e[static_cast<std::size_t>(i)];
    }
    const double vol = std::sqrt(g.gram(t).determinant()) / factorial(n);
    const double c = profile_cell_mass(profile, pos, vol, -1.0, 44) / vol;
    for (int k = 0; k < n * n; ++k)
      grams[static_cast<std::size_t>(t) * n * n + static_cast<std::size_t>(k)] *= c;
  }
  return MetricField(g.complex_ptr(), std::move(grams));
}

double volume(const MetricField& g) {
  const std::int64_t ntop = g.complex().simplex_count(g.complex().dimension());
  double v = 0.0;
  for (std::int64_t t = 0; t < ntop; ++t) v += g.simplex_volume(t);
  return v;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth == 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double profile_volume(const RadialProfile& profile, int n, double box_volume) {
  if (n < 2) throw std::invalid_argument("profile volume needs n >= 2");
  if (!(box_volume > 0))
    throw std::invalid_argument("box volume must be positive");
  const double omega =
      2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
  const auto integrand = [&](double r) {
    return (1.0 - std::pow(eval_profile(profile, r), 0.5 * n)) *
           std::pow(r, n - 1);
  };
  // Integrate between the profile breakpoints so every piece is smooth.
  const double a = std::exp(-profile.length);
  double deficit = 0.0;
  double lo = 0.0;
  for (double hi : {a, 1.0, 4.0 / 3.0, 5.0 / 3.0, 2.0}) {
    deficit += integrate(integrand, lo, hi, 1e-12 * std::max(1.0, box_volume));
    lo = hi;
  }
  return box_volume - omega * deficit;
}

std::pair<MetricField, double> normalize_volume(const MetricField& g) {
  const double v = volume(g);
  if (!(v > 0)) throw std::runtime_error("nonpositive volume");
  const int n = g.complex().dimension();
  const double scale = std::pow(v, -2.0 / n);
  std::vector<double> grams = g.raw();
  for (double& x : grams) x *= scale;
  return {MetricField(g.complex_ptr(), std::move(grams)), scale};
}

double quasi_isometry_ratio(const MetricField& g1, const MetricField& g2) {
  if (&g1.complex() != &g2.complex())
    throw std::invalid_argument("metrics live on different complexes");
  const int n = g1.complex().dimension();
  const std::int64_t ntop = g1.complex().simplex_count(n);
  double alpha2 = 1.0;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  for (std::int64_t t = 0; t < ntop; ++t) {
    solver.compute(g1.gram(t), g2.gram(t), Eigen::EigenvaluesOnly);
    const double hi = solver.eigenvalues().maxCoeff();
    const double lo = solver.eigenvalues().minCoeff();
    alpha2 = std::max({alpha2, hi, 1.0 / lo});
  }
  return std::sqrt(alpha2);
}

std::string metric_to_json(const MetricField& g) {
  nlohmann::ordered_json doc;
  doc["complex"] = nlohmann::ordered_json::parse(complex_to_json(g.complex()));
  const int n = g.complex().dimension();
  nlohmann::ordered_json grams = nlohmann::ordered_json::array();
  const std::int64_t ntop = g.complex().simplex_count(n);
  for (std::int64_t t = 0; t < ntop; ++t) {
    Eigen::Map<const Eigen::MatrixXd> m = g.gram(t);
    std::vector<double> lower;  // row-major lower triangle
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) lower.push_back(m(i, j));
    grams.push_back(std::move(lower));
  }
  doc["grams"] = std::move(grams);
  return doc.dump();
}

MetricField metric_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  ComplexPtr K = complex_from_json(doc.at("complex").dump());
  const int n = K->dimension();
  const auto& grams_in = doc.at("grams");
  std::vector<double> grams;
  grams.reserve(grams_in.size() * static_cast<std::size_t>(n) *
                static_cast<std::size_t>(n));
  for (const auto& row : grams_in) {
    const std::vector<double> lower = row.get<std::vector<double>>();
    if (static_cast<int>(lower.size()) != n * (n + 1) / 2)
      throw std::invalid_argument("gram triangle size mismatch");
    Eigen::MatrixXd m(n, n);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        m(i, j) = lower[k];
        m(j, i) = lower[k];
        ++k;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) grams.push_back(m(i, j));
  }
  return MetricField(std::move(K), std::move(grams));
}

}  // namespace hodge
