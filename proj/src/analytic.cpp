#include "hodge/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hodge {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t falling_product(std::uint64_t from, int terms) {
  std::uint64_t out = 1;
  for (int i = 0; i < terms; ++i) out *= from + static_cast<std::uint64_t>(i);
  return out;
}

std::uint64_t factorial_u64(int n) {
  std::uint64_t out = 1;
  for (int i = 2; i <= n; ++i) out *= static_cast<std::uint64_t>(i);
  return out;
}

/// Multiplicity of the k-th coexact p-form eigenvalue on S^m.
int sphere_coexact_multiplicity(int k, int p, int m) {
  const std::uint64_t num =
      static_cast<std::uint64_t>(2 * k + m - 1) *
      falling_product(static_cast<std::uint64_t>(k), m);
  const std::uint64_t den = factorial_u64(p) * factorial_u64(m - p - 1) *
                            static_cast<std::uint64_t>(k + p) *
                            static_cast<std::uint64_t>(k + m - p - 1);
  if (num % den != 0)
    throw std::logic_error("sphere multiplicity is not integral");
  return static_cast<int>(num / den);
}

/// Sorts by value and merges entries within relative tolerance.
AnalyticSpectrum merge_entries(AnalyticSpectrum entries, int count) {
  std::sort(entries.begin(), entries.end(),
            [](const AnalyticEntry& a, const AnalyticEntry& b) {
              return a.value < b.value;
            });
  AnalyticSpectrum out;
  for (const AnalyticEntry& e : entries) {
    if (!out.empty() &&
        e.value - out.back().value <= 1e-12 * std::abs(out.back().value)) {
      out.back().multiplicity += e.multiplicity;
    } else {
      if (static_cast<int>(out.size()) == count) break;
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace

AnalyticSpectrum sphere_coexact_spectrum(int m, int p, int count) {
  if (m < 1) throw std::invalid_argument("sphere dimension must be positive");
  if (p < 0 || p > m - 1)
    throw std::invalid_argument("coexact degree must lie in [0, m-1]");
  if (count < 0) throw std::invalid_argument("count must be nonnegative");
  AnalyticSpectrum out;
  for (int k = 1; k <= count; ++k) {
    const double value = static_cast<double>(k + p) *
                         static_cast<double>(k + m - p - 1);
    out.push_back({value, sphere_coexact_multiplicity(k, p, m)});
  }
  return out;
}

AnalyticSpectrum sphere_form_spectrum(int m, int p, int count) {
  if (p < 0 || p > m) throw std::invalid_argument("degree out of range");
  if (count < 0) throw std::invalid_argument("count must be nonnegative");
  AnalyticSpectrum entries;
  if (p == 0 || p == m) entries.push_back({0.0, 1});
  if (p >= 1) {
    // Exact p-forms carry the coexact (p-1)-form eigenvalues.
    for (const AnalyticEntry& e : sphere_coexact_spectrum(m, p - 1, count))
      entries.push_back(e);
  }
  if (p <= m - 1) {
    for (const AnalyticEntry& e : sphere_coexact_spectrum(m, p, count))
      entries.push_back(e);
  }
  return merge_entries(std::move(entries), count);
}

AnalyticSpectrum interval_form_spectrum(double L, int p, int count) {
  if (!(L > 0)) throw std::invalid_argument("interval length must be positive");
  if (p != 0 && p != 1)
    throw std::invalid_argument("interval carries only degrees 0 and 1");
  if (count < 0) throw std::invalid_argument("count must be nonnegative");
  AnalyticSpectrum out;
  if (p == 0) out.push_back({0.0, 1});  // Neumann constant
  const int modes = p == 0 ? count - 1 : count;
  for (int k = 1; k <= modes; ++k) {
    const double w = static_cast<double>(k) * kPi / L;
    out.push_back({w * w, 1});
  }
  return out;
}

AnalyticFactor interval_factor(double L) {
  if (!(L > 0)) throw std::invalid_argument("interval length must be positive");
  AnalyticFactor f;
  f.dimension = 1;
  f.forms = [L](int degree, int count) {
    return interval_form_spectrum(L, degree, count);
  };
  return f;
}

AnalyticFactor sphere_factor(int m) {
  if (m < 1) throw std::invalid_argument("sphere dimension must be positive");
  AnalyticFactor f;
  f.dimension = m;
  f.forms = [m](int degree, int count) {
    return sphere_form_spectrum(m, degree, count);
  };
  return f;
}

AnalyticSpectrum product_form_spectrum(const AnalyticFactor& a,
                                       const AnalyticFactor& b, int p,
                                       int count) {
  if (!a.forms || !b.forms)
    throw std::invalid_argument("factor generator missing");
  if (p < 0 || p > a.dimension + b.dimension)
    throw std::invalid_argument("degree out of range for the product");
  if (count < 0) throw std::invalid_argument("count must be nonnegative");
  AnalyticSpectrum sums;
  const int lo = std::max(0, p - b.dimension);
  const int hi = std::min(p, a.dimension);
  for (int i = lo; i <= hi; ++i) {
    const AnalyticSpectrum sa = a.forms(i, count + 1);
    const AnalyticSpectrum sb = b.forms(p - i, count + 1);
    for (const AnalyticEntry& ea : sa)
      for (const AnalyticEntry& eb : sb)
        sums.push_back({ea.value + eb.value,
                        ea.multiplicity * eb.multiplicity});
  }
  return merge_entries(std::move(sums), count);
}

double first_positive(const AnalyticSpectrum& spectrum) {
  for (const AnalyticEntry& e : spectrum)
    if (e.value > 0.0) return e.value;
  throw std::out_of_range("spectrum lists no positive eigenvalue");
}

double sphere_volume(int m) {
  if (m < 1) throw std::invalid_argument("sphere dimension must be positive");
  const double half = 0.5 * static_cast<double>(m + 1);
  return 2.0 * std::pow(kPi, half) / std::tgamma(half);
}

double cylinder_lower_bound(int n, int p) {
  if (n < 3) throw std::invalid_argument("cylinder requires dimension >= 3");
  if (p < 1 || p > n - 1) throw std::invalid_argument("degree out of range");
  const double above = first_positive(sphere_form_spectrum(n - 1, p, 4));
  const double below = first_positive(sphere_form_spectrum(n - 1, p - 1, 4));
  return std::min(above, below);
}

std::vector<TheoremCurveRow> theorem_curve(int n, int p,
                                           const std::vector<double>& lengths,
                                           double fixed_part_volume) {
  if (n < 3) throw std::invalid_argument("curve requires dimension >= 3");
  if (p < 1 || p > n - 1) throw std::invalid_argument("degree out of range");
  if (!(fixed_part_volume >= 0))
    throw std::invalid_argument("fixed part volume must be nonnegative");
  const double section = sphere_volume(n - 1);
  std::vector<TheoremCurveRow> rows;
  for (double L : lengths) {
    if (!(L > 0)) throw std::invalid_argument("lengths must be positive");
    TheoremCurveRow row;
    row.length = L;
    row.mu = first_positive(
        product_form_spectrum(interval_factor(L), sphere_factor(n - 1), p, 24));
    row.volume = fixed_part_volume + L * section;
    row.product = std::pow(row.volume, 2.0 / n) * row.mu;
    rows.push_back(row);
  }
  return rows;
}

std::string theorem_curve_to_csv(const std::vector<TheoremCurveRow>& rows) {
  std::ostringstream out;
  out << "L,mu,V,product\n";
  char buf[160];
  for (const TheoremCurveRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g", r.length, r.mu,
                  r.volume, r.product);
    out << buf << "\n";
  }
  return out.str();
}

}  // namespace hodge
