#include "hodge_spectra.h"

#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hodge/analytic.hpp"
#include "hodge/assembly.hpp"
#include "hodge/complex.hpp"
#include "hodge/eigensolve.hpp"
#include "hodge/experiments.hpp"
#include "hodge/metric.hpp"
#include "hodge/sparse.hpp"

struct hs_complex {
  hodge::ComplexPtr ptr;
};

struct hs_metric {
  hodge::MetricField field;
};

struct hs_spectrum {
  hodge::SpectrumTable table;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
hs_status guarded(Fn&& fn) {
  try {
    fn();
    return HS_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return HS_ERROR_INVALID_ARGUMENT;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return HS_ERROR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HS_ERROR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HS_ERROR_RUNTIME;
  }
}

hs_status bad_handle(const char* what) {
  g_last_error = std::string("null ") + what + " handle";
  return HS_ERROR_BAD_HANDLE;
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

std::vector<double> center_argument(const double* center, int center_len) {
  if (center == nullptr) return {};
  if (center_len <= 0)
    throw std::invalid_argument("center length must be positive");
  return std::vector<double>(center, center + center_len);
}

}  // namespace

extern "C" {

const char* hs_last_error(void) { return g_last_error.c_str(); }

void hs_string_free(char* text) { delete[] text; }

hs_status hs_complex_build_torus(int n, int cells_per_axis, double spacing,
                                 hs_complex** out) {
  if (out == nullptr) return bad_handle("output");
  return guarded([&] {
    *out = new hs_complex{hodge::build_torus(n, cells_per_axis, spacing)};
  });
}

hs_status hs_complex_build_sphere(int m, int refinement, hs_complex** out) {
  if (out == nullptr) return bad_handle("output");
  return guarded(
      [&] { *out = new hs_complex{hodge::build_sphere(m, refinement)}; });
}

hs_status hs_complex_grade_radial(const hs_complex* complex,
                                  const double* center, int center_len,
                                  double rate, hs_complex** out) {
  if (complex == nullptr || complex->ptr == nullptr)
    return bad_handle("complex");
  if (out == nullptr) return bad_handle("output");
  return guarded([&] {
    const std::vector<double> c = center_argument(center, center_len);
    if (c.empty()) throw std::invalid_argument("center is required");
    *out = new hs_complex{hodge::apply_radial_grading(*complex->ptr, c, rate)};
  });
}

void hs_complex_free(hs_complex* complex) { delete complex; }

hs_status hs_complex_dimension(const hs_complex* complex, int* out) {
  if (complex == nullptr || complex->ptr == nullptr)
    return bad_handle("complex");
  if (out == nullptr) return bad_handle("output");
  *out = complex->ptr->dimension();
  return HS_OK;
}

hs_status hs_complex_simplex_count(const hs_complex* complex, int degree,
                                   int64_t* out) {
  if (complex == nullptr || complex->ptr == nullptr)
    return bad_handle("complex");
  if (out == nullptr) return bad_handle("output");
  return guarded([&] { *out = complex->ptr->simplex_count(degree); });
}

hs_status hs_complex_betti(const hs_complex* complex, int degree,
                           int64_t* out) {
  if (complex == nullptr || complex->ptr == nullptr)
    return bad_handle("complex");
  if (out == nullptr) return bad_handle("output");
  return guarded([&] {
    if (degree < 0 || degree > complex->ptr->dimension())
      throw std::invalid_argument("degree out of range");
    *out = complex->ptr->betti()[static_cast<std::size_t>(degree)];
  });
}

hs_status hs_complex_to_json(const hs_complex* complex, char** out) {
  if (complex == nullptr || complex->ptr == nullptr)
    return bad_handle("complex");
  if (out == nullptr) return bad_handle("output");
  return guarded(
      [&] { *out = copy_string(hodge::complex_to_json(*complex->ptr)); });
}

hs_status hs_metric_flat(const hs_complex* complex, hs_metric** out) {
  if (complex == nullptr || complex->ptr == nullptr)
    return bad_handle("complex");
  if (out == nullptr) return bad_handle("output");
  return guarded(
      [&] { *out = new hs_metric{hodge::flat_metric(complex->ptr)}; });
}

hs_status hs_metric_apply_cigar(const hs_metric* metric, double length,
                                const double* center, int center_len,
                                hs_metric** out) {
  if (metric == nullptr) return bad_handle("metric");
  if (out == nullptr) return bad_handle("output");
  return guarded([&] {
    const hodge::SimplicialComplex& K = metric->field.complex();
    hodge::RadialProfile profile;
    profile.length = length;
    profile.center = center_argument(center, center_len);
    if (profile.center.empty()) {
      for (double period : K.chart_periods())
        profile.center.push_back(0.5 * period);
    }
    *out = new hs_metric{hodge::apply_conformal(
        metric->field, hodge::cigar_factor_field(K, profile))};
  });
}

hs_status hs_metric_volume(const hs_metric* metric, double* out) {
  if (metric == nullptr) return bad_handle("metric");
  if (out == nullptr) return bad_handle("output");
  return guarded([&] { *out = hodge::volume(metric->field); });
}

hs_status hs_metric_normalize_volume(const hs_metric* metric, hs_metric** out,
                                     double* scale_out) {
  if (metric == nullptr) return bad_handle("metric");
  return guarded([&] {
    auto [normalized, scale] = hodge::normalize_volume(metric->field);
    if (scale_out != nullptr) *scale_out = scale;
    if (out != nullptr) *out = new hs_metric{std::move(normalized)};
  });
}

void hs_metric_free(hs_metric* metric) { delete metric; }

hs_status hs_spectrum_full(const hs_metric* metric, int degree, int count,
                           uint64_t seed, hs_spectrum** out) {
  if (metric == nullptr) return bad_handle("metric");
  if (out == nullptr) return bad_handle("output");
  return guarded([&] {
    hodge::EigenOptions opts;
    opts.count = count;
    opts.seed = seed;
    *out = new hs_spectrum{
        hodge::full_spectrum(metric->field, degree, count, opts)};
  });
}

hs_status hs_spectrum_size(const hs_spectrum* spectrum, int64_t* out) {
  if (spectrum == nullptr) return bad_handle("spectrum");
  if (out == nullptr) return bad_handle("output");
  *out = static_cast<int64_t>(spectrum->table.entries.size());
  return HS_OK;
}

hs_status hs_spectrum_entry(const hs_spectrum* spectrum, int64_t index,
                            double* value, int* multiplicity,
                            const char** class_name) {
  if (spectrum == nullptr) return bad_handle("spectrum");
  return guarded([&] {
    if (index < 0 ||
        index >= static_cast<int64_t>(spectrum->table.entries.size()))
      throw std::invalid_argument("spectrum entry index out of range");
    const hodge::SpectrumEntry& e =
        spectrum->table.entries[static_cast<std::size_t>(index)];
    if (value != nullptr) *value = e.value;
    if (multiplicity != nullptr) *multiplicity = e.multiplicity;
    if (class_name != nullptr) {
      switch (e.cls) {
        case hodge::SpectralClass::Harmonic: *class_name = "harmonic"; break;
        case hodge::SpectralClass::Exact: *class_name = "exact"; break;
        default: *class_name = "coexact"; break;
      }
    }
  });
}

hs_status hs_spectrum_to_csv(const hs_spectrum* spectrum, char** out) {
  if (spectrum == nullptr) return bad_handle("spectrum");
  if (out == nullptr) return bad_handle("output");
  return guarded(
      [&] { *out = copy_string(hodge::spectrum_to_csv(spectrum->table)); });
}

hs_status hs_spectrum_to_json(const hs_spectrum* spectrum, char** out) {
  if (spectrum == nullptr) return bad_handle("spectrum");
  if (out == nullptr) return bad_handle("output");
  return guarded(
      [&] { *out = copy_string(hodge::spectrum_to_json(spectrum->table)); });
}

void hs_spectrum_free(hs_spectrum* spectrum) { delete spectrum; }

hs_status hs_operator_matrix_market(const hs_metric* metric, const char* which,
                                    int degree, char** out) {
  if (metric == nullptr) return bad_handle("metric");
  if (out == nullptr) return bad_handle("output");
  return guarded([&] {
    if (which == nullptr) throw std::invalid_argument("operator name is null");
    hodge::SparseOperator op = [&] {
      const std::string name = which;
      if (name == "mass") return hodge::whitney_mass(metric->field, degree);
      if (name == "stiffness") return hodge::stiffness(metric->field, degree);
      throw std::invalid_argument("operator must be 'mass' or 'stiffness'");
    }();
    std::ostringstream text;
    op.write_matrix_market(text);
    *out = copy_string(text.str());
  });
}

hs_status hs_experiment_run(const char* config_json, const char* out_dir,
                            int* exit_code) {
  if (config_json == nullptr || out_dir == nullptr)
    return bad_handle("argument");
  return guarded([&] {
    const nlohmann::json doc = nlohmann::json::parse(config_json);
    const hodge::ExperimentConfig cfg =
        hodge::experiment_config_from_json(doc);
    const hodge::ExperimentReport report = hodge::run_experiment(cfg);
    const int code = hodge::write_experiment_outputs(report, out_dir);
    if (exit_code != nullptr) *exit_code = code;
  });
}

hs_status hs_theorem_curve_csv(int n, int p, const double* lengths,
                               int num_lengths, double fixed_part_volume,
                               char** out) {
  if (out == nullptr) return bad_handle("output");
  return guarded([&] {
    if (lengths == nullptr || num_lengths <= 0)
      throw std::invalid_argument("lengths array is required");
    const std::vector<double> ls(lengths, lengths + num_lengths);
    *out = copy_string(hodge::theorem_curve_to_csv(
        hodge::theorem_curve(n, p, ls, fixed_part_volume)));
  });
}

}  // extern "C"
