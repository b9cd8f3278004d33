#pragma once

#include <cstdint>

#include "hodge/complex.hpp"
#include "hodge/metric.hpp"
#include "hodge/sparse.hpp"

namespace hodge {

/// Space of Whitney p-forms: one basis form per p-simplex.
struct FormSpace {
  const SimplicialComplex* complex = nullptr;
  int degree = 0;
  std::int64_t dimension = 0;
};

FormSpace form_space(const SimplicialComplex& K, int p);

/// Mass matrix M_p with entries sum over top simplices of the exact
/// constant-metric integral of <w_sigma, w_tau>_g dvol_g. Symmetric positive
/// definite; only p-simplices sharing a top coface couple.
SparseOperator whitney_mass(const MetricField& g, int p);

/// Stiffness K_p = D_p^T M_{p+1} D_p (symmetric positive semidefinite,
/// kernel = closed p-cochains). For p = n the operator is zero.
SparseOperator stiffness(const MetricField& g, int p);

}  // namespace hodge
