#include "hodge/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "hodge/combinatorics.hpp"

namespace hodge {

namespace {

double det_small(const double* m, int k) {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return m[0];
    case 2:
      return m[0] * m[3] - m[1] * m[2];
    case 3:
      return m[0] * (m[4] * m[8] - m[5] * m[7]) -
             m[1] * (m[3] * m[8] - m[5] * m[6]) +
             m[2] * (m[3] * m[7] - m[4] * m[6]);
    case 4: {
      const double s0 = m[0] * m[5] - m[1] * m[4];
      const double s1 = m[0] * m[6] - m[2] * m[4];
      const double s2 = m[0] * m[7] - m[3] * m[4];
      const double s3 = m[1] * m[6] - m[2] * m[5];
      const double s4 = m[1] * m[7] - m[3] * m[5];
      const double s5 = m[2] * m[7] - m[3] * m[6];
      const double c5 = m[10] * m[15] - m[11] * m[14];
      const double c4 = m[9] * m[15] - m[11] * m[13];
      const double c3 = m[9] * m[14] - m[10] * m[13];
      const double c2 = m[8] * m[15] - m[11] * m[12];
      const double c1 = m[8] * m[14] - m[10] * m[12];
      const double c0 = m[8] * m[13] - m[9] * m[12];
      return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
    }
    default:
      throw std::logic_error("determinant size out of range");
  }
}

}  // namespace

FormSpace form_space(const SimplicialComplex& K, int p) {
  if (p < 0 || p > K.dimension())
    throw std::invalid_argument("form degree out of range");
  return {&K, p, K.simplex_count(p)};
}

SparseOperator whitney_mass(const MetricField& g, int p) {
  const SimplicialComplex& K = g.complex();
  const int n = K.dimension();
  if (p < 0 || p > n) throw std::invalid_argument("form degree out of range");

  const auto subsets = k_subsets(n + 1, p + 1);
  const int ns = static_cast<int>(subsets.size());
  const std::vector<std::int64_t>& faces = K.top_faces(p);
  const std::int64_t ntop = K.simplex_count(n);
  const double pf = factorial_real(p);
  const double scale0 = pf * pf / ((n + 1.0) * (n + 2.0));

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(ntop) * static_cast<std::size_t>(ns) *
                  static_cast<std::size_t>(ns));

  Eigen::MatrixXd Q(n + 1, n + 1);
  std::vector<double> qsub(static_cast<std::size_t>((p + 1) * (p + 1)));
  std::vector<double> minor(static_cast<std::size_t>(p * p));

  for (std::int64_t t = 0; t < ntop; ++t) {
    const Eigen::MatrixXd gi = g.gram(t).inverse();
    // Barycentric gradient inner products: rows/cols 1..n are G^{-1};
    // gradient 0 is minus the sum of the others.
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) Q(i, j) = gi(i - 1, j - 1);
    for (int j = 1; j <= n; ++j) {
      double s = 0.0;
      for (int i = 1; i <= n; ++i) s += gi(i - 1, j - 1);
      Q(0, j) = -s;
      Q(j, 0) = -s;
    }
    Q(0, 0) = gi.sum();
    const double w = g.simplex_volume(t) * scale0;

    for (int si = 0; si < ns; ++si) {
      for (int ti = si; ti < ns; ++ti) {
        const std::vector<int>& sig = subsets[static_cast<std::size_t>(si)];
        const std::vector<int>& tau = subsets[static_cast<std::size_t>(ti)];
        for (int a = 0; a <= p; ++a)
          for (int b = 0; b <= p; ++b)
            qsub[static_cast<std::size_t>(a * (p + 1) + b)] =
                Q(sig[static_cast<std::size_t>(a)], tau[static_cast<std::size_t>(b)]);
        double sum = 0.0;
        for (int j = 0; j <= p; ++j) {
          for (int k = 0; k <= p; ++k) {
            int idx = 0;
            for (int a = 0; a <= p; ++a) {
              if (a == j) continue;
              for (int b = 0; b <= p; ++b) {
                if (b == k) continue;
                minor[static_cast<std::size_t>(idx++)] =
                    qsub[static_cast<std::size_t>(a * (p + 1) + b)];
              }
            }
            const double dd = det_small(minor.data(), p);
            const double delta =
                sig[static_cast<std::size_t>(j)] == tau[static_cast<std::size_t>(k)]
                    ? 2.0
                    : 1.0;
            sum += (((j + k) % 2 == 0) ? 1.0 : -1.0) * delta * dd;
          }
        }
        const double value = w * sum;
        const int gi_row = static_cast<int>(faces[t * ns + si]);
        const int gi_col = static_cast<int>(faces[t * ns + ti]);
        entries.push_back({gi_row, gi_col, value});
        if (ti != si) entries.push_back({gi_col, gi_row, value});
      }
    }
  }
  return SparseOperator::from_triplets(static_cast<int>(K.simplex_count(p)),
                                       static_cast<int>(K.simplex_count(p)),
                                       std::move(entries), true);
}

SparseOperator stiffness(const MetricField& g, int p) {
  const SimplicialComplex& K = g.complex();
  const int n = K.dimension();
  if (p < 0 || p > n) throw std::invalid_argument("form degree out of range");
  const int np = static_cast<int>(K.simplex_count(p));
  if (p == n) return SparseOperator::from_triplets(np, np, {}, true);

  const Eigen::SparseMatrix<double> D = K.coboundary(p).to_eigen();
  const Eigen::SparseMatrix<double> M = whitney_mass(g, p + 1).to_eigen();
  Eigen::SparseMatrix<double> Kp = D.transpose() * (M * D).eval();
  Eigen::SparseMatrix<double> KpT = Kp.transpose();
  Eigen::SparseMatrix<double> sym = 0.5 * (Kp + KpT);
  sym.prune(0.0);
  return SparseOperator::from_eigen(sym, true);
}

}  // namespace hodge
