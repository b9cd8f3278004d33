#include "hodge/eigensolve.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hodge {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct PencilContext {
  const MetricField* metric = nullptr;
  int q = 0;
  SpMat K;       // stiffness on q-cochains
  SpMat M;       // mass on q-cochains
  SpMat D_down;  // D_{q-1}, empty when q == 0
  SpMat K_down;  // D_{q-1}^T M_q D_{q-1}, empty when q == 0
};

PencilContext make_context(const MetricField& g, int q) {
  const SimplicialComplex& K = g.complex();
  if (q < 0 || q > K.dimension())
    throw std::invalid_argument("pencil degree out of range");
  PencilContext ctx;
  ctx.metric = &g;
  ctx.q = q;
  ctx.K = stiffness(g, q).to_eigen();
  ctx.M = whitney_mass(g, q).to_eigen();
  if (q >= 1) {
    ctx.D_down = K.coboundary(q - 1).to_eigen();
    SpMat prod = ctx.D_down.transpose() * (ctx.M * ctx.D_down).eval();
    SpMat prod_t = prod.transpose();
    ctx.K_down = 0.5 * (prod + prod_t);
  }
  return ctx;
}

/// Preconditioned CG. Works for positive definite systems and for singular
/// positive semidefinite ones with consistent right-hand sides (iterates
/// stay in the range of A).
class PcgSolver {
 public:
  void init(const SpMat& A) {
    A_ = &A;
    ic_.setInitialShift(1e-3);
    ic_.compute(A);
    use_ic_ = ic_.info() == Eigen::Success;
    if (!use_ic_) {
      inv_diag_ = A.diagonal();
      for (int i = 0; i < inv_diag_.size(); ++i)
        inv_diag_[i] = inv_diag_[i] > 0 ? 1.0 / inv_diag_[i] : 1.0;
    }
  }

  /// Solves to a residual of max(tol * |b|, abs_floor). The floor matters
  /// for singular systems whose right-hand side is roundoff noise around an
  /// exactly consistent one: the part below the floor is not solvable.
  VectorXd solve(const VectorXd& b, double tol, int cap, int* iter_accum,
                 const char* what, double abs_floor = 0.0) const {
    VectorXd x = VectorXd::Zero(b.size());
    const double bnorm = b.norm();
    const double target = std::max(tol * bnorm, abs_floor);
    if (bnorm <= target) return x;
    VectorXd r = b;
    VectorXd z = precondition(r);
    VectorXd p = z;
    double rz = r.dot(z);
    double rnorm = bnorm;
    for (int it = 0; it < cap; ++it) {
      const VectorXd Ap = (*A_) * p;
      const double pAp = p.dot(Ap);
      if (!(pAp > 0)) break;  // numerically null direction
      const double alpha = rz / pAp;
      x += alpha * p;
      r -= alpha * Ap;
      if (iter_accum) ++*iter_accum;
      rnorm = r.norm();
      if (rnorm <= target) return x;
      z = precondition(r);
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    if (rnorm > std::max(1e-7 * bnorm, abs_floor))
      throw std::runtime_error(std::string("inner solve stagnated (") + what +
                               "), relative residual " +
                               std::to_string(rnorm / bnorm));
    return x;
  }

 private:
  VectorXd precondition(const VectorXd& r) const {
    if (use_ic_) return ic_.solve(r);
    return inv_diag_.cwiseProduct(r);
  }

  const SpMat* A_ = nullptr;
  Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::AMDOrdering<int>> ic_;
  bool use_ic_ = false;
  VectorXd inv_diag_;
};

/// M-orthogonal projector onto the complement of ker K_q = exact + harmonic
/// q-cochains. The exact part is removed through a stiffness solve one
/// degree down; the harmonic part through a verified M-orthonormal basis
/// built from closed representative cochains.
class KernelProjector {
 public:
  void build(const PencilContext& ctx,
             const std::vector<std::vector<double>>& reps,
             const EigenOptions& opts, int* iter_accum) {
    ctx_ = &ctx;
    iter_accum_ = iter_accum;
    cap_ = opts.max_iterations;
    use_exact_ = ctx.q >= 1 && ctx.D_down.cols() > 0;
    if (use_exact_) cg_down_.init(ctx.K_down);

    const std::int64_t n = ctx.M.rows();
    if (!reps.empty()) {
      // Representatives must be closed cochains.
      const SimplicialComplex& K = ctx.metric->complex();
      if (ctx.q < K.dimension()) {
        const SpMat D_here = K.coboundary(ctx.q).to_eigen();
        for (const auto& z : reps) {
          const Eigen::Map<const VectorXd> zv(z.data(),
                                              static_cast<Eigen::Index>(z.size()));
          const double scale = zv.cwiseAbs().maxCoeff();
          if ((D_here * zv).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1e-300))
            throw std::runtime_error(
                "cohomology representative is not closed");
        }
      }
      MatrixXd H(n, static_cast<Eigen::Index>(reps.size()));
      for (std::size_t i = 0; i < reps.size(); ++i)
        H.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const VectorXd>(reps[i].data(),
                                       static_cast<Eigen::Index>(reps[i].size()));
      if (use_exact_) {
        for (Eigen::Index c = 0; c < H.cols(); ++c)
          H.col(c) -= exact_part(H.col(c));
      }
      // M-orthonormalize; a rank-deficient Gram matrix means the
      // representatives failed to span independent classes.
      MatrixXd MH = ctx.M * H;
      Eigen::LLT<MatrixXd> llt(H.transpose() * MH);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "harmonic representatives are dependent after exact-part removal");
      const MatrixXd rinv = MatrixXd(llt.matrixL())
                                .triangularView<Eigen::Lower>()
                                .solve(MatrixXd::Identity(H.cols(), H.cols()))
                                .transpose();
      H_ = H * rinv;
      MH_ = ctx.M * H_;
    }
  }

  std::int64_t harmonic_dim() const { return H_.cols(); }

  void apply(Eigen::Ref<MatrixXd> X) const {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      if (use_exact_) X.col(c) -= exact_part(X.col(c));
    }
    if (H_.cols() > 0) X -= H_ * (MH_.transpose() * X).eval();
  }

 private:
  VectorXd exact_part(const VectorXd& x) const {
    const VectorXd Mx = ctx_->M * x;
    const VectorXd rhs = ctx_->D_down.transpose() * Mx;
    // Shift-invert preserves the splitting, so most iterates carry only a
    // roundoff-sized exact component; the floor keeps the singular solve
    // from chasing that noise.
    const VectorXd y = cg_down_.solve(rhs, 1e-12, cap_, iter_accum_,
                                      "kernel projector", 1e-13 * Mx.norm());
    return ctx_->D_down * y;
  }

  const PencilContext* ctx_ = nullptr;
  PcgSolver cg_down_;
  bool use_exact_ = false;
  MatrixXd H_, MH_;
  int* iter_accum_ = nullptr;
  int cap_ = 10000;
};

double pencil_residual(const PencilContext& ctx, const VectorXd& u,
                       double lambda) {
  const VectorXd Ku = ctx.K * u;
  const VectorXd Mu = ctx.M * u;
  const double denom = Ku.norm() + lambda * Mu.norm();
  if (denom == 0.0) return 0.0;
  return (Ku - lambda * Mu).norm() / denom;
}

/// Shift-invert block Lanczos at shift -1: iterates T = P (K+M)^{-1} M in
/// the M-inner product on the complement of ker K. Eigenvalues of T are
/// theta = 1/(1+lambda); the kernel (theta = 1) is projected out exactly, so
/// the largest remaining theta give the smallest positive lambda. The basis
/// is kept fully M-orthonormal, and when the column budget fills the
/// iteration thick-restarts from the leading Ritz vectors instead of
/// giving up.
PencilResult sparse_pencil(const PencilContext& ctx,
                           const std::vector<std::vector<double>>& reps,
                           int count, const EigenOptions& opts) {
  const std::int64_t n = ctx.M.rows();
  PencilResult out;
  out.info.pencil_degree = ctx.q;
  out.info.pencil_dim = static_cast<int>(n);
  out.info.dense = false;
  out.info.tolerance = opts.tolerance;
  out.info.seed = opts.seed;

  SpMat A = ctx.K + ctx.M;
  PcgSolver cg_a;
  cg_a.init(A);

  KernelProjector proj;
  proj.build(ctx, reps, opts, &out.info.inner_iterations);
  out.kernel_dim = proj.harmonic_dim();

  if (count > 30)
    throw std::invalid_argument(
        "iterative path supports at most 30 eigenvalues per pencil");
  int b = static_cast<int>(
      std::min<std::int64_t>(std::clamp(count + 2, 4, 32), n));

  // Dimension of the M-orthogonal complement of ker K_q, i.e. the number of
  // positive pencil eigenvalues. Computed only when the basis threatens to
  // exhaust it, which happens on small pencils; the rank is cached.
  std::int64_t complement = -1;
  auto complement_dim = [&]() {
    if (complement < 0) complement = ctx.metric->complex().coboundary_rank(ctx.q);
    return complement;
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_block = [&](Eigen::Index block) {
    MatrixXd X(n, block);
    for (Eigen::Index j = 0; j < block; ++j)
      for (Eigen::Index i = 0; i < n; ++i) X(i, j) = gauss(rng);
    return X;
  };

  MatrixXd basis, mbasis;
  Eigen::Index cols = 0;

  // M-orthonormalizes W against the stored basis and itself through the
  // eigendecomposition of the Gram matrix, so W_in = W_out * R for the
  // returned factor R. A false return means W carries fewer than b
  // independent directions beyond the basis, i.e. the explored subspace is
  // (numerically) invariant. The kernel projection is reapplied first:
  // the recurrence subtraction shrinks W, which would otherwise let
  // projector slop from the previous application grow relatively large.
  auto orthonormalize = [&](MatrixXd& W, MatrixXd& R) {
    proj.apply(W);
    for (int pass = 0; pass < 2; ++pass) {
      if (cols > 0) {
        const MatrixXd C = mbasis.leftCols(cols).transpose() * W;
        W -= basis.leftCols(cols) * C;
      }
    }
    const MatrixXd MW = ctx.M * W;
    Eigen::SelfAdjointEigenSolver<MatrixXd> gram(W.transpose() * MW);
    const VectorXd& g = gram.eigenvalues();
    const double gmax = g.size() > 0 ? g.maxCoeff() : 0.0;
    if (!(gmax > 0.0) || g.minCoeff() < 1e-14 * gmax) return false;
    const VectorXd root = g.cwiseSqrt();
    W = (W * gram.eigenvectors() * root.cwiseInverse().asDiagonal()).eval();
    R = root.asDiagonal() * gram.eigenvectors().transpose();
    return true;
  };

  MatrixXd V = random_block(b);
  proj.apply(V);
  MatrixXd R(b, b);
  bool seeded = orthonormalize(V, R);
  for (int attempt = 0; !seeded && attempt < 3; ++attempt) {
    V = random_block(b);
    proj.apply(V);
    seeded = orthonormalize(V, R);
  }
  if (!seeded) {
    // Fewer than b directions exist outside ker K_q; shrink the block to
    // the exact complement dimension (zero means an empty positive spectrum).
    const std::int64_t comp = complement_dim();
    if (comp == 0) return out;
    b = static_cast<int>(std::min<std::int64_t>(comp, b));
    V = random_block(b);
    proj.apply(V);
    R.resize(b, b);
    if (!orthonormalize(V, R))
      throw std::runtime_error("failed to seed the Lanczos basis");
  }

  const Eigen::Index max_cols =
      std::min<Eigen::Index>(n, std::max(480, 14 * b));
  const int step_budget =
      std::max(1, std::min<int>(opts.max_iterations,
                                40 * static_cast<int>(max_cols / b)));
  basis.resize(n, max_cols);
  mbasis.resize(n, max_cols);
  basis.middleCols(0, b) = V;
  mbasis.middleCols(0, b) = ctx.M * V;
  cols = b;

  // Images T * basis and the projected operator matrix H = basis^T M T basis,
  // assembled explicitly one block column at a time. Building H from the
  // operator action rather than the three-term recurrence keeps the
  // Rayleigh-Ritz data exact under full reorthogonalization, and both
  // matrices transform by the same orthogonal factor when the basis is
  // compressed, which is what makes restarting possible.
  MatrixXd tbasis(n, max_cols);
  MatrixXd H = MatrixXd::Zero(max_cols, max_cols);

  const int extra = std::min(b, 4);
  std::vector<double> final_residuals;

  // Fills the basis with random projected directions up to `target` columns.
  auto pad_basis_to = [&](std::int64_t target) {
    while (cols < target) {
      VectorXd v;
      bool ok = false;
      for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
        MatrixXd X = random_block(1);
        proj.apply(X);
        v = X.col(0);
        const double before = v.dot((ctx.M * v).eval());
        for (int pass = 0; pass < 2; ++pass)
          v -= basis.leftCols(cols) *
               (mbasis.leftCols(cols).transpose() * v).eval();
        const double after = v.dot((ctx.M * v).eval());
        if (after > 1e-14 * before && after > 0.0) {
          v /= std::sqrt(after);
          ok = true;
        }
      }
      if (!ok)
        throw std::runtime_error("failed to span the pencil complement");
      basis.col(cols) = v;
      mbasis.col(cols) = ctx.M * v;
      ++cols;
    }
  };

  // Once the basis spans the whole complement of ker K_q, a dense
  // Rayleigh-Ritz in this M-orthonormal basis is exact: the projected
  // pencil is (B^T K B, I) and its spectrum is the complete positive
  // spectrum of the cochain pencil.
  auto exact_subspace_extraction = [&]() -> PencilResult {
    const MatrixXd B = basis.leftCols(cols);
    MatrixXd Hc = B.transpose() * (ctx.K * B).eval();
    Hc = 0.5 * (Hc + Hc.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Hc);
    const VectorXd& ev = es.eigenvalues();
    const double lmax = std::max(ev.size() > 0 ? ev.maxCoeff() : 0.0, 0.0);
    const int take = static_cast<int>(std::min<std::int64_t>(count, cols));
    double worst = 0.0;
    for (int r = 0; r < take; ++r) {
      const double lambda = ev[r];
      if (lambda < opts.kernel_threshold_rel * lmax)
        throw std::runtime_error(
            "kernel leaked into the shift-invert spectrum");
      const VectorXd u = B * es.eigenvectors().col(r);
      const double res = pencil_residual(ctx, u, lambda);
      if (res > opts.tolerance)
        throw std::runtime_error("pencil residual " + std::to_string(res) +
                                 " exceeds tolerance after exhausting the "
                                 "complement");
      worst = std::max(worst, res);
      out.values.push_back(lambda);
    }
    out.info.max_residual = worst;
    return out;
  };

  // Lifts the leading picked Ritz pairs to cochains and gates them on the
  // explicit pencil residual; empty when the subspace is not yet good enough.
  auto try_extract =
      [&](const Eigen::SelfAdjointEigenSolver<MatrixXd>& es,
          const std::vector<std::pair<double, int>>& picked)
      -> std::optional<PencilResult> {
    final_residuals.clear();
    if (static_cast<int>(picked.size()) < count) return std::nullopt;
    std::vector<double> values;
    bool all_ok = true;
    for (int r = 0; all_ok && r < count; ++r) {
      const auto& [th, idx] = picked[static_cast<std::size_t>(r)];
      if (th >= 1.0 - 1e-8)
        throw std::runtime_error("kernel leaked into the shift-invert spectrum");
      const double lambda = 1.0 / th - 1.0;
      const VectorXd u = basis.leftCols(cols) * es.eigenvectors().col(idx);
      const double res = pencil_residual(ctx, u, lambda);
      final_residuals.push_back(res);
      if (res > opts.tolerance) all_ok = false;
      values.push_back(lambda);
    }
    if (!all_ok) return std::nullopt;
    std::sort(values.begin(), values.end());
    PencilResult done = out;
    done.values = std::move(values);
    done.info.max_residual = *std::max_element(final_residuals.begin(),
                                               final_residuals.end());
    return done;
  };

  // The worst extraction residual at the end of each restart cycle. Two
  // cycles in a row without real improvement mean the subspace is no longer
  // the limit (inner solve accuracy is), so further restarts are pointless.
  double best_worst = std::numeric_limits<double>::infinity();
  int stale_cycles = 0;
  const Eigen::Index keep_cols =
      std::min<Eigen::Index>(count + extra + b,
                             max_cols - 4 * static_cast<Eigen::Index>(b));

  for (int step = 0; step < step_budget; ++step) {
    const Eigen::Index off = cols - b;
    MatrixXd TV(n, b);
    for (int j = 0; j < b; ++j) {
      const VectorXd rhs = ctx.M * V.col(j);
      TV.col(j) = cg_a.solve(rhs, 1e-12, opts.max_iterations,
                             &out.info.inner_iterations, "shift-invert");
    }
    proj.apply(TV);
    tbasis.middleCols(off, b) = TV;

    // New block column of H, mirrored onto the row: T is self-adjoint in the
    // M-inner product, so the transpose is exact and only the diagonal block
    // needs symmetrizing against inner-solve noise. Subtracting the full
    // column reorthogonalizes the residual against every stored block, not
    // just the previous two.
    const MatrixXd hcol = mbasis.leftCols(cols).transpose() * TV;
    H.block(0, off, cols, b) = hcol;
    H.block(off, 0, b, cols) = hcol.transpose();
    H.block(off, off, b, b) =
        (0.5 *
         (hcol.middleRows(off, b) + hcol.middleRows(off, b).transpose()))
            .eval();
    MatrixXd W = TV - basis.leftCols(cols) * hcol;
    ++out.info.lanczos_steps;

    const MatrixXd Hc = H.topLeftCorner(cols, cols);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Hc);
    const VectorXd theta = es.eigenvalues();
    const int want = std::min(count + extra, static_cast<int>(theta.size()));

    // Largest theta first.
    std::vector<std::pair<double, int>> picked;
    for (int i = static_cast<int>(theta.size()) - 1;
         i >= 0 && static_cast<int>(picked.size()) < want; --i) {
      if (theta[i] < 1e-14) break;
      picked.push_back({theta[i], i});
    }

    // Residual bound from the not yet orthonormalized next block: for a
    // Ritz vector with bottom-block coefficients s, the Lanczos residual is
    // W s, so its M-norm is available from the Gram matrix of W.
    bool converged = static_cast<int>(picked.size()) >= count;
    if (converged) {
      const MatrixXd GW = W.transpose() * (ctx.M * W).eval();
      for (int r = 0; r < count; ++r) {
        const auto& [th, idx] = picked[static_cast<std::size_t>(r)];
        if (th >= 1.0 - 1e-8)
          throw std::runtime_error(
              "kernel leaked into the shift-invert spectrum");
        const VectorXd s_bot = es.eigenvectors().col(idx).tail(b);
        const double bound =
            std::sqrt(std::max(0.0, s_bot.dot(GW * s_bot)));
        const double lambda = 1.0 / th - 1.0;
        if (bound > 0.1 * opts.tolerance * std::max(lambda * th * th, 1e-30))
          converged = false;
      }
    }

    const bool room = cols + b <= max_cols;
    bool collapsed = false;
    if (converged || !room || step + 1 == step_budget) {
      if (auto done = try_extract(es, picked)) return *done;
      if (!room || step + 1 == step_budget) {
        const double worst =
            final_residuals.empty()
                ? std::numeric_limits<double>::infinity()
                : *std::max_element(final_residuals.begin(),
                                    final_residuals.end());
        if (worst < 0.9 * best_worst) {
          best_worst = worst;
          stale_cycles = 0;
        } else {
          ++stale_cycles;
        }
        // Thick restart: compress basis, operator images and H onto the
        // Ritz vectors with the largest theta (the wanted end of the
        // spectrum) and continue the walk from the carried residual block.
        if (step + 1 < step_budget && !room && stale_cycles < 2 &&
            keep_cols >= count && keep_cols < cols) {
          const Eigen::Index keep = keep_cols;
          const MatrixXd S = es.eigenvectors().rightCols(keep);
          basis.leftCols(keep) = (basis.leftCols(cols) * S).eval();
          mbasis.leftCols(keep) = (mbasis.leftCols(cols) * S).eval();
          tbasis.leftCols(keep) = (tbasis.leftCols(cols) * S).eval();
          cols = keep;
          const MatrixXd Hk =
              mbasis.leftCols(keep).transpose() * tbasis.leftCols(keep);
          H.setZero();
          H.topLeftCorner(keep, keep) = 0.5 * (Hk + Hk.transpose());
          MatrixXd Rc(b, b);
          if (orthonormalize(W, Rc)) {
            V = W;
            basis.middleCols(cols, b) = V;
            mbasis.middleCols(cols, b) = ctx.M * V;
            cols += b;
            continue;
          }
          collapsed = true;  // carried residual brought no new directions
        }
        if (!collapsed) {
          // Out of budget or progress. When the whole complement of ker K_q
          // fits in the basis, finish with an exact solve in it. Its
          // dimension rank D_q is bounded by both the pencil dimension and
          // the simplex count one degree up, so large pencils skip the rank
          // computation entirely.
          const bool comp_may_fit =
              max_cols == n ||
              (ctx.q < ctx.metric->complex().dimension() &&
               ctx.metric->complex().simplex_count(ctx.q + 1) <= max_cols);
          if (comp_may_fit) {
            const std::int64_t comp = complement_dim();
            if (comp <= max_cols) {
              pad_basis_to(comp);
              return exact_subspace_extraction();
            }
          }
          std::ostringstream msg;
          msg << "shift-invert iteration did not converge; residuals:";
          for (double r : final_residuals) msg << " " << r;
          throw std::runtime_error(msg.str());
        }
      }
    }

    MatrixXd Rnew(b, b);
    if (!collapsed && orthonormalize(W, Rnew)) {
      V = W;
      basis.middleCols(cols, b) = V;
      mbasis.middleCols(cols, b) = ctx.M * V;
      cols += b;
    } else {
      // Rank collapse: the basis became invariant. Accept a converged
      // extraction; otherwise the complement of ker K_q must be nearly
      // spanned, so fill the last directions and solve in it exactly.
      if (auto done = try_extract(es, picked)) return *done;
      const std::int64_t comp = complement_dim();
      if (comp > max_cols)
        throw std::runtime_error(
            "Lanczos block lost rank before spanning the pencil complement");
      pad_basis_to(comp);
      return exact_subspace_extraction();
    }
  }
  throw std::runtime_error("shift-invert iteration exhausted its step budget");
}

PencilResult dense_pencil(const PencilContext& ctx, int count,
                          const EigenOptions& opts,
                          std::int64_t expected_kernel) {
  const std::int64_t n = ctx.M.rows();
  PencilResult out;
  out.info.pencil_degree = ctx.q;
  out.info.pencil_dim = static_cast<int>(n);
  out.info.dense = true;
  out.info.tolerance = opts.tolerance;
  out.info.seed = opts.seed;

  const MatrixXd Kd = MatrixXd(ctx.K);
  const MatrixXd Md = MatrixXd(ctx.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(
      Kd, Md, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense generalized eigensolver failed");
  const VectorXd& evals = es.eigenvalues();
  const double lam_max = std::max(evals.maxCoeff(), 0.0);
  const double thresh = opts.kernel_threshold_rel * lam_max;

  std::int64_t kdim = 0;
  while (kdim < n && std::abs(evals[kdim]) < thresh) ++kdim;
  if (kdim != expected_kernel)
    throw std::runtime_error(
        "kernel multiplicity mismatch: threshold classified " +
        std::to_string(kdim) + " but rank predicts " +
        std::to_string(expected_kernel));
  out.kernel_dim = kdim;

  // The positive spectrum may hold fewer than count values on small pencils.
  const std::int64_t avail = n - kdim;
  count = static_cast<int>(std::min<std::int64_t>(count, avail));
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const double lambda = evals[kdim + i];
    const double res =
        pencil_residual(ctx, es.eigenvectors().col(kdim + i), lambda);
    worst = std::max(worst, res);
    if (res > opts.tolerance)
      throw std::runtime_error("dense pencil residual " + std::to_string(res) +
                               " exceeds tolerance");
    out.values.push_back(lambda);
  }
  out.info.max_residual = worst;
  return out;
}

std::vector<SpectrumEntry> cluster_values(const std::vector<double>& values,
                                          SpectralClass cls,
                                          double cluster_rel) {
  std::vector<SpectrumEntry> out;
  std::size_t i = 0;
  while (i < values.size()) {
    const double anchor = values[i];
    double sum = 0.0;
    int mult = 0;
    while (i < values.size() && values[i] - anchor <= cluster_rel * anchor) {
      sum += values[i];
      ++mult;
      ++i;
    }
    out.push_back({sum / mult, cls, mult});
  }
  return out;
}

const char* class_name(SpectralClass cls) {
  switch (cls) {
    case SpectralClass::Harmonic: return "harmonic";
    case SpectralClass::Exact: return "exact";
    default: return "coexact";
  }
}

}  // namespace

PencilResult cochain_pencil_spectrum(const MetricField& g, int q, int count,
                                     const EigenOptions& opts) {
  if (count < 1) throw std::invalid_argument("count must be positive");
  const SimplicialComplex& K = g.complex();
  PencilContext ctx = make_context(g, q);
  const std::int64_t dim = K.simplex_count(q);
  const bool sparse = opts.force_sparse || dim > opts.dense_threshold;
  if (!sparse) {
    const std::int64_t kernel_expected =
        dim - (q < K.dimension() ? K.coboundary_rank(q) : 0);
    return dense_pencil(ctx, count, opts, kernel_expected);
  }
  return sparse_pencil(ctx, cohomology_representatives(K, q), count, opts);
}

std::vector<double> exact_form_spectrum(const MetricField& g, int p, int count,
                                        const EigenOptions& opts) {
  if (p < 1 || p > g.complex().dimension())
    throw std::invalid_argument("exact form degree must be in 1..n");
  return cochain_pencil_spectrum(g, p - 1, count, opts).values;
}

SpectrumTable full_spectrum(const MetricField& g, int p, int count,
                            const EigenOptions& opts) {
  const SimplicialComplex& K = g.complex();
  const int n = K.dimension();
  if (p < 0 || p > n) throw std::invalid_argument("degree out of range");
  if (count < 1) throw std::invalid_argument("count must be positive");

  SpectrumTable table;
  table.degree = p;

  std::vector<SpectrumEntry> exact_entries, coexact_entries;
  std::int64_t b_p = -1;

  if (p >= 1) {
    PencilResult r = cochain_pencil_spectrum(g, p - 1, count, opts);
    exact_entries = cluster_values(r.values, SpectralClass::Exact,
                                   opts.cluster_rel);
    table.info.push_back(r.info);
  }
  if (p <= n - 1) {
    PencilResult r = cochain_pencil_spectrum(g, p, count, opts);
    coexact_entries = cluster_values(r.values, SpectralClass::Coexact,
                                     opts.cluster_rel);
    table.info.push_back(r.info);
    // The p-pencil kernel determines b_p: directly in the sparse path
    // (verified harmonic dimension), through dim ker D_p - rank D_{p-1} in
    // the dense path.
    if (r.info.dense) {
      b_p = r.kernel_dim - (p >= 1 ? K.coboundary_rank(p - 1) : 0);
    } else {
      b_p = r.kernel_dim;
    }
  }
  if (p == 0) {
    const std::vector<int> comp = vertex_components(K);
    b_p = 1 + *std::max_element(comp.begin(), comp.end());
  } else if (b_p < 0) {
    b_p = K.betti()[static_cast<std::size_t>(p)];  // p == n
  }
  if (b_p < 0 || (p == 0 && b_p < 1))
    throw std::logic_error("harmonic dimension resolution failed");

  if (b_p > 0)
    table.entries.push_back(
        {0.0, SpectralClass::Harmonic, static_cast<int>(b_p)});

  // Merge the two ascending class lists; exact precedes coexact on ties.
  std::size_t i = 0, j = 0;
  int taken = 0;
  while (taken < count && (i < exact_entries.size() || j < coexact_entries.size())) {
    const bool take_exact =
        i < exact_entries.size() &&
        (j >= coexact_entries.size() ||
         exact_entries[i].value <= coexact_entries[j].value);
    const SpectrumEntry& e = take_exact ? exact_entries[i] : coexact_entries[j];
    table.entries.push_back(e);
    taken += e.multiplicity;
    if (take_exact) ++i; else ++j;
  }
  return table;
}

double positive_eigenvalue(const SpectrumTable& table, int k) {
  if (k < 1) throw std::invalid_argument("eigenvalue index is 1-based");
  int seen = 0;
  for (const SpectrumEntry& e : table.entries) {
    if (e.cls == SpectralClass::Harmonic) continue;
    seen += e.multiplicity;
    if (seen >= k) return e.value;
  }
  throw std::out_of_range("table holds fewer than k positive eigenvalues");
}

double gap(const SpectrumTable& a, int k, const SpectrumTable& b, int l) {
  return positive_eigenvalue(a, k) - positive_eigenvalue(b, l);
}

std::string spectrum_to_csv(const SpectrumTable& table) {
  std::ostringstream out;
  out << "p,k,lambda,class,multiplicity\n";
  char buf[64];
  int k = 1;
  for (const SpectrumEntry& e : table.entries) {
    std::snprintf(buf, sizeof buf, "%.12g", e.value);
    out << table.degree << "," << k++ << "," << buf << ","
        << class_name(e.cls) << "," << e.multiplicity << "\n";
  }
  return out.str();
}

std::string spectrum_to_json(const SpectrumTable& table) {
  nlohmann::ordered_json doc;
  doc["degree"] = table.degree;
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const SpectrumEntry& e : table.entries) {
    entries.push_back({{"lambda", e.value},
                       {"class", class_name(e.cls)},
                       {"multiplicity", e.multiplicity}});
  }
  doc["entries"] = std::move(entries);
  nlohmann::ordered_json solver = nlohmann::ordered_json::array();
  for (const SolverInfo& s : table.info) {
    solver.push_back({{"pencil_degree", s.pencil_degree},
                      {"pencil_dim", s.pencil_dim},
                      {"dense", s.dense},
                      {"lanczos_steps", s.lanczos_steps},
                      {"inner_iterations", s.inner_iterations},
                      {"max_residual", s.max_residual},
                      {"tolerance", s.tolerance},
                      {"seed", s.seed}});
  }
  doc["solver"] = std::move(solver);
  return doc.dump(2);
}

std::vector<double> dense_hodge_positive_spectrum(const MetricField& g, int p,
                                                  double kernel_rel) {
  const SimplicialComplex& K = g.complex();
  const int n = K.dimension();
  if (p < 0 || p > n) throw std::invalid_argument("degree out of range");
  const std::int64_t dim = K.simplex_count(p);
  if (dim > 2048)
    throw std::invalid_argument("dense Hodge validation capped at 2048");

  const MatrixXd Mp = whitney_mass(g, p).to_dense();
  MatrixXd A = stiffness(g, p).to_dense();
  if (p >= 1) {
    const MatrixXd D = K.coboundary(p - 1).to_dense();
    const MatrixXd Mlow = whitney_mass(g, p - 1).to_dense();
    const MatrixXd B = D.transpose() * Mp;  // (p-1) x p block, transposed use
    A += B.transpose() * Eigen::LLT<MatrixXd>(Mlow).solve(B);
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(A, Mp,
                                                        Eigen::EigenvaluesOnly |
                                                            Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense Hodge eigensolver failed");
  const VectorXd& evals = es.eigenvalues();
  const double thresh = kernel_rel * std::max(evals.maxCoeff(), 0.0);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (std::abs(evals[i]) >= thresh && evals[i] > 0) out.push_back(evals[i]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hodge
