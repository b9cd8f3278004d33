#include "hodge/complex.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hodge/rank.hpp"

namespace hodge {

namespace {

// All k-element subsets of {0..n-1}, lexicographic.
std::vector<std::vector<int>> subset_table(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  if (k == 0) {
    out.push_back({});
    return out;
  }
  if (k > n) return out;
  for (;;) {
    out.push_back(pick);
    int i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

int compare_tuple(const int* a, const int* b, int len) {
  for (int i = 0; i < len; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

// Sorts and deduplicates a flattened tuple list in place.
std::vector<int> sort_unique_tuples(std::vector<int> flat, int stride) {
  const std::int64_t m = static_cast<std::int64_t>(flat.size()) / stride;
  std::vector<std::int64_t> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return compare_tuple(flat.data() + a * stride, flat.data() + b * stride,
                         stride) < 0;
  });
  std::vector<int> out;
  out.reserve(flat.size());
  for (std::int64_t idx = 0; idx < m; ++idx) {
    const int* t = flat.data() + order[static_cast<std::size_t>(idx)] * stride;
    if (!out.empty() &&
        compare_tuple(t, out.data() + out.size() - static_cast<std::size_t>(stride),
                      stride) == 0)
      continue;
    out.insert(out.end(), t, t + stride);
  }
  out.shrink_to_fit();
  return out;
}

double wrap_minimal(double d, double period) {
  return d - period * std::floor(d / period + 0.5);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::int64_t n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

std::int64_t SimplicialComplex::simplex_count(int q) const {
  if (q < 0 || q > dim_) return 0;
  return static_cast<std::int64_t>(tables_[static_cast<std::size_t>(q)].size()) /
         (q + 1);
}

std::span<const int> SimplicialComplex::simplex(int q, std::int64_t i) const {
  const auto& table = tables_[static_cast<std::size_t>(q)];
  return {table.data() + i * (q + 1), static_cast<std::size_t>(q + 1)};
}

std::int64_t SimplicialComplex::simplex_index(int q,
                                              std::span<const int> v) const {
  if (q < 0 || q > dim_ || static_cast<int>(v.size()) != q + 1) return -1;
  const auto& table = tables_[static_cast<std::size_t>(q)];
  const int stride = q + 1;
  std::int64_t lo = 0, hi = simplex_count(q);
  while (lo < hi) {
    const std::int64_t mid = (lo + hi) / 2;
    if (compare_tuple(table.data() + mid * stride, v.data(), stride) < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < simplex_count(q) &&
      compare_tuple(table.data() + lo * stride, v.data(), stride) == 0)
    return lo;
  return -1;
}

const SparseOperator& SimplicialComplex::coboundary(int q) const {
  if (q < 0 || q >= dim_)
    throw std::invalid_argument("coboundary degree out of range");
  auto& slot = coboundary_cache_[static_cast<std::size_t>(q)];
  if (!slot) {
    const std::int64_t nhi = simplex_count(q + 1);
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(nhi) *
                    static_cast<std::size_t>(q + 2));
    std::vector<int> facet(static_cast<std::size_t>(q + 1));
    for (std::int64_t i = 0; i < nhi; ++i) {
      std::span<const int> tau = simplex(q + 1, i);
      for (int j = 0; j <= q + 1; ++j) {
        int w = 0;
        for (int k = 0; k <= q + 1; ++k)
          if (k != j) facet[static_cast<std::size_t>(w++)] = tau[static_cast<std::size_t>(k)];
        const std::int64_t idx = simplex_index(q, facet);
        if (idx < 0) throw std::logic_error("missing facet in simplex table");
        entries.push_back({static_cast<int>(i), static_cast<int>(idx),
                           (j % 2 == 0) ? 1.0 : -1.0});
      }
    }
    slot = std::make_unique<SparseOperator>(SparseOperator::from_triplets(
        static_cast<int>(nhi), static_cast<int>(simplex_count(q)),
        std::move(entries), false));
  }
  return *slot;
}

std::int64_t SimplicialComplex::coboundary_rank(int q) const {
  if (q < 0 || q >= dim_) return 0;
  if (rank_cache_[static_cast<std::size_t>(q)] < 0) {
    const SparseOperator& d = coboundary(q);
    std::vector<IntTriplet> ts;
    ts.reserve(d.nnz());
    for (const Triplet& t : d.entries())
      ts.push_back({t.row, t.col, static_cast<std::int64_t>(t.value)});
    rank_cache_[static_cast<std::size_t>(q)] =
        integer_rank(d.rows(), d.cols(), ts);
  }
  return rank_cache_[static_cast<std::size_t>(q)];
}

const std::vector<int>& SimplicialComplex::betti() const {
  if (betti_cache_.empty()) {
    std::vector<int> b(static_cast<std::size_t>(dim_) + 1);
    std::int64_t rank_below = 0;  // rank D_{q-1}
    for (int q = 0; q <= dim_; ++q) {
      const std::int64_t rank_here = q < dim_ ? coboundary_rank(q) : 0;
      b[static_cast<std::size_t>(q)] =
          static_cast<int>(simplex_count(q) - rank_here - rank_below);
      rank_below = rank_here;
    }
    betti_cache_ = std::move(b);
  }
  return betti_cache_;
}

const std::vector<std::int64_t>& SimplicialComplex::top_faces(int q) const {
  if (q < 0 || q > dim_) throw std::invalid_argument("degree out of range");
  auto& slot = face_cache_[static_cast<std::size_t>(q)];
  if (!slot) {
    const auto subsets = subset_table(dim_ + 1, q + 1);
    const std::int64_t ntop = simplex_count(dim_);
    auto faces = std::make_unique<std::vector<std::int64_t>>();
    faces->reserve(static_cast<std::size_t>(ntop) * subsets.size());
    std::vector<int> tuple(static_cast<std::size_t>(q + 1));
    for (std::int64_t t = 0; t < ntop; ++t) {
      std::span<const int> top = simplex(dim_, t);
      for (const auto& sub : subsets) {
        for (std::size_t k = 0; k < sub.size(); ++k)
          tuple[k] = top[static_cast<std::size_t>(sub[k])];
        const std::int64_t idx = simplex_index(q, tuple);
        if (idx < 0) throw std::logic_error("missing face in simplex table");
        faces->push_back(idx);
      }
    }
    slot = std::move(faces);
  }
  return *slot;
}

std::span<const double> SimplicialComplex::vertex_coordinates(
    std::int64_t v) const {
  return {coords_.data() + v * coord_dim_, static_cast<std::size_t>(coord_dim_)};
}

std::vector<double> SimplicialComplex::displacement(std::int64_t a,
                                                    std::int64_t b) const {
  std::vector<double> d(static_cast<std::size_t>(coord_dim_));
  std::span<const double> pa = vertex_coordinates(a);
  std::span<const double> pb = vertex_coordinates(b);
  for (int i = 0; i < coord_dim_; ++i) {
    d[static_cast<std::size_t>(i)] = pb[static_cast<std::size_t>(i)] -
                                     pa[static_cast<std::size_t>(i)];
    if (!periods_.empty())
      d[static_cast<std::size_t>(i)] = wrap_minimal(
          d[static_cast<std::size_t>(i)], periods_[static_cast<std::size_t>(i)]);
  }
  return d;
}

int SimplicialComplex::euler_characteristic() const {
  std::int64_t chi = 0;
  for (int q = 0; q <= dim_; ++q)
    chi += (q % 2 == 0 ? 1 : -1) * simplex_count(q);
  return static_cast<int>(chi);
}

void SimplicialComplex::compute_orientations() {
  const std::int64_t ntop = simplex_count(dim_);
  orientations_.assign(static_cast<std::size_t>(ntop), 0);
  const bool sphere_style = kind_ == ComplexKind::Sphere;
  if (sphere_style && coord_dim_ != dim_ + 1)
    throw std::logic_error("sphere complex needs codimension-1 embedding");
  if (!sphere_style && coord_dim_ != dim_)
    throw std::logic_error("chart dimension must equal complex dimension");
  Eigen::MatrixXd m(coord_dim_, coord_dim_);
  for (std::int64_t t = 0; t < ntop; ++t) {
    std::span<const int> top = simplex(dim_, t);
    if (sphere_style) {
      for (int j = 0; j < coord_dim_; ++j) {
        std::span<const double> p = vertex_coordinates(top[static_cast<std::size_t>(j)]);
        for (int i = 0; i < coord_dim_; ++i) m(i, j) = p[static_cast<std::size_t>(i)];
      }
    } else {
      for (int j = 1; j <= dim_; ++j) {
        std::vector<double> d = displacement(top[0], top[static_cast<std::size_t>(j)]);
        for (int i = 0; i < dim_; ++i) m(i, j - 1) = d[static_cast<std::size_t>(i)];
      }
    }
    const double det = m.determinant();
    if (det == 0.0)
      throw std::runtime_error("degenerate top simplex " + std::to_string(t));
    orientations_[static_cast<std::size_t>(t)] = det > 0 ? 1 : -1;
  }
}

std::shared_ptr<const SimplicialComplex> SimplicialComplex::from_top_simplices(
    int dim, std::vector<std::vector<int>> tops, ComplexKind kind,
    std::vector<double> coords, int coord_dim, std::vector<double> periods) {
  if (dim < 1 || dim > 4)
    throw std::invalid_argument("complex dimension must be in 1..4");
  if (tops.empty()) throw std::invalid_argument("no top simplices");
  int max_id = -1;
  for (auto& t : tops) {
    if (static_cast<int>(t.size()) != dim + 1)
      throw std::invalid_argument("top simplex arity mismatch");
    std::sort(t.begin(), t.end());
    if (std::adjacent_find(t.begin(), t.end()) != t.end())
      throw std::invalid_argument("repeated vertex in a top simplex");
    if (t.front() < 0) throw std::invalid_argument("negative vertex id");
    max_id = std::max(max_id, t.back());
  }
  const std::int64_t nvert = max_id + 1;
  if (coord_dim > 0 &&
      coords.size() != static_cast<std::size_t>(nvert) *
                           static_cast<std::size_t>(coord_dim))
    throw std::invalid_argument("coordinate array size mismatch");

  auto K = std::shared_ptr<SimplicialComplex>(new SimplicialComplex());
  K->dim_ = dim;
  K->kind_ = kind;
  K->coord_dim_ = coord_dim;
  K->coords_ = std::move(coords);
  K->periods_ = std::move(periods);
  K->tables_.resize(static_cast<std::size_t>(dim) + 1);

  for (int q = 0; q <= dim; ++q) {
    const auto subsets = subset_table(dim + 1, q + 1);
    std::vector<int> flat;
    flat.reserve(tops.size() * subsets.size() * static_cast<std::size_t>(q + 1));
    for (const auto& top : tops)
      for (const auto& sub : subsets)
        for (int k : sub) flat.push_back(top[static_cast<std::size_t>(k)]);
    K->tables_[static_cast<std::size_t>(q)] =
        sort_unique_tuples(std::move(flat), q + 1);
  }
  if (K->simplex_count(0) != nvert)
    throw std::invalid_argument("vertex ids must be contiguous from 0");

  K->coboundary_cache_.resize(static_cast<std::size_t>(dim));
  K->face_cache_.resize(static_cast<std::size_t>(dim) + 1);
  K->rank_cache_.assign(static_cast<std::size_t>(dim), -1);
  if (K->coord_dim_ > 0 &&
      (kind != ComplexKind::Generic || K->coord_dim_ == dim))
    K->compute_orientations();
  return K;
}

ComplexPtr build_torus(int n, int cells_per_axis, double side_length) {
  if (n < 1 || n > 4) throw std::invalid_argument("torus dimension must be 1..4");
  if (cells_per_axis < 3)
    throw std::invalid_argument(
        "cells_per_axis < 3 creates degenerate periodic simplices");
  if (!(side_length > 0)) throw std::invalid_argument("side_length must be positive");
  const int N = cells_per_axis;
  std::int64_t nvert = 1;
  for (int i = 0; i < n; ++i) nvert *= N;

  std::vector<double> coords(static_cast<std::size_t>(nvert) *
                             static_cast<std::size_t>(n));
  {
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (std::int64_t v = 0; v < nvert; ++v) {
      for (int a = 0; a < n; ++a)
        coords[static_cast<std::size_t>(v) * n + a] =
            idx[static_cast<std::size_t>(a)] * side_length;
      for (int a = 0; a < n; ++a) {
        if (++idx[static_cast<std::size_t>(a)] < N) break;
        idx[static_cast<std::size_t>(a)] = 0;
      }
    }
  }

  auto vertex_id = [&](const std::vector<int>& idx) {
    std::int64_t id = 0;
    for (int a = n - 1; a >= 0; --a)
      id = id * N + (idx[static_cast<std::size_t>(a)] % N + N) % N;
    return static_cast<int>(id);
  };

  std::vector<std::vector<int>> tops;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> base(static_cast<std::size_t>(n), 0);
  std::int64_t ncells = nvert;
  for (std::int64_t c = 0; c < ncells; ++c) {
    std::sort(perm.begin(), perm.end());
    do {
      std::vector<int> tuple;
      tuple.reserve(static_cast<std::size_t>(n) + 1);
      std::vector<int> cur = base;
      tuple.push_back(vertex_id(cur));
      for (int j = 0; j < n; ++j) {
        ++cur[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
        tuple.push_back(vertex_id(cur));
      }
      tops.push_back(std::move(tuple));
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int a = 0; a < n; ++a) {
      if (++base[static_cast<std::size_t>(a)] < N) break;
      base[static_cast<std::size_t>(a)] = 0;
    }
  }

  std::int64_t expected = nvert;
  for (int f = 2; f <= n; ++f) expected *= f;
  auto K = SimplicialComplex::from_top_simplices(
      n, std::move(tops), ComplexKind::Torus, std::move(coords), n,
      std::vector<double>(static_cast<std::size_t>(n), N * side_length));
  if (K->simplex_count(n) != expected)
    throw std::logic_error("Kuhn triangulation produced a wrong simplex count");
  verify_closed_manifold(*K);
  return K;
}

ComplexPtr build_sphere(int m, int refinement_level) {
  if (m < 1 || m > 3) throw std::invalid_argument("sphere dimension must be 1..3");
  if (refinement_level < 0) throw std::invalid_argument("negative refinement");
  const int a = m + 1;  // ambient dimension
  std::vector<double> coords(static_cast<std::size_t>(2 * a) *
                                 static_cast<std::size_t>(a),
                             0.0);
  for (int i = 0; i < a; ++i) {
    coords[static_cast<std::size_t>(2 * i) * a + i] = 1.0;
    coords[static_cast<std::size_t>(2 * i + 1) * a + i] = -1.0;
  }
  std::vector<std::vector<int>> tops;
  for (int mask = 0; mask < (1 << a); ++mask) {
    std::vector<int> t;
    for (int i = 0; i < a; ++i) t.push_back(2 * i + ((mask >> i) & 1));
    tops.push_back(std::move(t));
  }

  for (int level = 0; level < refinement_level; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int u, int v) {
      if (u > v) std::swap(u, v);
      auto it = midpoint.find({u, v});
      if (it != midpoint.end()) return it->second;
      const int id = static_cast<int>(coords.size() / a);
      double norm2 = 0.0;
      std::vector<double> p(static_cast<std::size_t>(a));
      for (int i = 0; i < a; ++i) {
        p[static_cast<std::size_t>(i)] =
            0.5 * (coords[static_cast<std::size_t>(u) * a + i] +
                   coords[static_cast<std::size_t>(v) * a + i]);
        norm2 += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
      }
      const double inv = 1.0 / std::sqrt(norm2);  // radial projection
      for (int i = 0; i < a; ++i) coords.push_back(p[static_cast<std::size_t>(i)] * inv);
      midpoint[{u, v}] = id;
      return id;
    };

    std::vector<std::vector<int>> next;
    next.reserve(tops.size() << m);
    for (auto& t : tops) {
      std::sort(t.begin(), t.end());
      if (m == 1) {
        const int w = mid(t[0], t[1]);
        next.push_back({t[0], w});
        next.push_back({w, t[1]});
      } else if (m == 2) {
        const int m01 = mid(t[0], t[1]), m02 = mid(t[0], t[2]),
                  m12 = mid(t[1], t[2]);
        next.push_back({t[0], m01, m02});
        next.push_back({t[1], m01, m12});
        next.push_back({t[2], m02, m12});
        next.push_back({m01, m02, m12});
      } else {
        const int m01 = mid(t[0], t[1]), m02 = mid(t[0], t[2]),
                  m03 = mid(t[0], t[3]), m12 = mid(t[1], t[2]),
                  m13 = mid(t[1], t[3]), m23 = mid(t[2], t[3]);
        next.push_back({t[0], m01, m02, m03});
        next.push_back({t[1], m01, m12, m13});
        next.push_back({t[2], m02, m12, m23});
        next.push_back({t[3], m03, m13, m23});
        // interior octahedron, split along the (m01, m23) diagonal
        next.push_back({m01, m02, m03, m23});
        next.push_back({m01, m02, m12, m23});
        next.push_back({m01, m03, m13, m23});
        next.push_back({m01, m12, m13, m23});
      }
    }
    tops = std::move(next);
  }

  auto K = SimplicialComplex::from_top_simplices(
      m, std::move(tops), ComplexKind::Sphere, std::move(coords), a, {});
  verify_closed_manifold(*K);
  return K;
}

ComplexPtr apply_radial_grading(const SimplicialComplex& K,
                                std::span<const double> center, double rate) {
  if (!K.has_flat_chart())
    throw std::invalid_argument("radial grading needs a flat chart");
  if (static_cast<int>(center.size()) != K.coordinate_dimension())
    throw std::invalid_argument("center dimension mismatch");
  if (rate < 0) throw std::invalid_argument("negative grading rate");
  for (double p : K.chart_periods())
    if (!(p > 4.0))
      throw std::invalid_argument(
          "radius-2 grading ball does not embed in the chart");

  auto G = std::shared_ptr<SimplicialComplex>(new SimplicialComplex());
  G->dim_ = K.dim_;
  G->coord_dim_ = K.coord_dim_;
  G->kind_ = K.kind_;
  G->tables_ = K.tables_;
  G->periods_ = K.periods_;
  G->coords_ = K.coords_;
  G->coboundary_cache_.resize(static_cast<std::size_t>(G->dim_));
  G->face_cache_.resize(static_cast<std::size_t>(G->dim_) + 1);
  G->rank_cache_.assign(static_cast<std::size_t>(G->dim_), -1);

  if (rate > 1e-12) {
    const int d = K.coord_dim_;
    const double em = std::exp(-rate);
    for (std::int64_t v = 0; v < K.simplex_count(0); ++v) {
      double r2 = 0.0;
      std::vector<double> disp(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        disp[static_cast<std::size_t>(i)] = wrap_minimal(
            K.coords_[static_cast<std::size_t>(v) * d + i] - center[static_cast<std::size_t>(i)],
            K.periods_[static_cast<std::size_t>(i)]);
        r2 += disp[static_cast<std::size_t>(i)] * disp[static_cast<std::size_t>(i)];
      }
      const double r = std::sqrt(r2);
      if (r >= 2.0 || r == 0.0) continue;
      const double rho =
          2.0 * (std::exp(rate * (r / 2.0 - 1.0)) - em) / (1.0 - em);
      const double scale = rho / r;
      for (int i = 0; i < d; ++i) {
        double x = center[static_cast<std::size_t>(i)] +
                   disp[static_cast<std::size_t>(i)] * scale;
        const double P = K.periods_[static_cast<std::size_t>(i)];
        x -= P * std::floor(x / P);
        G->coords_[static_cast<std::size_t>(v) * d + i] = x;
      }
    }
  }

  G->compute_orientations();
  if (G->orientations_ != K.orientations_)
    throw std::runtime_error("radial grading inverted a simplex");
  return G;
}

void verify_closed_manifold(const SimplicialComplex& K) {
  const auto& eps = K.top_orientations();
  if (eps.empty())
    throw std::invalid_argument("manifold check needs top orientations");
  const int n = K.dimension();
  const SparseOperator& d = K.coboundary(n - 1);
  std::vector<int> coface_count(static_cast<std::size_t>(d.cols()), 0);
  std::vector<double> signed_sum(static_cast<std::size_t>(d.cols()), 0.0);
  for (const Triplet& t : d.entries()) {
    ++coface_count[static_cast<std::size_t>(t.col)];
    signed_sum[static_cast<std::size_t>(t.col)] +=
        t.value * eps[static_cast<std::size_t>(t.row)];
  }
  for (std::int64_t f = 0; f < d.cols(); ++f) {
    if (coface_count[static_cast<std::size_t>(f)] != 2)
      throw std::runtime_error("facet " + std::to_string(f) + " has " +
                               std::to_string(coface_count[static_cast<std::size_t>(f)]) +
                               " cofaces; complex is not a closed manifold");
    if (signed_sum[static_cast<std::size_t>(f)] != 0.0)
      throw std::runtime_error("facet " + std::to_string(f) +
                               " has inconsistent induced orientations");
  }
}

std::vector<int> vertex_components(const SimplicialComplex& K) {
  UnionFind uf(K.simplex_count(0));
  if (K.dimension() >= 1) {
    for (std::int64_t e = 0; e < K.simplex_count(1); ++e) {
      std::span<const int> edge = K.simplex(1, e);
      uf.unite(edge[0], edge[1]);
    }
  }
  std::vector<int> label(static_cast<std::size_t>(K.simplex_count(0)), -1);
  int next = 0;
  for (std::int64_t v = 0; v < K.simplex_count(0); ++v) {
    const int root = uf.find(static_cast<int>(v));
    if (label[static_cast<std::size_t>(root)] < 0)
      label[static_cast<std::size_t>(root)] = next++;
    label[static_cast<std::size_t>(v)] = label[static_cast<std::size_t>(root)];
  }
  return label;
}

std::vector<std::vector<double>> cohomology_representatives(
    const SimplicialComplex& K, int q) {
  if (q < 0 || q > K.dimension())
    throw std::invalid_argument("degree out of range");
  if (q == 0) {
    const std::vector<int> comp = vertex_components(K);
    const int ncomp = 1 + *std::max_element(comp.begin(), comp.end());
    std::vector<std::vector<double>> reps(
        static_cast<std::size_t>(ncomp),
        std::vector<double>(comp.size(), 0.0));
    for (std::size_t v = 0; v < comp.size(); ++v)
      reps[static_cast<std::size_t>(comp[v])][v] = 1.0;
    return reps;
  }
  if (K.kind() == ComplexKind::Torus) {
    const int n = K.dimension();
    double qfact = 1.0;
    for (int i = 2; i <= q; ++i) qfact *= i;
    std::vector<std::vector<double>> reps;
    Eigen::MatrixXd m(q, q);
    for (const auto& axes : subset_table(n, q)) {
      std::vector<double> z(static_cast<std::size_t>(K.simplex_count(q)));
      for (std::int64_t s = 0; s < K.simplex_count(q); ++s) {
        std::span<const int> sp = K.simplex(q, s);
        for (int j = 1; j <= q; ++j) {
          const std::vector<double> d = K.displacement(sp[0], sp[static_cast<std::size_t>(j)]);
          for (int i = 0; i < q; ++i)
            m(j - 1, i) = d[static_cast<std::size_t>(axes[static_cast<std::size_t>(i)])];
        }
        z[static_cast<std::size_t>(s)] = m.determinant() / qfact;
      }
      reps.push_back(std::move(z));
    }
    return reps;
  }
  if (K.kind() == ComplexKind::Sphere) {
    if (q < K.dimension()) return {};  // b_q = 0 for 0 < q < m
    const auto& eps = K.top_orientations();
    std::vector<double> z(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) z[i] = eps[i];
    return {std::move(z)};
  }
  if (K.betti()[static_cast<std::size_t>(q)] == 0) return {};
  throw std::runtime_error(
      "no cohomology representative construction for this complex kind");
}

std::string complex_to_json(const SimplicialComplex& K) {
  nlohmann::ordered_json doc;
  doc["dimension"] = K.dimension();
  switch (K.kind()) {
    case ComplexKind::Torus: doc["kind"] = "torus"; break;
    case ComplexKind::Sphere: doc["kind"] = "sphere"; break;
    default: doc["kind"] = "generic"; break;
  }
  if (K.has_coordinates()) {
    nlohmann::ordered_json verts = nlohmann::ordered_json::array();
    for (std::int64_t v = 0; v < K.simplex_count(0); ++v) {
      std::span<const double> p = K.vertex_coordinates(v);
      verts.push_back(std::vector<double>(p.begin(), p.end()));
    }
    doc["vertices"] = std::move(verts);
  } else {
    doc["vertices"] = nullptr;
  }
  if (K.has_flat_chart()) {
    std::span<const double> p = K.chart_periods();
    doc["flat_chart"] = std::vector<double>(p.begin(), p.end());
  } else {
    doc["flat_chart"] = nullptr;
  }
  nlohmann::ordered_json per_degree = nlohmann::ordered_json::array();
  for (int q = 0; q <= K.dimension(); ++q) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (std::int64_t i = 0; i < K.simplex_count(q); ++i) {
      std::span<const int> s = K.simplex(q, i);
      list.push_back(std::vector<int>(s.begin(), s.end()));
    }
    per_degree.push_back(std::move(list));
  }
  doc["simplices"] = std::move(per_degree);
  return doc.dump();
}

ComplexPtr complex_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  const int dim = doc.at("dimension").get<int>();
  const std::string kind_name = doc.at("kind").get<std::string>();
  ComplexKind kind = ComplexKind::Generic;
  if (kind_name == "torus") kind = ComplexKind::Torus;
  else if (kind_name == "sphere") kind = ComplexKind::Sphere;
  else if (kind_name != "generic")
    throw std::invalid_argument("unknown complex kind: " + kind_name);

  const auto& degrees = doc.at("simplices");
  if (static_cast<int>(degrees.size()) != dim + 1)
    throw std::invalid_argument("simplices array must cover all degrees");
  std::vector<std::vector<int>> tops =
      degrees.at(static_cast<std::size_t>(dim)).get<std::vector<std::vector<int>>>();

  std::vector<double> coords;
  int coord_dim = 0;
  if (!doc.at("vertices").is_null()) {
    for (const auto& row : doc.at("vertices")) {
      if (coord_dim == 0) coord_dim = static_cast<int>(row.size());
      for (const auto& x : row) coords.push_back(x.get<double>());
    }
  }
  std::vector<double> periods;
  if (!doc.at("flat_chart").is_null())
    periods = doc.at("flat_chart").get<std::vector<double>>();

  ComplexPtr K = SimplicialComplex::from_top_simplices(
      dim, std::move(tops), kind, std::move(coords), coord_dim,
      std::move(periods));

  // Lower-degree tables must match the downward closure exactly.
  for (int q = 0; q < dim; ++q) {
    const auto& listed = degrees.at(static_cast<std::size_t>(q));
    if (static_cast<std::int64_t>(listed.size()) != K->simplex_count(q))
      throw std::invalid_argument("serialized simplex table size mismatch");
    for (std::int64_t i = 0; i < K->simplex_count(q); ++i) {
      const auto tuple = listed.at(static_cast<std::size_t>(i)).get<std::vector<int>>();
      std::span<const int> s = K->simplex(q, i);
      if (!std::equal(tuple.begin(), tuple.end(), s.begin(), s.end()))
        throw std::invalid_argument("serialized simplex table content mismatch");
    }
  }
  return K;
}

}  // namespace hodge
