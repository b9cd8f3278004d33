#include "hodge/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace hodge {

SparseOperator SparseOperator::from_triplets(int rows, int cols,
                                             std::vector<Triplet> entries,
                                             bool symmetric) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative dimensions");
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("triplet index out of range");
  }
  // Stable sort keeps duplicate contributions in input order; summation order
  // is then independent of how the caller interleaved distinct entries.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  std::vector<Triplet> merged;
  merged.reserve(entries.size());
  for (const Triplet& t : entries) {
    if (!merged.empty() && merged.back().row == t.row &&
        merged.back().col == t.col) {
      merged.back().value += t.value;
    } else {
      merged.push_back(t);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Triplet& t) { return t.value == 0.0; }),
               merged.end());

  SparseOperator op;
  op.rows_ = rows;
  op.cols_ = cols;
  op.symmetric_ = symmetric;
  op.entries_ = std::move(merged);

  if (symmetric) {
    if (rows != cols)
      throw std::invalid_argument("symmetric flag on a non-square operator");
    double scale = 0.0;
    bool integral = true;
    for (const Triplet& t : op.entries_) {
      scale = std::max(scale, std::abs(t.value));
      if (t.value != std::floor(t.value)) integral = false;
    }
    const double tol = integral ? 0.0 : 1e-12 * scale;
    if (op.symmetry_gap() > tol)
      throw std::invalid_argument("symmetric flag violated by entries");
  }
  return op;
}

SparseOperator SparseOperator::from_eigen(const Eigen::SparseMatrix<double>& m,
                                          bool symmetric) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(m.nonZeros()));
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      entries.push_back({static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value()});
  return from_triplets(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                       std::move(entries), symmetric);
}

Eigen::SparseMatrix<double> SparseOperator::to_eigen() const {
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(entries_.size());
  for (const Triplet& t : entries_) ts.emplace_back(t.row, t.col, t.value);
  Eigen::SparseMatrix<double> m(rows_, cols_);
  m.setFromTriplets(ts.begin(), ts.end());
  m.makeCompressed();
  return m;
}

Eigen::MatrixXd SparseOperator::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_, cols_);
  for (const Triplet& t : entries_) m(t.row, t.col) += t.value;
  return m;
}

SparseOperator SparseOperator::transposed() const {
  std::vector<Triplet> ts;
  ts.reserve(entries_.size());
  for (const Triplet& t : entries_) ts.push_back({t.col, t.row, t.value});
  return from_triplets(cols_, rows_, std::move(ts), symmetric_);
}

double SparseOperator::symmetry_gap() const {
  std::map<std::pair<int, int>, double> lookup;
  for (const Triplet& t : entries_) lookup[{t.row, t.col}] = t.value;
  double gap = 0.0;
  for (const Triplet& t : entries_) {
    auto it = lookup.find({t.col, t.row});
    const double mirror = it == lookup.end() ? 0.0 : it->second;
    gap = std::max(gap, std::abs(t.value - mirror));
  }
  return gap;
}

void SparseOperator::write_matrix_market(std::ostream& out) const {
  const bool lower_only = symmetric_;
  std::size_t count = 0;
  if (lower_only) {
    for (const Triplet& t : entries_)
      if (t.row >= t.col) ++count;
  } else {
    count = entries_.size();
  }
  out << "%%MatrixMarket matrix coordinate real "
      << (lower_only ? "symmetric" : "general") << "\n";
  out << rows_ << " " << cols_ << " " << count << "\n";
  char buf[64];
  for (const Triplet& t : entries_) {
    if (lower_only && t.row < t.col) continue;
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", t.row + 1, t.col + 1,
                  t.value);
    out << buf;
  }
}

}  // namespace hodge
