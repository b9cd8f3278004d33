#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hodge {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Immutable sparse matrix in sorted coordinate form.
///
/// Entries are sorted by (row, col) with duplicates merged by summation in
/// input order, so identical assembly sequences produce bit-identical entry
/// lists. The symmetric flag is verified at construction: exact equality for
/// integer-valued entries, 1e-12 relative otherwise.
class SparseOperator {
 public:
  SparseOperator() = default;

  static SparseOperator from_triplets(int rows, int cols,
                                      std::vector<Triplet> entries,
                                      bool symmetric);
  static SparseOperator from_eigen(const Eigen::SparseMatrix<double>& m,
                                   bool symmetric);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool symmetric() const { return symmetric_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Triplet>& entries() const { return entries_; }

  Eigen::SparseMatrix<double> to_eigen() const;
  Eigen::MatrixXd to_dense() const;
  SparseOperator transposed() const;

  /// max |A_ij - A_ji| over the stored pattern.
  double symmetry_gap() const;

  /// Matrix Market coordinate format; symmetric operators store the lower
  /// triangle under the "symmetric" qualifier.
  void write_matrix_market(std::ostream& out) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  bool symmetric_ = false;
  std::vector<Triplet> entries_;
};

}  // namespace hodge
