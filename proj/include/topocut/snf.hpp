#pragma once

#include <map>
#include <vector>

#include "topocut/cell_complex.hpp"
#include "topocut/chain.hpp"
#include "topocut/types.hpp"

namespace topocut {

/// Sparse integer matrix with synchronized row and column indexes.
class SparseIntMat {
 public:
  SparseIntMat() = default;
  SparseIntMat(int rows, int cols) : nrows_(rows), ncols_(cols), rows_(rows), cols_(cols) {}

  static SparseIntMat identity(int n);

  /// Boundary matrix of d-cells of cx: rows are (d-1)-cells, columns d-cells.
  static SparseIntMat boundary_matrix(const ChainComplex& cx, int d);

  int rows() const { return nrows_; }
  int cols() const { return ncols_; }

  const std::map<int, Int>& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  const std::map<int, Int>& col(int j) const { return cols_[static_cast<std::size_t>(j)]; }

  Int at(int i, int j) const {
    auto it = rows_[static_cast<std::size_t>(i)].find(j);
    return it == rows_[static_cast<std::size_t>(i)].end() ? Int(0) : it->second;
  }

  void set(int i, int j, const Int& v);
  void add(int i, int j, const Int& v);

  std::size_t nnz() const;

  // Elementary operations (in place).
  void row_axpy(const Int& q, int src, int dst);  // row[dst] += q * row[src]
  void col_axpy(const Int& q, int src, int dst);  // col[dst] += q * col[src]
  void row_swap(int a, int b);
  void col_swap(int a, int b);
  void row_negate(int i);
  void col_negate(int i);

  SparseIntMat transposed() const;
  SparseIntMat multiplied(const SparseIntMat& o) const;

  IntChain apply(const IntChain& x, int result_dim) const;

  bool operator==(const SparseIntMat& o) const;

 private:
  int nrows_ = 0, ncols_ = 0;
  std::vector<std::map<int, Int>> rows_;
  std::vector<std::map<int, Int>> cols_;
};

/// D = U * A * V with U, V unimodular, D diagonal with divisibility chain.
/// Transform factors are filled only when requested.
struct SNFResult {
  SparseIntMat D;
  SparseIntMat U, Uinv, V, Vinv;
  bool has_transforms = false;
  int rank = 0;
  std::vector<Int> divisors;  // positive, d1 | d2 | ...
};

struct SNFOptions {
  bool want_U = false;
  bool want_Uinv = false;
  bool want_V = false;
  bool want_Vinv = false;
};

SNFResult smith_normal_form(const SparseIntMat& A, const SNFOptions& opt = {});

/// Rank of the matrix over the rationals (equals the SNF rank).
int snf_rank(const SparseIntMat& A);

}  // namespace topocut
