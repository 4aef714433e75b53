#pragma once

#include "topocut/cell_complex.hpp"
#include "topocut/snf.hpp"

namespace topocut {

/// Dual complex of a 3-complex, represented purely through the grade-flipping
/// bijection: the dual d-cell of a primal (3-d)-cell reuses its id. No dual
/// geometry is ever built; all operations are transpose incidence.
struct DualMap {
  const ChainComplex* parent = nullptr;

  explicit DualMap(const ChainComplex& cx) : parent(&cx) {}

  static int dual_dim(int primal_d) { return ChainComplex::kMaxDim - primal_d; }
  int cell_count(int dual_d) const { return parent->cell_count(dual_dim(dual_d)); }
};

/// Dual boundary matrix of dual d-cells: the transpose of the primal boundary
/// matrix of complementary grade. Rows are dual (d-1)-cells (primal (4-d)-
/// cells), columns dual d-cells (primal (3-d)-cells).
SparseIntMat dual_boundary_matrix(const ChainComplex& cx, int d);

/// Transfer of a 1-cocycle to the dual 2-chain with the same coefficients
/// (the bijection is the identity on ids). If `region` is given the cocycle
/// condition is checked on its faces only (a cocycle on that subcomplex),
/// otherwise on the whole complex. Throws if the input is not a cocycle.
IntChain dual_support(const IntChain& cut, const DualMap& dm, const SubcomplexView* region = nullptr);

}  // namespace topocut
