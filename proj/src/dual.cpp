#include "topocut/dual.hpp"

namespace topocut {

SparseIntMat dual_boundary_matrix(const ChainComplex& cx, int d) {
  if (d < 1 || d > ChainComplex::kMaxDim) throw TopologyError("dual_boundary_matrix: dimension out of range");
  return SparseIntMat::boundary_matrix(cx, ChainComplex::kMaxDim + 1 - d).transposed();
}

IntChain dual_support(const IntChain& cut, const DualMap& dm, const SubcomplexView* region) {
  const ChainComplex& cx = *dm.parent;
  if (cut.dim != 1) throw TopologyError("dual_support: input must be a 1-cochain");
  if (region) {
    for (const auto& [id, v] : cut.coeffs)
      if (!region->contains(1, id)) throw TopologyError("dual_support: cochain leaves the region");
  }
  // cocycle check: the coboundary vanishes on every (region) face
  IntChain dcut = cx.coboundary(cut);
  for (const auto& [f, v] : dcut.coeffs) {
    if (region && !region->contains(2, f)) continue;
    throw TopologyError("dual_support: input is not a cocycle");
  }
  IntChain sigma(DualMap::dual_dim(1));
  sigma.coeffs = cut.coeffs;
  return sigma;
}

}  // namespace topocut
