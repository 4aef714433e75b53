#pragma once

#include <array>
#include <vector>

#include "topocut/cell_complex.hpp"
#include "topocut/snf.hpp"

namespace topocut {

struct HomologyResult {
  int dim = 0;
  int betti = 0;
  std::vector<Int> torsion;          // divisors > 1
  std::vector<IntChain> generators;  // cycles (or cocycles), valid in the input complex
};

struct BettiTable {
  std::array<int, ChainComplex::kMaxDim + 1> betti{};
  std::array<std::vector<Int>, ChainComplex::kMaxDim + 1> torsion;  // torsion of H_d

  bool operator==(const BettiTable& o) const { return betti == o.betti && torsion == o.torsion; }
};

/// Maximal-effort acyclic subcomplex shaving. The quotient by the grown
/// subcomplex has the same (co)homology in degrees >= 1, and cocycle
/// representatives lift to the original complex by zero-extension
/// (quotient.lift). One acyclic piece is grown per connected component.
struct ShaveResult {
  SubcomplexView shaved;  // the acyclic subcomplex S
  ComplexSlice quotient;  // cx / S
};

ShaveResult shave_acyclic(const ChainComplex& cx, const SubcomplexView* preserve = nullptr);

/// Coreduction: cascaded removal of (face, coface) pairs where the coface has
/// exactly one remaining face. Preserves homology in degrees >= 1; when
/// `seed_components` one vertex per connected component is removed first
/// (recorded in seeds_removed) so the cascade can start on a full complex.
struct CoreductionPair {
  int face_dim = 0;
  CellId face = 0;
  CellId coface = 0;  // dimension face_dim + 1
};

struct CoreduceResult {
  ChainComplex reduced;  // algebraic chain complex (not face-closed in general)
  std::array<std::vector<CellId>, ChainComplex::kMaxDim + 1> new_to_old;
  int seeds_removed = 0;
  std::vector<CoreductionPair> pairs;  // removal order, ids in the input complex
};

CoreduceResult coreduce(const ChainComplex& cx, bool seed_components = false);

/// Betti numbers / torsion from full Smith Normal Form of every boundary
/// matrix, no reductions. The correctness oracle for the reduced path.
BettiTable betti_oracle(const ChainComplex& cx);

/// Reduced path: shaving, then coreduction, then SNF on the residue.
BettiTable betti_reduced(const ChainComplex& cx);

/// Number of connected components (exact, union-find over vertices and edges).
int component_count(const ChainComplex& cx);

/// Homology of the complex as given (for relative homology pass the quotient
/// complex). Generators are computed by direct SNF on the input complex.
HomologyResult homology(const ChainComplex& cx, int d, bool want_generators = true);

/// Cohomology over the integers; generator cocycles are valid in `cx` (the
/// computation runs on the shaved quotient and lifts by zero-extension).
/// Throws if H_{d-1} has torsion, which would invalidate the integer
/// cocycle basis extraction.
HomologyResult cohomology(const ChainComplex& cx, int d);

/// Relative homology H_d(cx, sub); generators are relative cycles (their
/// boundary is supported in `sub`).
HomologyResult relative_homology(const ChainComplex& cx, const SubcomplexView& sub, int d);

/// Mod-2 variants, used by the counter-example path only. Generator
/// coefficients are 0/1.
HomologyResult cohomology_mod2(const ChainComplex& cx, int d);

}  // namespace topocut
