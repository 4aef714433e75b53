#pragma once

#include <map>
#include <string>
#include <vector>

#include "topocut/mesh.hpp"
#include "topocut/snf.hpp"

namespace topocut {

/// Cuts of the insulating region: an integer basis of its first cohomology,
/// normalized so the pairing with the boundary loops of the conductor
/// cross-sections is the identity. All chains use parent-complex ids; cuts
/// are stored on insulator edges only and read as zero elsewhere.
struct CutSet {
  int n = 0;
  std::vector<IntChain> cuts;    // 1-cocycles on the insulating region
  std::vector<IntChain> sigma;   // relative 2-cycles in the conductor
  std::vector<IntChain> loops;   // boundary of sigma, 1-cycles on the interface
  std::vector<std::vector<Int>> pairing;  // <cut_i, loop_j>, identity
};

/// Pipeline: cohomology of the insulating region, relative second homology of
/// the conductor modulo its boundary, pairing, then re-basing of the cuts by
/// the inverse transpose of the pairing matrix (which must be unimodular).
CutSet compute_cuts(const ChainComplex& cx, const RegionLabeling& regions);

/// Factored rational solver for boundary(s) = c (2-chain spanning a 1-cycle).
/// The complex must have trivial first homology so every cycle bounds.
class SpanningChainSolver {
 public:
  explicit SpanningChainSolver(const ChainComplex& cx);

  /// A spanning 2-chain for the cycle; throws if `cycle` is not a cycle or
  /// does not bound.
  std::map<CellId, Rational> solve(const IntChain& cycle) const;

  const ChainComplex& complex() const { return *cx_; }

 private:
  const ChainComplex* cx_;
  SNFResult snf_;  // of the face boundary matrix, with U and V transforms
};

/// Current linked by a 1-cycle: <I, s> for any spanning 2-chain s. The choice
/// of s does not matter when delta I = 0 on conductor volumes and I = 0 on
/// insulator faces.
Rational linked_current(const SpanningChainSolver& solver, const IntChain& cycle, const IntChain& current);
Complex linked_current(const SpanningChainSolver& solver, const IntChain& cycle, const CxCochain& current);

/// Unit current cochain of a closed conductor voxel loop: +-1 on the faces
/// between consecutive loop voxels, zero elsewhere. Exactly divergence-free.
IntChain loop_current_faces(const Skeleton& skeleton, const std::vector<std::array<int, 3>>& loop);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Checks the CutSet invariants: cocycle condition, support, pairing
/// identity, and invariance of every evaluation under `trials` random
/// homologous perturbations of each loop.
VerifyReport verify_cutset(const CutSet& cs, const ChainComplex& cx, const RegionLabeling& regions,
                           int trials = 3, unsigned seed = 0);

struct Z2Report {
  Int coil_eval_z = 0;        // integer cut evaluated on the axial cycle
  Rational coil_linked = 0;   // linked-current oracle for the same cycle
  int coil_eval_mod2 = 0;     // mod-2 generator evaluated on the same cycle
  Int torus_eval_z = 0;       // single-turn control
  int torus_eval_mod2 = 0;
  bool demonstrates = false;  // coil: Z matches the oracle, mod 2 does not
  bool control_agrees = false;
};

/// Demonstrates that cuts cannot be computed mod 2: on the two-turn coil the
/// integer cut reproduces the linked current (2) on the axial cycle while the
/// mod-2 generator evaluates to 0. A single-turn torus control agrees on both.
Z2Report z2_counterexample_check();

std::string serialize_cutset(const CutSet& cs);
CutSet parse_cutset(const std::string& text);  // sigma is not serialized

}  // namespace topocut
