#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "topocut/cuts.hpp"
#include "topocut/mesh.hpp"

namespace topocut {

struct MaterialParams {
  double mu = 1.25663706212e-6;  // permeability, henry per meter
  double rho = 1.68e-8;          // conductor resistivity, ohm meter
};

/// Lumped diagonal constitutive matrices on the barycentric dual metric:
/// mu entry per edge = mu * (dual face area) / (edge length); rho entry per
/// face = rho * (dual edge length) / (face area), zero outside the conductor.
struct Constitutive {
  std::vector<double> mu_edge;   // size = edge count, all positive
  std::vector<double> rho_face;  // size = face count, zero in the insulator
};

Constitutive build_constitutive(const Skeleton& skeleton, const MaterialParams& params);

struct SourceSpec {
  enum class Kind { Current, Emf };
  Kind kind = Kind::Current;
  int cut_index = 0;
  Complex value{1.0, 0.0};  // ampere for Current, volt for Emf
};

/// Assembled frequency-domain system. Unknown order: Omega per node, then T
/// per conductor-interior edge, then one current per cut (minus a prescribed
/// one). The matrix is exactly symmetric for omega > 0; at omega = 0 the node
/// rows are left unscaled (magnetostatic fallback) and symmetry is lost.
struct TOmegaSystem {
  Eigen::SparseMatrix<Complex> A;
  Eigen::VectorXcd b;
  std::vector<CellId> t_edges;     // conductor edges carrying a T unknown
  std::vector<int> current_col;    // cut index -> column, negative if prescribed
  int n_nodes = 0;
  // Omega gauge: one node per component, plus every node whose whole edge
  // star is conductor-interior (there delta Omega is absorbed by T and the
  // pair would be redundant). Pinned symmetrically to zero.
  std::vector<CellId> pinned_nodes;
  double omega = 0.0;
  SourceSpec source;
};

TOmegaSystem assemble(const Skeleton& skeleton, const CutSet& cutset, const Constitutive& mats,
                      double omega, const SourceSpec& source);

struct FieldSolution {
  CxCochain Omega;  // nodes, ampere
  CxCochain T;      // edges, ampere; zero outside the conductor interior
  CxCochain F;      // edges, ampere (magneto-motive force)
  CxCochain I;      // faces, ampere; structural delta F on the conductor
  CxCochain Phi;    // dual faces (indexed by edges), weber
  CxCochain U;      // dual edges (indexed by faces), volt
  std::vector<Complex> currents;  // all cut currents, prescribed included
  double linear_residual = 0.0;   // |Ax-b| / |b|
};

/// Direct sparse solve; throws SolverError on rank deficiency or when the
/// relative residual exceeds 1e-10.
FieldSolution solve(const TOmegaSystem& system, const Skeleton& skeleton, const CutSet& cutset,
                    const Constitutive& mats);

struct LawReport {
  // exact families, computed from integer structure (not float cancellation)
  double continuity = 0.0;        // delta I on every volume
  double ampere_air = 0.0;        // delta F on every insulator face
  double ampere_conductor = 0.0;  // delta F - I on every conductor face
  // float families, relative to the field magnitude
  double gauss = 0.0;             // dual divergence of Phi per node
  double faraday_local = 0.0;     // dual faces of the conductor interior
  double faraday_nonlocal = 0.0;  // per cut loop, driven loop excluded
  double ampere_nonlocal = 0.0;   // |<F, loop_j> - i_j|, relative

  bool ok(double tol) const {
    return continuity == 0.0 && ampere_air == 0.0 && ampere_conductor == 0.0 && gauss <= tol &&
           faraday_local <= tol && faraday_nonlocal <= tol && ampere_nonlocal <= tol;
  }
};

/// `driven_cut` marks the loop excluded from the non-local Faraday check (a
/// prescribed current is physically sustained by an external e.m.f. there).
LawReport check_laws(const FieldSolution& sol, const Skeleton& skeleton, const CutSet& cutset,
                     const Constitutive& mats, double omega, int driven_cut = -1);

std::string serialize_solution(const FieldSolution& sol, const TOmegaSystem& system, const LawReport& report);

}  // namespace topocut
