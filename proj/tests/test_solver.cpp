#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "topocut/cuts.hpp"
#include "topocut/scenes.hpp"
#include "topocut/solver.hpp"

using namespace topocut;

namespace {

Skeleton scene_skeleton(const std::string& name, int res) {
  return build_skeleton(generate_scene(name, res));
}

/// Ring of 2x2 voxel cross section around a 1x1 hole; exercises the T
/// unknowns and the conductor-deep Omega gauge.
Skeleton fat_torus() {
  Mesh m;
  for (int x = 0; x < 7; ++x)
    for (int y = 0; y < 7; ++y)
      for (int z = 0; z < 4; ++z) {
        m.voxels.push_back({x, y, z});
        bool c = z >= 1 && z <= 2 && x >= 1 && x <= 5 && y >= 1 && y <= 5 && !(x == 3 && y == 3);
        m.region.push_back(c ? RegionKind::Conductor : RegionKind::Insulator);
      }
  return build_skeleton(m);
}

int incident_volumes(const ChainComplex& cx, CellId e) {
  std::set<CellId> vols;
  for (const auto& [f, sf] : cx.cofaces(1, e))
    for (const auto& [v, sv] : cx.cofaces(2, f)) vols.insert(v);
  return static_cast<int>(vols.size());
}

double symmetry_defect(const Eigen::SparseMatrix<Complex>& A) {
  Eigen::SparseMatrix<Complex> At = A.transpose();
  double worst = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(A, k); it; ++it)
      worst = std::max(worst, std::abs(it.value() - At.coeff(it.row(), it.col())));
  return worst;
}

Complex loop_emf(const ChainComplex& cx, const FieldSolution& sol, const IntChain& cut, double omega) {
  Complex acc{0.0, 0.0};
  for (const auto& [e, v] : cut.coeffs) {
    Complex curl{0.0, 0.0};
    for (const auto& [f, s] : cx.cofaces(1, e)) curl += static_cast<double>(s) * sol.U[f];
    acc += v.convert_to<double>() * (curl + Complex{0.0, omega} * sol.Phi[e]);
  }
  return acc;
}

}  // namespace

TEST_CASE("voxel constitutive entries follow the dual metric") {
  Skeleton sk = scene_skeleton("solid-torus", 3);
  Constitutive c = build_constitutive(sk, {1.0, 1.0});

  // unit pitch: mu entry = (incident volumes)/4 exactly, rho entry =
  // (adjacent conductor volumes)/2 exactly
  for (CellId e = 0; e < sk.complex.cell_count(1); ++e)
    CHECK(c.mu_edge[static_cast<std::size_t>(e)] == static_cast<double>(incident_volumes(sk.complex, e)) / 4.0);
  int conductor_faces = 0;
  for (CellId f = 0; f < sk.complex.cell_count(2); ++f) {
    int kc = 0;
    for (const auto& [v, s] : sk.complex.cofaces(2, f))
      if (sk.regions.conductor.contains(3, v)) ++kc;
    CHECK(c.rho_face[static_cast<std::size_t>(f)] == static_cast<double>(kc) / 2.0);
    if (kc > 0) ++conductor_faces;
    if (!sk.regions.conductor.contains(2, f)) CHECK(c.rho_face[static_cast<std::size_t>(f)] == 0.0);
  }
  CHECK(conductor_faces > 0);

  Constitutive doubled = build_constitutive(sk, {2.0, 1.0});
  for (std::size_t i = 0; i < c.mu_edge.size(); ++i) CHECK(doubled.mu_edge[i] == 2.0 * c.mu_edge[i]);

  CHECK_THROWS_AS((void)build_constitutive(sk, {0.0, 1.0}), SolverError);
  CHECK_THROWS_AS((void)build_constitutive(sk, {1.0, -1.0}), SolverError);
}

TEST_CASE("tet constitutive entries are positive") {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  m.tets = {{0, 1, 2, 3}, {1, 2, 3, 4}};
  m.region = {RegionKind::Conductor, RegionKind::Insulator};
  Skeleton sk = build_skeleton(m);
  Constitutive c = build_constitutive(sk, {1.0, 1.0});
  for (double v : c.mu_edge) CHECK(v > 0.0);
  for (CellId f = 0; f < sk.complex.cell_count(2); ++f) {
    bool cond = sk.regions.conductor.contains(2, f);
    CHECK((c.rho_face[static_cast<std::size_t>(f)] > 0.0) == cond);
  }
}

TEST_CASE("assembled system shape, symmetry and source handling") {
  Skeleton sk = scene_skeleton("solid-torus", 3);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  Constitutive mats = build_constitutive(sk, {1.0, 1.0});
  double omega = 2.0 * M_PI * 50.0;
  TOmegaSystem sys = assemble(sk, cs, mats, omega, {});

  CHECK(sys.t_edges.empty());  // one voxel thick: no conductor-interior edges
  CHECK(sys.A.rows() == sk.complex.cell_count(0));
  CHECK(symmetry_defect(sys.A) == 0.0);
  CHECK(sys.b.norm() > 0.0);
  CHECK(sys.pinned_nodes == std::vector<CellId>{0});

  SourceSpec bad;
  bad.cut_index = 5;
  CHECK_THROWS_AS((void)assemble(sk, cs, mats, omega, bad), SolverError);
  CHECK_THROWS_AS((void)assemble(sk, cs, mats, -1.0, {}), SolverError);
}

TEST_CASE("thick conductor gets T unknowns and deep node pins") {
  Skeleton sk = fat_torus();
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  REQUIRE(cs.n == 1);
  Constitutive mats = build_constitutive(sk, {1.0, 1.0});
  double omega = 2.0 * M_PI * 50.0;
  TOmegaSystem sys = assemble(sk, cs, mats, omega, {});

  REQUIRE_FALSE(sys.t_edges.empty());
  CHECK(sys.pinned_nodes.size() > 1);
  CHECK(sys.A.rows() == sk.complex.cell_count(0) + static_cast<int>(sys.t_edges.size()));
  CHECK(symmetry_defect(sys.A) == 0.0);

  FieldSolution sol = solve(sys, sk, cs, mats);
  LawReport r = check_laws(sol, sk, cs, mats, omega, 0);
  CHECK(r.continuity == 0.0);
  CHECK(r.ampere_air == 0.0);
  CHECK(r.ampere_conductor == 0.0);
  CHECK(r.gauss <= 1e-9);
  CHECK(r.faraday_local <= 1e-9);
  CHECK(r.ampere_nonlocal <= 1e-9);
  CHECK(r.ok(1e-9));

  // omega = 0 leaves circulating interior T undetermined; the assembly must
  // report the rank deficiency instead of handing one arbitrary solution back
  CHECK_THROWS_AS((void)assemble(sk, cs, mats, 0.0, {}), SolverError);
}

TEST_CASE("a structurally singular system is reported, not solved") {
  Skeleton sk = scene_skeleton("solid-torus", 3);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  Constitutive mats = build_constitutive(sk, {1.0, 1.0});
  cs.cuts[0] = IntChain(1);  // zero column and zero row for the current
  SourceSpec emf;
  emf.kind = SourceSpec::Kind::Emf;
  TOmegaSystem sys = assemble(sk, cs, mats, 2.0 * M_PI * 50.0, emf);
  CHECK_THROWS_AS((void)solve(sys, sk, cs, mats), SolverError);
}

TEST_CASE("no cuts means nothing can drive the problem") {
  Mesh m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 3; ++k) {
        m.voxels.push_back({i, j, k});
        bool c = k == 1 && i >= 1 && i <= 2 && j >= 1 && j <= 2;
        m.region.push_back(c ? RegionKind::Conductor : RegionKind::Insulator);
      }
  Skeleton sk = build_skeleton(m);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  Constitutive mats = build_constitutive(sk, {1.0, 1.0});
  CHECK_THROWS_AS((void)assemble(sk, cs, mats, 1.0, {}), SolverError);
}

TEST_CASE("magnetostatic limit reproduces the linked current") {
  Skeleton sk = scene_skeleton("solid-torus", 3);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  Constitutive mats = build_constitutive(sk, {1.0, 1.0});
  TOmegaSystem sys = assemble(sk, cs, mats, 0.0, {});
  FieldSolution sol = solve(sys, sk, cs, mats);

  LawReport r = check_laws(sol, sk, cs, mats, 0.0, 0);
  CHECK(r.continuity == 0.0);
  CHECK(r.ampere_air == 0.0);  // F curl-free in the insulator
  CHECK(r.gauss <= 1e-9);
  CHECK(r.ampere_nonlocal <= 1e-9);

  IntChain probe = lattice_loop_chain(sk, scene_probes("solid-torus", 3)[0]);
  Complex through = inner_product(probe, sol.F);
  CHECK(std::abs(std::abs(through) - 1.0) <= 1e-9);

  SpanningChainSolver span(sk.complex);
  Complex linked = linked_current(span, probe, sol.I);
  CHECK(std::abs(through - linked) <= 1e-9);
}

TEST_CASE("solid torus at 50 Hz satisfies every law") {
  Skeleton sk = scene_skeleton("solid-torus", 3);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  Constitutive mats = build_constitutive(sk, {});
  double omega = 2.0 * M_PI * 50.0;
  TOmegaSystem sys = assemble(sk, cs, mats, omega, {});
  FieldSolution sol = solve(sys, sk, cs, mats);

  CHECK(sol.linear_residual <= 1e-10);
  CHECK(sol.currents[0] == Complex{1.0, 0.0});
  LawReport r = check_laws(sol, sk, cs, mats, omega, 0);
  CHECK(r.ok(1e-9));
  CHECK(std::abs(inner_product(cs.loops[0], sol.F) - Complex{1.0, 0.0}) <= 1e-9);

  // linearity in the prescribed source
  SourceSpec scaled;
  scaled.value = Complex{2.5, 0.0};
  FieldSolution sol2 = solve(assemble(sk, cs, mats, omega, scaled), sk, cs, mats);
  double fmax = 0.0, diff = 0.0;
  for (CellId e = 0; e < sk.complex.cell_count(1); ++e) {
    fmax = std::max(fmax, std::abs(sol2.F[e]));
    diff = std::max(diff, std::abs(sol2.F[e] - 2.5 * sol.F[e]));
  }
  CHECK(diff <= 1e-9 * fmax);
}

TEST_CASE("emf drive is consistent with current drive") {
  Skeleton sk = scene_skeleton("solid-torus", 3);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  Constitutive mats = build_constitutive(sk, {1.0, 1.0});
  double omega = 2.0 * M_PI * 50.0;

  FieldSolution by_current = solve(assemble(sk, cs, mats, omega, {}), sk, cs, mats);
  Complex z = loop_emf(sk.complex, by_current, cs.cuts[0], omega);  // impedance seen by unit current
  REQUIRE(std::abs(z) > 0.0);

  SourceSpec emf;
  emf.kind = SourceSpec::Kind::Emf;
  emf.value = z;
  FieldSolution by_emf = solve(assemble(sk, cs, mats, omega, emf), sk, cs, mats);
  CHECK(std::abs(by_emf.currents[0] - Complex{1.0, 0.0}) <= 1e-9);
}

TEST_CASE("two handles: prescribed and induced currents") {
  Skeleton sk = scene_skeleton("double-torus", 3);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  REQUIRE(cs.n == 2);
  Constitutive mats = build_constitutive(sk, {1.0, 1.0});
  double omega = 2.0 * M_PI * 50.0;
  TOmegaSystem sys = assemble(sk, cs, mats, omega, {});
  CHECK(sys.A.rows() == sk.complex.cell_count(0) + static_cast<int>(sys.t_edges.size()) + 1);
  CHECK(symmetry_defect(sys.A) == 0.0);

  FieldSolution sol = solve(sys, sk, cs, mats);
  CHECK(sol.currents[0] == Complex{1.0, 0.0});
  LawReport r = check_laws(sol, sk, cs, mats, omega, 0);
  CHECK(r.ok(1e-9));
  CHECK(std::abs(inner_product(cs.loops[1], sol.F) - sol.currents[1]) <= 1e-9);
}

TEST_CASE("a broken cut is flagged by the law report") {
  Skeleton sk = scene_skeleton("solid-torus", 3);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  CellId stray = -1;
  for (CellId e = 0; e < sk.complex.cell_count(1) && stray < 0; ++e)
    if (sk.regions.insulator.contains(1, e) && !sk.regions.interface.contains(1, e) && cs.cuts[0].at(e) == 0)
      stray = e;
  REQUIRE(stray >= 0);
  cs.cuts[0].add(stray, 1);  // no longer a cocycle

  Constitutive mats = build_constitutive(sk, {1.0, 1.0});
  double omega = 2.0 * M_PI * 50.0;
  FieldSolution sol = solve(assemble(sk, cs, mats, omega, {}), sk, cs, mats);
  LawReport r = check_laws(sol, sk, cs, mats, omega, 0);
  CHECK(r.ampere_air >= 0.5);
  CHECK_FALSE(r.ok(1e-9));
}

TEST_CASE("solution JSON carries currents and residuals") {
  Skeleton sk = scene_skeleton("solid-torus", 3);
  CutSet cs = compute_cuts(sk.complex, sk.regions);
  Constitutive mats = build_constitutive(sk, {});
  double omega = 2.0 * M_PI * 50.0;
  TOmegaSystem sys = assemble(sk, cs, mats, omega, {});
  FieldSolution sol = solve(sys, sk, cs, mats);
  LawReport r = check_laws(sol, sk, cs, mats, omega, 0);

  std::string text = serialize_solution(sol, sys, r);
  CHECK(text == serialize_solution(sol, sys, r));
  CHECK(text.find("\"omega_rad_s\"") != std::string::npos);
  CHECK(text.find("\"currents\"") != std::string::npos);
  CHECK(text.find("\"ampere_nonlocal\"") != std::string::npos);
  CHECK(text.find("\"Omega\"") != std::string::npos);
}
