#include "topocut/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"

namespace topocut {

namespace {

using P3 = std::array<double, 3>;

P3 sub(const P3& a, const P3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

P3 cross(const P3& a, const P3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const P3& a, const P3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const P3& a) { return std::sqrt(dot(a, a)); }

double tri_area(const P3& a, const P3& b, const P3& c) { return 0.5 * norm(cross(sub(b, a), sub(c, a))); }

P3 barycenter(const Skeleton& sk, int d, CellId id) {
  P3 acc{0.0, 0.0, 0.0};
  const auto& vs = sk.cell_vertices[static_cast<std::size_t>(d)][static_cast<std::size_t>(id)];
  for (CellId v : vs)
    for (int k = 0; k < 3; ++k) acc[static_cast<std::size_t>(k)] += sk.positions[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
  for (int k = 0; k < 3; ++k) acc[static_cast<std::size_t>(k)] /= static_cast<double>(vs.size());
  return acc;
}

/// Convex planar polygon area; the vertex list may come in any order.
double face_area(const Skeleton& sk, CellId f) {
  const auto& vs = sk.cell_vertices[2][static_cast<std::size_t>(f)];
  std::vector<P3> pts;
  for (CellId v : vs) pts.push_back(sk.positions[static_cast<std::size_t>(v)]);
  if (pts.size() == 3) return tri_area(pts[0], pts[1], pts[2]);
  P3 c{0.0, 0.0, 0.0};
  for (const P3& p : pts)
    for (int k = 0; k < 3; ++k) c[static_cast<std::size_t>(k)] += p[static_cast<std::size_t>(k)] / static_cast<double>(pts.size());
  P3 n = cross(sub(pts[1], pts[0]), sub(pts[2], pts[0]));
  if (norm(n) == 0.0) n = cross(sub(pts[1], pts[0]), sub(pts[3], pts[0]));
  P3 u = sub(pts[0], c);
  double ul = norm(u);
  for (double& x : u) x /= ul;
  P3 w = cross(n, u);
  double wl = norm(w);
  for (double& x : w) x /= wl;
  std::sort(pts.begin(), pts.end(), [&](const P3& a, const P3& b) {
    return std::atan2(dot(sub(a, c), w), dot(sub(a, c), u)) < std::atan2(dot(sub(b, c), w), dot(sub(b, c), u));
  });
  double area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) area += tri_area(c, pts[i], pts[(i + 1) % pts.size()]);
  return area;
}

double to_d(const Int& v) { return v.convert_to<double>(); }

}  // namespace

Constitutive build_constitutive(const Skeleton& sk, const MaterialParams& params) {
  if (!(params.mu > 0.0) || !(params.rho > 0.0)) throw SolverError("material parameters must be positive");
  const ChainComplex& cx = sk.complex;
  int n_edges = cx.cell_count(1);
  int n_faces = cx.cell_count(2);

  // Dual face around an edge: one quadrilateral piece per incident volume,
  // spanned by the edge midpoint, the two face barycenters and the volume
  // barycenter. Dual edge across a face: barycenter-to-barycenter segments,
  // conductor side only for rho.
  std::vector<double> dual_area(static_cast<std::size_t>(n_edges), 0.0);
  std::vector<double> dual_len(static_cast<std::size_t>(n_faces), 0.0);
  for (CellId v = 0; v < cx.cell_count(3); ++v) {
    P3 bt = barycenter(sk, 3, v);
    bool cond = sk.regions.conductor.contains(3, v);
    std::map<CellId, std::vector<CellId>> around;  // edge -> the two faces of v meeting it
    for (const auto& [f, sf] : cx.faces(3, v)) {
      if (cond) dual_len[static_cast<std::size_t>(f)] += norm(sub(barycenter(sk, 2, f), bt));
      for (const auto& [e, se] : cx.faces(2, f)) around[e].push_back(f);
    }
    for (const auto& [e, fs] : around) {
      if (fs.size() != 2) throw SolverError("degenerate volume: edge not shared by two faces");
      const auto& ends = sk.cell_vertices[1][static_cast<std::size_t>(e)];
      P3 m{0.0, 0.0, 0.0};
      for (int k = 0; k < 3; ++k)
        m[static_cast<std::size_t>(k)] = 0.5 * (sk.positions[static_cast<std::size_t>(ends[0])][static_cast<std::size_t>(k)] +
                                                sk.positions[static_cast<std::size_t>(ends[1])][static_cast<std::size_t>(k)]);
      P3 b0 = barycenter(sk, 2, fs[0]);
      P3 b1 = barycenter(sk, 2, fs[1]);
      dual_area[static_cast<std::size_t>(e)] += tri_area(m, b0, bt) + tri_area(m, bt, b1);
    }
  }

  Constitutive out;
  out.mu_edge.resize(static_cast<std::size_t>(n_edges));
  out.rho_face.resize(static_cast<std::size_t>(n_faces));
  for (CellId e = 0; e < n_edges; ++e) {
    const auto& ends = sk.cell_vertices[1][static_cast<std::size_t>(e)];
    double len = norm(sub(sk.positions[static_cast<std::size_t>(ends[1])], sk.positions[static_cast<std::size_t>(ends[0])]));
    if (!(len > 0.0) || !(dual_area[static_cast<std::size_t>(e)] > 0.0))
      throw SolverError("degenerate cell: nonpositive metric quantity");
    out.mu_edge[static_cast<std::size_t>(e)] = params.mu * dual_area[static_cast<std::size_t>(e)] / len;
  }
  for (CellId f = 0; f < n_faces; ++f) {
    double a = face_area(sk, f);
    if (!(a > 0.0)) throw SolverError("degenerate cell: nonpositive face area");
    out.rho_face[static_cast<std::size_t>(f)] =
        dual_len[static_cast<std::size_t>(f)] > 0.0 ? params.rho * dual_len[static_cast<std::size_t>(f)] / a : 0.0;
  }
  return out;
}

namespace {

constexpr int kSourceCol = -2;

/// Per-edge unknown profiles: F(e) = sum of coeff * unknown over the terms of
/// edge e, with the prescribed source appearing under kSourceCol.
struct Profiles {
  std::vector<std::vector<std::pair<int, double>>> edge;  // B columns, edgewise
  std::vector<std::map<int, double>> face;                // curl of the non-Omega columns
};

Profiles build_profiles(const ChainComplex& cx, const CutSet& cs, const Constitutive& mats, int n_nodes,
                        const std::vector<int>& t_col, const std::vector<int>& current_col) {
  Profiles p;
  p.edge.resize(static_cast<std::size_t>(cx.cell_count(1)));
  p.face.resize(static_cast<std::size_t>(cx.cell_count(2)));
  for (CellId e = 0; e < cx.cell_count(1); ++e) {
    for (const auto& [n, s] : cx.faces(1, e)) p.edge[static_cast<std::size_t>(e)].push_back({n, static_cast<double>(s)});
    if (t_col[static_cast<std::size_t>(e)] >= 0) {
      int col = n_nodes + t_col[static_cast<std::size_t>(e)];
      p.edge[static_cast<std::size_t>(e)].push_back({col, 1.0});
      for (const auto& [f, s] : cx.cofaces(1, e))
        if (mats.rho_face[static_cast<std::size_t>(f)] > 0.0) p.face[static_cast<std::size_t>(f)][col] += static_cast<double>(s);
    }
  }
  for (int j = 0; j < cs.n; ++j) {
    int col = current_col[static_cast<std::size_t>(j)];
    for (const auto& [e, v] : cs.cuts[static_cast<std::size_t>(j)].coeffs) {
      double cv = to_d(v);
      p.edge[static_cast<std::size_t>(e)].push_back({col, cv});
      for (const auto& [f, s] : cx.cofaces(1, e))
        if (mats.rho_face[static_cast<std::size_t>(f)] > 0.0) p.face[static_cast<std::size_t>(f)][col] += static_cast<double>(s) * cv;
    }
  }
  return p;
}

}  // namespace

TOmegaSystem assemble(const Skeleton& sk, const CutSet& cs, const Constitutive& mats, double omega,
                      const SourceSpec& source) {
  if (omega < 0.0) throw SolverError("omega must be nonnegative");
  if (cs.n == 0) throw SolverError("no source possible: the cut set is empty, nothing drives the problem");
  if (source.cut_index < 0 || source.cut_index >= cs.n) throw SolverError("source cut index out of range");
  const ChainComplex& cx = sk.complex;
  if (static_cast<int>(mats.mu_edge.size()) != cx.cell_count(1) ||
      static_cast<int>(mats.rho_face.size()) != cx.cell_count(2))
    throw SolverError("constitutive matrices do not match the complex");

  TOmegaSystem sys;
  sys.omega = omega;
  sys.source = source;
  sys.n_nodes = cx.cell_count(0);

  std::vector<int> t_col(static_cast<std::size_t>(cx.cell_count(1)), -1);
  for (CellId e = 0; e < cx.cell_count(1); ++e)
    if (sk.regions.conductor.contains(1, e) && !sk.regions.insulator.contains(1, e)) {
      t_col[static_cast<std::size_t>(e)] = static_cast<int>(sys.t_edges.size());
      sys.t_edges.push_back(e);
    }

  // Gauge: one constant per component (the skeleton is connected by
  // construction), and zero at every node whose edge star is entirely
  // conductor-interior. Gradients supported at such nodes live inside the T
  // space, so leaving Omega free there would make the system singular.
  std::vector<char> pin(static_cast<std::size_t>(sys.n_nodes), 0);
  pin[0] = 1;
  sys.pinned_nodes.push_back(0);
  for (CellId n = 1; n < sys.n_nodes; ++n) {
    bool deep = true;
    for (const auto& [e, s] : cx.cofaces(0, n)) deep = deep && t_col[static_cast<std::size_t>(e)] >= 0;
    if (deep) {
      pin[static_cast<std::size_t>(n)] = 1;
      sys.pinned_nodes.push_back(n);
    }
  }
  // At omega = 0 the local Faraday rows lose their mu term and leave any
  // circulating interior T undetermined; refuse instead of returning one
  // arbitrary member of the solution family.
  if (omega == 0.0 && !sys.t_edges.empty())
    throw SolverError("rank deficient at omega = 0: local Faraday rows cannot determine the interior T");

  bool prescribe_current = source.kind == SourceSpec::Kind::Current;
  sys.current_col.assign(static_cast<std::size_t>(cs.n), kSourceCol);
  int dim = sys.n_nodes + static_cast<int>(sys.t_edges.size());
  for (int j = 0; j < cs.n; ++j)
    if (!(prescribe_current && j == source.cut_index)) sys.current_col[static_cast<std::size_t>(j)] = dim++;

  Profiles p = build_profiles(cx, cs, mats, sys.n_nodes, t_col, sys.current_col);

  // A = s * B^T M B + S^T P S with B the edge profiles and S their curls
  // (Omega columns excluded from S, their curl vanishes identically). Both
  // summands are assembled as symmetric products, so A is symmetric to the
  // bit for omega > 0. At omega = 0 the node rows keep unit scale s so the
  // magnetostatic problem stays solvable; symmetry is lost there.
  const Complex iw{0.0, omega};
  const Complex node_scale = omega > 0.0 ? iw : Complex{1.0, 0.0};
  std::vector<Eigen::Triplet<Complex>> trip;
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(dim);
  auto node_pinned = [&](int u) { return u >= 0 && u < sys.n_nodes && pin[static_cast<std::size_t>(u)]; };
  auto emit = [&](int u, int v, const Complex& val) {
    if (u < 0 || node_pinned(u) || node_pinned(v)) return;
    if (v == kSourceCol)
      b[u] -= val * source.value;
    else
      trip.emplace_back(u, v, val);
  };
  for (CellId e = 0; e < cx.cell_count(1); ++e) {
    double mu = mats.mu_edge[static_cast<std::size_t>(e)];
    const auto& terms = p.edge[static_cast<std::size_t>(e)];
    for (const auto& [u, a] : terms) {
      Complex row_scale = u < sys.n_nodes ? node_scale : iw;
      for (const auto& [v, c] : terms) emit(u, v, row_scale * (mu * a * c));
    }
  }
  for (CellId f = 0; f < cx.cell_count(2); ++f) {
    double rho = mats.rho_face[static_cast<std::size_t>(f)];
    if (rho <= 0.0) continue;
    const auto& terms = p.face[static_cast<std::size_t>(f)];
    for (const auto& [u, a] : terms)
      for (const auto& [v, c] : terms) emit(u, v, Complex{rho * a * c, 0.0});
  }
  for (CellId n : sys.pinned_nodes) trip.emplace_back(n, n, Complex{1.0, 0.0});
  if (!prescribe_current) b[sys.current_col[static_cast<std::size_t>(source.cut_index)]] += source.value;

  sys.A.resize(dim, dim);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  sys.b = std::move(b);
  return sys;
}

FieldSolution solve(const TOmegaSystem& sys, const Skeleton& sk, const CutSet& cs, const Constitutive& mats) {
  const ChainComplex& cx = sk.complex;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(sys.A);
  if (lu.info() != Eigen::Success)
    throw SolverError("singular system beyond gauge: factorization failed (rank-deficient law family)");
  Eigen::VectorXcd x = lu.solve(sys.b);
  if (lu.info() != Eigen::Success) throw SolverError("linear solve failed");

  FieldSolution sol;
  double bn = sys.b.norm();
  sol.linear_residual = bn > 0.0 ? (sys.A * x - sys.b).norm() / bn : (sys.A * x).norm();
  if (!(sol.linear_residual <= 1e-10)) throw SolverError("linear solve did not reach the residual tolerance");

  sol.Omega = CxCochain(0, static_cast<std::size_t>(cx.cell_count(0)));
  for (CellId n = 0; n < cx.cell_count(0); ++n) sol.Omega[n] = x[n];
  sol.T = CxCochain(1, static_cast<std::size_t>(cx.cell_count(1)));
  for (std::size_t k = 0; k < sys.t_edges.size(); ++k) sol.T[sys.t_edges[k]] = x[sys.n_nodes + static_cast<int>(k)];
  sol.currents.assign(static_cast<std::size_t>(cs.n), Complex{0.0, 0.0});
  for (int j = 0; j < cs.n; ++j) {
    int col = sys.current_col[static_cast<std::size_t>(j)];
    sol.currents[static_cast<std::size_t>(j)] = col >= 0 ? x[col] : sys.source.value;
  }

  sol.F = CxCochain(1, static_cast<std::size_t>(cx.cell_count(1)));
  for (CellId e = 0; e < cx.cell_count(1); ++e) {
    Complex acc = sol.T[e];
    for (const auto& [n, s] : cx.faces(1, e)) acc += static_cast<double>(s) * sol.Omega[n];
    for (int j = 0; j < cs.n; ++j) {
      const Int& v = cs.cuts[static_cast<std::size_t>(j)].at(e);
      if (v != 0) acc += to_d(v) * sol.currents[static_cast<std::size_t>(j)];
    }
    sol.F[e] = acc;
  }

  // I is the structural curl of F: the delta-delta-Omega part is dropped as an
  // algebraic identity, which keeps I exactly zero on insulator faces (T and
  // the cut curls vanish there by construction).
  sol.I = cx.coboundary(sol.T);
  for (int j = 0; j < cs.n; ++j) {
    IntChain dc = cx.coboundary(cs.cuts[static_cast<std::size_t>(j)]);
    for (const auto& [f, v] : dc.coeffs) sol.I[f] += to_d(v) * sol.currents[static_cast<std::size_t>(j)];
  }

  sol.Phi = CxCochain(1, static_cast<std::size_t>(cx.cell_count(1)));
  for (CellId e = 0; e < cx.cell_count(1); ++e) sol.Phi[e] = mats.mu_edge[static_cast<std::size_t>(e)] * sol.F[e];
  sol.U = CxCochain(2, static_cast<std::size_t>(cx.cell_count(2)));
  for (CellId f = 0; f < cx.cell_count(2); ++f) sol.U[f] = mats.rho_face[static_cast<std::size_t>(f)] * sol.I[f];
  return sol;
}

LawReport check_laws(const FieldSolution& sol, const Skeleton& sk, const CutSet& cs, const Constitutive& mats,
                     double omega, int driven_cut) {
  const ChainComplex& cx = sk.complex;
  LawReport r;

  // Exact families. delta F = delta delta Omega + delta T + sum i_j delta c^j;
  // the first term is zero by the incidence identity (verified below over the
  // integers), so the families are evaluated on the structural remainder.
  Int dd_defect = 0;
  for (CellId v = 0; v < cx.cell_count(3); ++v) {
    std::map<CellId, int> acc;
    for (const auto& [f, sf] : cx.faces(3, v))
      for (const auto& [e, se] : cx.faces(2, f)) acc[e] += static_cast<int>(sf) * static_cast<int>(se);
    for (const auto& [e, k] : acc) dd_defect += k == 0 ? 0 : 1;
  }
  r.continuity = dd_defect == 0 ? 0.0 : 1.0;

  CxCochain dF = cx.coboundary(sol.T);
  for (int j = 0; j < cs.n; ++j) {
    IntChain dc = cx.coboundary(cs.cuts[static_cast<std::size_t>(j)]);
    for (const auto& [f, v] : dc.coeffs) dF[f] += to_d(v) * sol.currents[static_cast<std::size_t>(j)];
  }
  for (CellId f = 0; f < cx.cell_count(2); ++f) {
    if (sk.regions.insulator.contains(2, f)) {
      r.ampere_air = std::max(r.ampere_air, std::abs(dF[f]));
      r.ampere_air = std::max(r.ampere_air, std::abs(sol.I[f]));
    } else {
      r.ampere_conductor = std::max(r.ampere_conductor, std::abs(dF[f] - sol.I[f]));
    }
  }

  double phi_max = 0.0, u_max = 0.0;
  for (const Complex& v : sol.Phi.values) phi_max = std::max(phi_max, std::abs(v));
  for (const Complex& v : sol.U.values) u_max = std::max(u_max, std::abs(v));
  const Complex iw{0.0, omega};

  double gauss_abs = 0.0;
  for (CellId n = 0; n < cx.cell_count(0); ++n) {
    Complex acc{0.0, 0.0};
    for (const auto& [e, s] : cx.cofaces(0, n)) acc += static_cast<double>(s) * sol.Phi[e];
    gauss_abs = std::max(gauss_abs, std::abs(acc));
  }
  r.gauss = phi_max > 0.0 ? gauss_abs / phi_max : 0.0;

  auto dual_curl = [&](CellId e) {
    Complex acc{0.0, 0.0};
    for (const auto& [f, s] : cx.cofaces(1, e)) acc += static_cast<double>(s) * sol.U[f];
    return acc;
  };
  double far_denom = std::max(u_max, omega * phi_max);
  double far_abs = 0.0;
  for (CellId e = 0; e < cx.cell_count(1); ++e)
    if (sk.regions.conductor.contains(1, e) && !sk.regions.insulator.contains(1, e))
      far_abs = std::max(far_abs, std::abs(dual_curl(e) + iw * sol.Phi[e]));
  r.faraday_local = far_denom > 0.0 ? far_abs / far_denom : 0.0;

  double nl_abs = 0.0;
  for (int j = 0; j < cs.n; ++j) {
    if (j == driven_cut) continue;
    Complex acc{0.0, 0.0};
    double weight = 0.0;
    for (const auto& [e, v] : cs.cuts[static_cast<std::size_t>(j)].coeffs) {
      double cv = to_d(v);
      weight += std::abs(cv);
      acc += cv * (dual_curl(e) + iw * sol.Phi[e]);
    }
    if (far_denom > 0.0 && weight > 0.0) nl_abs = std::max(nl_abs, std::abs(acc) / (weight * far_denom));
  }
  r.faraday_nonlocal = nl_abs;

  double cur_max = 0.0;
  for (const Complex& v : sol.currents) cur_max = std::max(cur_max, std::abs(v));
  double amp_abs = 0.0;
  for (int j = 0; j < cs.n; ++j) {
    Complex got = inner_product(cs.loops[static_cast<std::size_t>(j)], sol.F);
    amp_abs = std::max(amp_abs, std::abs(got - sol.currents[static_cast<std::size_t>(j)]));
  }
  r.ampere_nonlocal = amp_abs / std::max(cur_max, 1e-300);
  (void)mats;
  return r;
}

std::string serialize_solution(const FieldSolution& sol, const TOmegaSystem& sys, const LawReport& report) {
  nlohmann::ordered_json j;
  j["omega_rad_s"] = sys.omega;
  j["source"] = {{"kind", sys.source.kind == SourceSpec::Kind::Current ? "current" : "emf"},
                 {"cut", sys.source.cut_index},
                 {"value", {sys.source.value.real(), sys.source.value.imag()}}};
  auto currents = nlohmann::ordered_json::array();
  for (const Complex& c : sol.currents) currents.push_back({c.real(), c.imag()});
  j["currents"] = std::move(currents);
  j["residuals"] = {{"linear", sol.linear_residual},
                    {"continuity", report.continuity},
                    {"ampere_air", report.ampere_air},
                    {"ampere_conductor", report.ampere_conductor},
                    {"gauss", report.gauss},
                    {"faraday_local", report.faraday_local},
                    {"faraday_nonlocal", report.faraday_nonlocal},
                    {"ampere_nonlocal", report.ampere_nonlocal}};
  auto omega_dof = nlohmann::ordered_json::array();
  for (const Complex& c : sol.Omega.values) omega_dof.push_back({c.real(), c.imag()});
  auto t_dof = nlohmann::ordered_json::array();
  for (CellId e : sys.t_edges) t_dof.push_back({e, {sol.T[e].real(), sol.T[e].imag()}});
  j["dof"] = {{"Omega", std::move(omega_dof)}, {"T", std::move(t_dof)}};
  return j.dump(2) + "\n";
}

}  // namespace topocut
