#include "topocut/cuts.hpp"

#include <algorithm>
#include <random>

#include "json.hpp"
#include "topocut/homology.hpp"
#include "topocut/scenes.hpp"

namespace topocut {

namespace {

/// Exact inverse of a square integer matrix; throws unless unimodular.
std::vector<std::vector<Int>> invert_unimodular(const std::vector<std::vector<Int>>& p) {
  const std::size_t n = p.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = p[i][j];
    a[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw TopologyError("compute_cuts: pairing matrix is singular");
    std::swap(a[piv], a[col]);
    Rational d = a[col][col];
    for (auto& v : a[col]) v /= d;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      Rational f = a[i][col];
      for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  std::vector<std::vector<Int>> q(n, std::vector<Int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rational v = a[i][n + j];
      if (boost::multiprecision::denominator(v) != 1)
        throw TopologyError("compute_cuts: pairing matrix is not unimodular");
      q[i][j] = boost::multiprecision::numerator(v);
    }
  return q;
}

SubcomplexView view_on_slice(const ComplexSlice& slice, const SubcomplexView& parent_view) {
  SubcomplexView v(slice.complex);
  for (int d = 0; d <= ChainComplex::kMaxDim; ++d)
    for (CellId id = 0; id < slice.complex.cell_count(d); ++id)
      if (parent_view.contains(d, slice.new_to_old[d][static_cast<std::size_t>(id)])) v.insert(d, id);
  return v;
}

}  // namespace

CutSet compute_cuts(const ChainComplex& cx, const RegionLabeling& regions) {
  if (regions.conductor.empty() || regions.insulator.empty())
    throw TopologyError("compute_cuts: both regions must be nonempty");

  ComplexSlice air = restrict_complex(cx, regions.insulator);
  HomologyResult h1 = cohomology(air.complex, 1);
  if (!h1.torsion.empty()) throw TopologyError("compute_cuts: torsion in the insulating region");

  ComplexSlice cond = restrict_complex(cx, regions.conductor);
  SubcomplexView boundary = view_on_slice(cond, regions.interface);
  HomologyResult h2rel = relative_homology(cond.complex, boundary, 2);
  if (!h2rel.torsion.empty()) throw TopologyError("compute_cuts: torsion in the conductor cross-sections");
  if (h2rel.betti != h1.betti)
    throw TopologyError("compute_cuts: cohomology and relative homology ranks disagree");

  CutSet cs;
  cs.n = h1.betti;
  for (const IntChain& g : h1.generators) cs.cuts.push_back(air.lift(g));
  for (const IntChain& s : h2rel.generators) {
    IntChain sigma = cond.lift(s);
    cs.sigma.push_back(sigma);
    cs.loops.push_back(cx.boundary(sigma));
  }
  for (const IntChain& loop : cs.loops) {
    if (!cx.boundary(loop).zero()) throw TopologyError("compute_cuts: loop is not a cycle");
    for (const auto& [id, v] : loop.coeffs)
      if (!regions.interface.contains(1, id)) throw TopologyError("compute_cuts: loop leaves the interface");
  }

  std::vector<std::vector<Int>> p(static_cast<std::size_t>(cs.n), std::vector<Int>(static_cast<std::size_t>(cs.n)));
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j)
      p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          inner_product(cs.cuts[static_cast<std::size_t>(i)], cs.loops[static_cast<std::size_t>(j)]);

  // re-base the cuts so the pairing becomes the identity; sigma stays fixed
  // because the independent currents <I, sigma_j> carry physical meaning
  std::vector<std::vector<Int>> q = invert_unimodular(p);
  std::vector<IntChain> rebased;
  for (int i = 0; i < cs.n; ++i) {
    IntChain c(1);
    for (int k = 0; k < cs.n; ++k)
      c += q[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * cs.cuts[static_cast<std::size_t>(k)];
    rebased.push_back(std::move(c));
  }
  cs.cuts = std::move(rebased);

  cs.pairing.assign(static_cast<std::size_t>(cs.n), std::vector<Int>(static_cast<std::size_t>(cs.n)));
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j) {
      Int v = inner_product(cs.cuts[static_cast<std::size_t>(i)], cs.loops[static_cast<std::size_t>(j)]);
      if (v != Int(i == j ? 1 : 0)) throw TopologyError("compute_cuts: normalization failed");
      cs.pairing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
    }
  return cs;
}

SpanningChainSolver::SpanningChainSolver(const ChainComplex& cx) : cx_(&cx) {
  SNFOptions opt;
  opt.want_U = true;
  opt.want_V = true;
  snf_ = smith_normal_form(SparseIntMat::boundary_matrix(cx, 2), opt);
}

std::map<CellId, Rational> SpanningChainSolver::solve(const IntChain& cycle) const {
  if (cycle.dim != 1) throw TopologyError("SpanningChainSolver: input must be a 1-chain");
  if (!cx_->boundary(cycle).zero()) throw TopologyError("SpanningChainSolver: input is not a cycle");

  // s = V y with D y = U c
  std::vector<Int> uc(static_cast<std::size_t>(snf_.D.rows()), 0);
  for (const auto& [j, v] : cycle.coeffs)
    for (const auto& [i, u] : snf_.U.col(static_cast<int>(j))) uc[static_cast<std::size_t>(i)] += u * v;
  for (int i = snf_.rank; i < snf_.D.rows(); ++i)
    if (uc[static_cast<std::size_t>(i)] != 0)
      throw TopologyError("SpanningChainSolver: cycle does not bound (complex not trivial)");

  std::map<CellId, Rational> s;
  for (int i = 0; i < snf_.rank; ++i) {
    if (uc[static_cast<std::size_t>(i)] == 0) continue;
    Rational y(uc[static_cast<std::size_t>(i)], snf_.D.at(i, i));
    for (const auto& [f, v] : snf_.V.col(i)) {
      Rational& acc = s[static_cast<CellId>(f)];
      acc += y * v;
      if (acc == 0) s.erase(static_cast<CellId>(f));
    }
  }
  return s;
}

Rational linked_current(const SpanningChainSolver& solver, const IntChain& cycle, const IntChain& current) {
  if (current.dim != 2) throw TopologyError("linked_current: current must live on faces");
  Rational acc = 0;
  for (const auto& [f, w] : solver.solve(cycle)) acc += w * Rational(current.at(f));
  return acc;
}

Complex linked_current(const SpanningChainSolver& solver, const IntChain& cycle, const CxCochain& current) {
  if (current.dim != 2) throw TopologyError("linked_current: current must live on faces");
  Complex acc{0.0, 0.0};
  for (const auto& [f, w] : solver.solve(cycle)) acc += static_cast<double>(w) * current[f];
  return acc;
}

IntChain loop_current_faces(const Skeleton& skeleton, const std::vector<std::array<int, 3>>& loop) {
  if (!skeleton.voxel) throw TopologyError("loop_current_faces: voxel skeleton required");
  // min corner lattice position -> volume cell id
  std::map<std::array<int, 3>, CellId> volume_at;
  for (CellId v = 0; v < skeleton.complex.cell_count(3); ++v) {
    std::array<int, 3> corner{INT32_MAX, INT32_MAX, INT32_MAX};
    for (CellId vertex : skeleton.cell_vertices[3][static_cast<std::size_t>(v)]) {
      const auto& p = skeleton.positions[static_cast<std::size_t>(vertex)];
      for (int axis = 0; axis < 3; ++axis)
        corner[axis] = std::min(corner[axis], static_cast<int>(std::lround(p[axis] / skeleton.pitch)));
    }
    volume_at[corner] = v;
  }

  IntChain current(2);
  const std::size_t n = loop.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto iu = volume_at.find(loop[k]);
    auto iv = volume_at.find(loop[(k + 1) % n]);
    if (iu == volume_at.end() || iv == volume_at.end())
      throw TopologyError("loop_current_faces: loop voxel not in the complex");
    // shared face of the two volumes, with the sign it carries in the
    // boundary of the downstream volume (makes the cochain divergence-free)
    bool found = false;
    for (const auto& [f, ku] : skeleton.complex.faces(3, iu->second)) {
      for (const auto& [g, kv] : skeleton.complex.faces(3, iv->second)) {
        if (f == g) {
          current.add(f, kv);
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) throw TopologyError("loop_current_faces: consecutive loop voxels share no face");
  }
  return current;
}

VerifyReport verify_cutset(const CutSet& cs, const ChainComplex& cx, const RegionLabeling& regions,
                           int trials, unsigned seed) {
  VerifyReport report;
  auto fail = [&](const std::string& msg) {
    report.ok = false;
    report.failures.push_back(msg);
  };

  for (int i = 0; i < cs.n; ++i) {
    const IntChain& c = cs.cuts[static_cast<std::size_t>(i)];
    for (const auto& [e, v] : c.coeffs)
      if (!regions.insulator.contains(1, e)) {
        fail("cut " + std::to_string(i) + " supported outside the insulating region");
        break;
      }
    IntChain dc = cx.coboundary(c);
    for (const auto& [f, v] : dc.coeffs) {
      if (regions.insulator.contains(2, f)) {
        fail("cut " + std::to_string(i) + " is not a cocycle on the insulating region");
        break;
      }
    }
  }

  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j) {
      Int v = inner_product(cs.cuts[static_cast<std::size_t>(i)], cs.loops[static_cast<std::size_t>(j)]);
      if (v != Int(i == j ? 1 : 0))
        fail("pairing (" + std::to_string(i) + "," + std::to_string(j) + ") = " + v.str() +
             " is not the identity");
    }

  // class invariance: perturbing a loop by a boundary of a 2-chain in the
  // insulating region must not change any evaluation
  std::mt19937 rng(seed);
  std::vector<CellId> air_faces;
  for (CellId f = 0; f < cx.cell_count(2); ++f)
    if (regions.insulator.contains(2, f)) air_faces.push_back(f);
  std::uniform_int_distribution<std::size_t> pick(0, air_faces.empty() ? 0 : air_faces.size() - 1);
  std::uniform_int_distribution<int> coeff(-2, 2);
  for (int j = 0; j < cs.n; ++j) {
    for (int t = 0; t < trials; ++t) {
      IntChain w(2);
      for (int k = 0; k < 20 && !air_faces.empty(); ++k) w.add(air_faces[pick(rng)], coeff(rng));
      IntChain perturbed = cs.loops[static_cast<std::size_t>(j)] + cx.boundary(w);
      for (int i = 0; i < cs.n; ++i) {
        Int v = inner_product(cs.cuts[static_cast<std::size_t>(i)], perturbed);
        if (v != Int(i == j ? 1 : 0))
          fail("evaluation of cut " + std::to_string(i) + " changed on a homologous loop " + std::to_string(j));
      }
    }
  }
  return report;
}

Z2Report z2_counterexample_check() {
  Z2Report report;

  auto evaluate = [](const std::string& scene, int res, Int& eval_z, int& eval_mod2, Rational* linked) {
    Skeleton sk = build_skeleton(generate_scene(scene, res));
    CutSet cs = compute_cuts(sk.complex, sk.regions);
    IntChain probe = lattice_loop_chain(sk, scene_probes(scene, res)[0]);
    eval_z = inner_product(cs.cuts[0], probe);

    ComplexSlice air = restrict_complex(sk.complex, sk.regions.insulator);
    HomologyResult h2 = cohomology_mod2(air.complex, 1);
    Int acc = 0;
    for (const auto& [e, v] : air.push(probe).coeffs) acc += h2.generators[0].at(e) * v;
    eval_mod2 = static_cast<int>(((acc % 2) + 2) % 2);

    if (linked) {
      SpanningChainSolver solver(sk.complex);
      IntChain unit = loop_current_faces(sk, scene_conductor_loops(scene, res)[0]);
      *linked = linked_current(solver, probe, unit);
    }
  };

  evaluate("two-turn-coil", 4, report.coil_eval_z, report.coil_eval_mod2, &report.coil_linked);
  evaluate("solid-torus", 3, report.torus_eval_z, report.torus_eval_mod2, nullptr);

  using boost::multiprecision::abs;
  report.demonstrates = abs(report.coil_eval_z) == 2 && abs(report.coil_linked) == 2 && report.coil_eval_mod2 == 0;
  report.control_agrees = abs(report.torus_eval_z) == 1 && report.torus_eval_mod2 == 1;
  return report;
}

std::string serialize_cutset(const CutSet& cs) {
  nlohmann::ordered_json doc;
  doc["betti1"] = cs.n;
  auto chain_entry = [](int index, const IntChain& c, const char* key) {
    nlohmann::ordered_json e;
    e["index"] = index;
    auto& arr = e[key] = nlohmann::ordered_json::array();
    for (const auto& [id, v] : c.coeffs) arr.push_back({id, static_cast<long long>(v)});
    return e;
  };
  doc["cuts"] = nlohmann::ordered_json::array();
  doc["loops"] = nlohmann::ordered_json::array();
  doc["pairing"] = nlohmann::ordered_json::array();
  doc["dual_supports"] = nlohmann::ordered_json::array();
  for (int i = 0; i < cs.n; ++i) {
    doc["cuts"].push_back(chain_entry(i, cs.cuts[static_cast<std::size_t>(i)], "edges"));
    doc["loops"].push_back(chain_entry(i, cs.loops[static_cast<std::size_t>(i)], "edges"));
    std::vector<long long> row;
    for (const Int& v : cs.pairing[static_cast<std::size_t>(i)]) row.push_back(static_cast<long long>(v));
    doc["pairing"].push_back(row);
    // dual support: the same coefficients read as dual 2-cells
    nlohmann::ordered_json ds;
    auto& faces = ds["faces"] = nlohmann::ordered_json::array();
    for (const auto& [id, v] : cs.cuts[static_cast<std::size_t>(i)].coeffs)
      faces.push_back({id, static_cast<long long>(v)});
    doc["dual_supports"].push_back(ds);
  }
  return doc.dump(2) + "\n";
}

CutSet parse_cutset(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cut JSON: ") + e.what());
  }
  try {
    CutSet cs;
    cs.n = doc.at("betti1").get<int>();
    auto read_chains = [&](const char* key, int dim) {
      std::vector<IntChain> out;
      for (const auto& e : doc.at(key)) {
        IntChain c(dim);
        for (const auto& pair : e.at("edges")) c.set(pair.at(0).get<CellId>(), Int(pair.at(1).get<long long>()));
        out.push_back(std::move(c));
      }
      return out;
    };
    cs.cuts = read_chains("cuts", 1);
    cs.loops = read_chains("loops", 1);
    for (const auto& row : doc.at("pairing")) {
      std::vector<Int> r;
      for (const auto& v : row) r.push_back(Int(v.get<long long>()));
      cs.pairing.push_back(std::move(r));
    }
    if (static_cast<int>(cs.cuts.size()) != cs.n || static_cast<int>(cs.loops.size()) != cs.n ||
        static_cast<int>(cs.pairing.size()) != cs.n)
      throw ParseError("cut JSON: count mismatch");
    return cs;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cut JSON: ") + e.what());
  }
}

}  // namespace topocut
