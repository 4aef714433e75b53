#include "topocut/homology.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <utility>

namespace topocut {

namespace {

constexpr int kTop = ChainComplex::kMaxDim;

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

UnionFind vertex_components(const ChainComplex& cx) {
  UnionFind uf(cx.cell_count(0));
  for (CellId e = 0; e < cx.cell_count(1); ++e) {
    const auto& f = cx.faces(1, e);
    for (std::size_t i = 1; i < f.size(); ++i) uf.unite(f[0].first, f[i].first);
  }
  return uf;
}

std::vector<std::pair<int, CellId>> closure_cells(const ChainComplex& cx, int d, CellId id) {
  std::vector<std::pair<int, CellId>> out{{d, id}};
  std::set<std::pair<int, CellId>> seen{{d, id}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto [dd, cid] = out[i];
    if (dd == 0) continue;
    for (const auto& [f, s] : cx.faces(dd, cid))
      if (seen.insert({dd - 1, f}).second) out.push_back({dd - 1, f});
  }
  return out;
}

/// Standalone complex over an explicit (face-closed) cell set; incidence to
/// cells outside the set is dropped.
ChainComplex local_complex(const ChainComplex& cx, const std::vector<std::pair<int, CellId>>& cells) {
  std::array<std::map<CellId, CellId>, kTop + 1> local;
  for (const auto& [d, id] : cells) local[d].emplace(id, 0);
  for (int d = 0; d <= kTop; ++d) {
    CellId next = 0;
    for (auto& [old_id, new_id] : local[d]) new_id = next++;
  }
  ChainComplex out;
  for (int d = 0; d <= kTop; ++d)
    for (const auto& [old_id, new_id] : local[d]) {
      std::vector<ChainComplex::Entry> fs;
      if (d > 0)
        for (const auto& [f, s] : cx.faces(d, old_id)) {
          auto it = local[d - 1].find(f);
          if (it != local[d - 1].end()) fs.push_back({it->second, s});
        }
      out.add_cell(d, std::move(fs));
    }
  return out;
}

/// Reduced acyclicity over the integers: one component, no higher homology,
/// no torsion. Used only on small local pieces.
bool acyclic_local(const ChainComplex& s) {
  std::array<int, kTop + 2> rank{};
  for (int d = 1; d <= kTop; ++d) {
    if (s.cell_count(d) == 0) continue;
    SNFResult r = smith_normal_form(SparseIntMat::boundary_matrix(s, d));
    rank[d] = r.rank;
    for (const Int& dv : r.divisors)
      if (dv != 1) return false;
  }
  if (s.cell_count(0) - rank[1] != 1) return false;
  for (int d = 1; d <= kTop; ++d)
    if (s.cell_count(d) - rank[d] - rank[d + 1] != 0) return false;
  return true;
}

/// Homology of ker(A) / im(B) where A consumes degree-d vectors and B produces
/// them (A*B = 0). Generator coordinates refer to the columns of A.
HomologyResult kernel_mod_image(const SparseIntMat& A, const SparseIntMat& B, int d, bool want_gens) {
  if (A.cols() != B.rows()) throw TopologyError("kernel_mod_image: shape mismatch");
  const int n = A.cols();
  HomologyResult res;
  res.dim = d;

  SNFOptions oa;
  oa.want_V = oa.want_Vinv = want_gens;
  SNFResult sa = smith_normal_form(A, oa);
  const int ra = sa.rank;
  const int m = n - ra;  // kernel dimension

  if (!want_gens) {
    // Columns of B lie in ker A, so the quotient rank and torsion come
    // straight from the SNF of B.
    SNFResult sb = smith_normal_form(B);
    res.betti = m - sb.rank;
    for (const Int& dv : sb.divisors)
      if (dv > 1) res.torsion.push_back(dv);
    return res;
  }

  // Kernel coordinates: columns ra..n-1 of V. Express im B in them.
  SparseIntMat P = sa.Vinv.multiplied(B);
  SparseIntMat C(m, B.cols());
  for (int i = ra; i < n; ++i)
    for (const auto& [j, v] : P.row(i)) C.set(i - ra, j, v);

  SNFOptions oc;
  oc.want_Uinv = true;
  SNFResult sc = smith_normal_form(C, oc);
  res.betti = m - sc.rank;
  for (const Int& dv : sc.divisors)
    if (dv > 1) res.torsion.push_back(dv);

  for (int t = sc.rank; t < m; ++t) {
    IntChain g(d);
    for (const auto& [s, u] : sc.Uinv.col(t)) {
      for (const auto& [i, v] : sa.V.col(ra + s)) g.add(i, v * u);
    }
    IntChain img = A.apply(g, 0);
    if (!img.zero()) throw TopologyError("kernel_mod_image: generator is not a cycle");
    res.generators.push_back(std::move(g));
  }
  return res;
}

SparseIntMat boundary_or_zero(const ChainComplex& cx, int d) {
  if (d >= 1 && d <= kTop) return SparseIntMat::boundary_matrix(cx, d);
  if (d == 0) return SparseIntMat(0, cx.cell_count(0));
  return SparseIntMat(cx.cell_count(kTop), 0);  // d == kTop + 1
}

// -- mod-2 linear algebra (dense, used on shaved quotients only) -----------

using BitVec = std::vector<std::uint8_t>;

struct Gf2Mat {
  int rows = 0, cols = 0;
  std::vector<BitVec> a;  // row-major

  Gf2Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r), BitVec(static_cast<std::size_t>(c), 0)) {}
};

/// Transposed boundary matrix of d-cells, reduced mod 2.
Gf2Mat coboundary_mod2(const ChainComplex& cx, int d) {
  if (d < 1 || d > kTop) throw TopologyError("coboundary_mod2: dimension out of range");
  Gf2Mat m(cx.cell_count(d), cx.cell_count(d - 1));
  for (CellId id = 0; id < cx.cell_count(d); ++id)
    for (const auto& [f, s] : cx.faces(d, id))
      m.a[static_cast<std::size_t>(id)][static_cast<std::size_t>(f)] ^= 1;
  return m;
}

std::vector<BitVec> gf2_kernel(Gf2Mat m) {
  std::vector<int> pivot_col;
  int r = 0;
  for (int j = 0; j < m.cols && r < m.rows; ++j) {
    int pi = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
        pi = i;
        break;
      }
    if (pi < 0) continue;
    std::swap(m.a[static_cast<std::size_t>(pi)], m.a[static_cast<std::size_t>(r)]);
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || !m.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) continue;
      for (int k = j; k < m.cols; ++k)
        m.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] ^=
            m.a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
    }
    pivot_col.push_back(j);
    ++r;
  }
  std::vector<char> is_pivot(static_cast<std::size_t>(m.cols), 0);
  for (int j : pivot_col) is_pivot[static_cast<std::size_t>(j)] = 1;
  std::vector<BitVec> kernel;
  for (int j = 0; j < m.cols; ++j) {
    if (is_pivot[static_cast<std::size_t>(j)]) continue;
    BitVec v(static_cast<std::size_t>(m.cols), 0);
    v[static_cast<std::size_t>(j)] = 1;
    for (int i = 0; i < r; ++i)
      if (m.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
        v[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(i)])] = 1;
    kernel.push_back(std::move(v));
  }
  return kernel;
}

/// Incremental GF(2) span; insert() reports whether the rank grew.
struct Gf2Span {
  std::vector<std::pair<int, BitVec>> echelon;  // (pivot index, vector)

  bool insert(BitVec v) {
    for (const auto& [p, b] : echelon)
      if (v[static_cast<std::size_t>(p)])
        for (std::size_t k = 0; k < v.size(); ++k) v[k] ^= b[k];
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k]) {
        echelon.push_back({static_cast<int>(k), std::move(v)});
        return true;
      }
    return false;
  }
};

}  // namespace

// -- shaving ---------------------------------------------------------------

ShaveResult shave_acyclic(const ChainComplex& cx, const SubcomplexView* preserve) {
  SubcomplexView S(cx);
  if (cx.total_cells() == 0) return {S, relative_complex(cx, S)};

  UnionFind uf = vertex_components(cx);
  auto comp_of = [&](int d, CellId id) -> int {
    int dd = d;
    CellId cur = id;
    while (dd > 0) {
      const auto& f = cx.faces(dd, cur);
      if (f.empty()) return -1;
      cur = f[0].first;
      --dd;
    }
    return uf.find(cur);
  };
  auto blocked = [&](const std::vector<std::pair<int, CellId>>& cl) {
    if (!preserve) return false;
    for (const auto& [dd, cid] : cl)
      if (preserve->contains(dd, cid)) return true;
    return false;
  };

  // Candidates keyed (kTop - dim, id): top cells first, ascending id within a dim.
  std::set<std::pair<int, CellId>> agenda;
  auto push_cofaces = [&](int d, CellId id) {
    if (d + 1 > kTop) return;
    for (const auto& [cf, s] : cx.cofaces(d, id))
      if (!S.contains(d + 1, cf)) agenda.insert({kTop - (d + 1), cf});
  };
  auto add_closure = [&](const std::vector<std::pair<int, CellId>>& cl) {
    for (const auto& [dd, cid] : cl)
      if (!S.contains(dd, cid)) {
        S.insert(dd, cid);
        push_cofaces(dd, cid);
      }
  };

  // The grown set stays acyclic: the closure of one cell is acyclic, and it
  // is glued along an acyclic (in particular connected) overlap.
  auto try_grow = [&](int d, CellId id) -> bool {
    if (S.contains(d, id)) return false;
    auto cl = closure_cells(cx, d, id);
    if (blocked(cl)) return false;
    std::vector<std::pair<int, CellId>> overlap;
    for (const auto& c : cl)
      if (S.contains(c.first, c.second)) overlap.push_back(c);
    if (overlap.empty()) return false;
    if (!acyclic_local(local_complex(cx, overlap))) return false;
    add_closure(cl);
    return true;
  };

  // One seed per connected component.
  std::set<int> seeded;
  for (int d = kTop; d >= 0; --d)
    for (CellId id = 0; id < cx.cell_count(d); ++id) {
      int c = comp_of(d, id);
      if (c < 0 || seeded.count(c)) continue;
      auto cl = closure_cells(cx, d, id);
      if (blocked(cl)) continue;
      seeded.insert(c);
      add_closure(cl);
    }

  auto drain = [&]() -> bool {
    bool any = false;
    while (!agenda.empty()) {
      auto [key, id] = *agenda.begin();
      agenda.erase(agenda.begin());
      if (try_grow(kTop - key, id)) any = true;
    }
    return any;
  };
  drain();

  // Catch-all passes: a rejected candidate can become admissible after growth
  // elsewhere without being re-queued through a coface.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int d = kTop; d >= 0; --d)
      for (CellId id = 0; id < cx.cell_count(d); ++id)
        if (try_grow(d, id)) changed = true;
    if (drain()) changed = true;
  }

  ShaveResult out;
  out.quotient = relative_complex(cx, S);
  out.shaved = std::move(S);
  return out;
}

// -- coreduction -----------------------------------------------------------

CoreduceResult coreduce(const ChainComplex& cx, bool seed_components) {
  std::array<std::vector<char>, kTop + 1> alive;
  std::array<std::vector<int>, kTop + 1> nfaces;
  for (int d = 0; d <= kTop; ++d) {
    alive[d].assign(static_cast<std::size_t>(cx.cell_count(d)), 1);
    nfaces[d].resize(static_cast<std::size_t>(cx.cell_count(d)));
    for (CellId id = 0; id < cx.cell_count(d); ++id)
      nfaces[d][static_cast<std::size_t>(id)] = static_cast<int>(cx.faces(d, id).size());
  }

  std::set<std::pair<int, CellId>> agenda;  // cofaces with one remaining face
  auto remove_cell = [&](int d, CellId id) {
    alive[d][static_cast<std::size_t>(id)] = 0;
    if (d + 1 > kTop) return;
    for (const auto& [cf, s] : cx.cofaces(d, id)) {
      if (!alive[d + 1][static_cast<std::size_t>(cf)]) continue;
      if (--nfaces[d + 1][static_cast<std::size_t>(cf)] == 1) agenda.insert({d + 1, cf});
    }
  };

  CoreduceResult res;
  if (seed_components) {
    UnionFind uf = vertex_components(cx);
    std::set<int> seen;
    for (CellId v = 0; v < cx.cell_count(0); ++v)
      if (seen.insert(uf.find(v)).second) {
        remove_cell(0, v);
        ++res.seeds_removed;
      }
  }
  for (int d = 1; d <= kTop; ++d)
    for (CellId id = 0; id < cx.cell_count(d); ++id)
      if (alive[d][static_cast<std::size_t>(id)] && nfaces[d][static_cast<std::size_t>(id)] == 1)
        agenda.insert({d, id});

  while (!agenda.empty()) {
    auto [d, id] = *agenda.begin();
    agenda.erase(agenda.begin());
    if (!alive[d][static_cast<std::size_t>(id)] || nfaces[d][static_cast<std::size_t>(id)] != 1) continue;
    CellId face = -1;
    for (const auto& [f, s] : cx.faces(d, id))
      if (alive[d - 1][static_cast<std::size_t>(f)]) {
        face = f;
        break;
      }
    res.pairs.push_back({d - 1, face, id});
    remove_cell(d - 1, face);
    remove_cell(d, id);
  }

  std::array<std::vector<CellId>, kTop + 1> old_to_new;
  for (int d = 0; d <= kTop; ++d) {
    old_to_new[d].assign(static_cast<std::size_t>(cx.cell_count(d)), -1);
    for (CellId id = 0; id < cx.cell_count(d); ++id)
      if (alive[d][static_cast<std::size_t>(id)]) {
        old_to_new[d][static_cast<std::size_t>(id)] = static_cast<CellId>(res.new_to_old[d].size());
        res.new_to_old[d].push_back(id);
      }
  }
  for (int d = 0; d <= kTop; ++d)
    for (CellId old_id : res.new_to_old[d]) {
      std::vector<ChainComplex::Entry> fs;
      if (d > 0)
        for (const auto& [f, s] : cx.faces(d, old_id)) {
          CellId nf = old_to_new[d - 1][static_cast<std::size_t>(f)];
          if (nf >= 0) fs.push_back({nf, s});
        }
      res.reduced.add_cell(d, std::move(fs));
    }
  return res;
}

// -- betti tables ----------------------------------------------------------

int component_count(const ChainComplex& cx) {
  if (cx.cell_count(0) == 0) return 0;
  UnionFind uf = vertex_components(cx);
  std::set<int> roots;
  for (CellId v = 0; v < cx.cell_count(0); ++v) roots.insert(uf.find(v));
  return static_cast<int>(roots.size());
}

BettiTable betti_oracle(const ChainComplex& cx) {
  BettiTable t{};
  std::array<int, kTop + 2> rank{};
  std::array<std::vector<Int>, kTop + 2> divisors;
  for (int d = 1; d <= kTop; ++d) {
    SNFResult r = smith_normal_form(SparseIntMat::boundary_matrix(cx, d));
    rank[d] = r.rank;
    divisors[d] = std::move(r.divisors);
  }
  for (int d = 0; d <= kTop; ++d) {
    t.betti[d] = cx.cell_count(d) - rank[d] - rank[d + 1];
    for (const Int& dv : divisors[d + 1])
      if (dv > 1) t.torsion[d].push_back(dv);
  }
  return t;
}

BettiTable betti_reduced(const ChainComplex& cx) {
  BettiTable t{};
  if (cx.total_cells() == 0) return t;
  t.betti[0] = component_count(cx);

  // The quotient by the shaved subcomplex and its coreduction both carry the
  // homology of the input in every degree >= 1.
  ShaveResult sh = shave_acyclic(cx);
  CoreduceResult co = coreduce(sh.quotient.complex, false);
  const ChainComplex& r = co.reduced;

  std::array<int, kTop + 2> rank{};
  std::array<std::vector<Int>, kTop + 2> divisors;
  for (int d = 1; d <= kTop; ++d) {
    SNFResult s = smith_normal_form(SparseIntMat::boundary_matrix(r, d));
    rank[d] = s.rank;
    divisors[d] = std::move(s.divisors);
  }
  for (int d = 1; d <= kTop; ++d) {
    t.betti[d] = r.cell_count(d) - rank[d] - rank[d + 1];
    for (const Int& dv : divisors[d + 1])
      if (dv > 1) t.torsion[d].push_back(dv);
  }
  return t;
}

// -- homology with generators ----------------------------------------------

HomologyResult homology(const ChainComplex& cx, int d, bool want_generators) {
  if (d < 0 || d > kTop) throw TopologyError("homology: dimension out of range");
  HomologyResult h = kernel_mod_image(boundary_or_zero(cx, d), boundary_or_zero(cx, d + 1), d, want_generators);
  return h;
}

HomologyResult cohomology(const ChainComplex& cx, int d) {
  if (d < 0 || d > kTop) throw TopologyError("cohomology: dimension out of range");
  if (d == 0) {
    // Constant cochain per connected component.
    HomologyResult h;
    h.dim = 0;
    if (cx.cell_count(0) == 0) return h;
    UnionFind uf = vertex_components(cx);
    std::map<int, int> root_index;
    for (CellId v = 0; v < cx.cell_count(0); ++v) root_index.emplace(uf.find(v), 0);
    int next = 0;
    for (auto& [root, idx] : root_index) idx = next++;
    h.betti = next;
    h.generators.assign(static_cast<std::size_t>(next), IntChain(0));
    for (CellId v = 0; v < cx.cell_count(0); ++v)
      h.generators[static_cast<std::size_t>(root_index[uf.find(v)])].set(v, 1);
    return h;
  }

  ShaveResult sh = shave_acyclic(cx);
  const ChainComplex& q = sh.quotient.complex;
  if (d >= 2) {
    // Torsion one degree down would break the integral cocycle basis.
    SNFResult s = smith_normal_form(SparseIntMat::boundary_matrix(q, d));
    for (const Int& dv : s.divisors)
      if (dv > 1) throw TopologyError("cohomology: torsion below the requested degree");
  }

  SparseIntMat A = (d + 1 <= kTop) ? SparseIntMat::boundary_matrix(q, d + 1).transposed()
                                   : SparseIntMat(0, q.cell_count(d));
  SparseIntMat B = SparseIntMat::boundary_matrix(q, d).transposed();
  HomologyResult h = kernel_mod_image(A, B, d, true);

  // Zero-extension over the shaved cells is exact: every face of a shaved
  // cell is shaved, so the cocycle condition survives the lift.
  for (IntChain& g : h.generators) {
    g = sh.quotient.lift(g);
    if (!cx.coboundary(g).zero()) throw TopologyError("cohomology: lifted representative is not a cocycle");
  }
  return h;
}

HomologyResult relative_homology(const ChainComplex& cx, const SubcomplexView& sub, int d) {
  ComplexSlice q = relative_complex(cx, sub);
  HomologyResult h = homology(q.complex, d, true);
  for (IntChain& g : h.generators) {
    g = q.lift(g);
    IntChain bd = cx.boundary(g);
    for (const auto& [id, v] : bd.coeffs)
      if (!sub.contains(d - 1, id))
        throw TopologyError("relative_homology: representative is not a relative cycle");
  }
  return h;
}

HomologyResult cohomology_mod2(const ChainComplex& cx, int d) {
  if (d < 1 || d > kTop) throw TopologyError("cohomology_mod2: dimension out of range");
  ShaveResult sh = shave_acyclic(cx);
  const ChainComplex& q = sh.quotient.complex;
  const int nd = q.cell_count(d);

  std::vector<BitVec> kernel;
  if (d + 1 <= kTop && q.cell_count(d + 1) > 0) {
    kernel = gf2_kernel(coboundary_mod2(q, d + 1));
  } else {
    kernel.reserve(static_cast<std::size_t>(nd));
    for (int j = 0; j < nd; ++j) {
      BitVec v(static_cast<std::size_t>(nd), 0);
      v[static_cast<std::size_t>(j)] = 1;
      kernel.push_back(std::move(v));
    }
  }

  Gf2Span span;
  if (q.cell_count(d - 1) > 0) {
    Gf2Mat b = coboundary_mod2(q, d);  // rows: d-cells, cols: (d-1)-cells
    for (int j = 0; j < b.cols; ++j) {
      BitVec v(static_cast<std::size_t>(nd), 0);
      for (int i = 0; i < b.rows; ++i) v[static_cast<std::size_t>(i)] = b.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      span.insert(std::move(v));
    }
  }

  HomologyResult h;
  h.dim = d;
  for (const BitVec& k : kernel) {
    BitVec copy = k;
    if (!span.insert(std::move(copy))) continue;
    IntChain g(d);
    for (int i = 0; i < nd; ++i)
      if (k[static_cast<std::size_t>(i)]) g.set(i, 1);
    g = sh.quotient.lift(g);
    IntChain cb = cx.coboundary(g);
    for (const auto& [id, v] : cb.coeffs)
      if (v % 2 != 0) throw TopologyError("cohomology_mod2: lifted representative is not a mod-2 cocycle");
    h.generators.push_back(std::move(g));
  }
  h.betti = static_cast<int>(h.generators.size());
  return h;
}

}  // namespace topocut
