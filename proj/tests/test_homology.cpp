#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "topocut/homology.hpp"

using namespace topocut;

namespace {

// Hollow triangle: a circle.
ChainComplex make_circle() {
  ChainComplex cx;
  for (int v = 0; v < 3; ++v) cx.add_cell(0, {});
  cx.add_cell(1, {{0, -1}, {1, 1}});  // (0,1)
  cx.add_cell(1, {{1, -1}, {2, 1}});  // (1,2)
  cx.add_cell(1, {{0, -1}, {2, 1}});  // (0,2)
  cx.validate();
  return cx;
}

// Solid triangle: a disk.
ChainComplex make_disk() {
  ChainComplex cx = make_circle();
  // boundary = (1,2) - (0,2) + (0,1)
  cx.add_cell(2, {{1, 1}, {2, -1}, {0, 1}});
  cx.validate();
  return cx;
}

// Boundary surface of a tetrahedron: a 2-sphere.
ChainComplex make_sphere() {
  ChainComplex cx;
  int edge[4][4];
  for (int v = 0; v < 4; ++v) cx.add_cell(0, {});
  int next = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      edge[a][b] = next++;
      cx.add_cell(1, {{a, -1}, {b, 1}});
    }
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c)
        cx.add_cell(2, {{edge[b][c], 1}, {edge[a][c], -1}, {edge[a][b], 1}});
  cx.validate();
  return cx;
}

// 3x3 periodic quad grid: a torus. 9 vertices, 18 edges, 9 squares.
ChainComplex make_torus() {
  const int n = 3;
  ChainComplex cx;
  auto vid = [&](int i, int j) { return ((i + n) % n) * n + (j + n) % n; };
  for (int v = 0; v < n * n; ++v) cx.add_cell(0, {});
  auto ex = [&](int i, int j) { return ((i + n) % n) * n + (j + n) % n; };          // (i,j) -> (i+1,j)
  auto ey = [&](int i, int j) { return n * n + ((i + n) % n) * n + (j + n) % n; };  // (i,j) -> (i,j+1)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cx.add_cell(1, {{vid(i, j), -1}, {vid(i + 1, j), 1}});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cx.add_cell(1, {{vid(i, j), -1}, {vid(i, j + 1), 1}});
  // counter-clockwise square at (i,j): ex(i,j) + ey(i+1,j) - ex(i,j+1) - ey(i,j)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cx.add_cell(2, {{ex(i, j), 1}, {ey(i + 1, j), 1}, {ex(i, j + 1), -1}, {ey(i, j), -1}});
  cx.validate();
  return cx;
}

// Abstract chain complex with H_1 = Z/2: one vertex, two loops a, b,
// two faces with boundaries a+b and a-b.
ChainComplex make_torsion() {
  ChainComplex cx;
  cx.add_cell(0, {});
  cx.add_cell(1, {});  // loop a
  cx.add_cell(1, {});  // loop b
  cx.add_cell(2, {{0, 1}, {1, 1}});
  cx.add_cell(2, {{0, 1}, {1, -1}});
  cx.validate();
  return cx;
}

ChainComplex make_two_circles() {
  ChainComplex cx;
  for (int v = 0; v < 6; ++v) cx.add_cell(0, {});
  for (int base : {0, 3}) {
    cx.add_cell(1, {{base, -1}, {base + 1, 1}});
    cx.add_cell(1, {{base + 1, -1}, {base + 2, 1}});
    cx.add_cell(1, {{base, -1}, {base + 2, 1}});
  }
  cx.validate();
  return cx;
}

BettiTable table(std::array<int, 4> betti) {
  BettiTable t{};
  t.betti = betti;
  return t;
}

}  // namespace

TEST_CASE("betti oracle on standard spaces") {
  CHECK(betti_oracle(make_circle()) == table({1, 1, 0, 0}));
  CHECK(betti_oracle(make_disk()) == table({1, 0, 0, 0}));
  CHECK(betti_oracle(make_sphere()) == table({1, 0, 1, 0}));
  CHECK(betti_oracle(make_torus()) == table({1, 2, 1, 0}));
  CHECK(betti_oracle(make_two_circles()) == table({2, 2, 0, 0}));
}

TEST_CASE("betti oracle detects torsion") {
  BettiTable t = betti_oracle(make_torsion());
  CHECK(t.betti == std::array<int, 4>{1, 0, 0, 0});
  CHECK(t.torsion[1] == std::vector<Int>{2});
}

TEST_CASE("reduced path agrees with the oracle") {
  for (const ChainComplex& cx :
       {make_circle(), make_disk(), make_sphere(), make_torus(), make_two_circles(), make_torsion()}) {
    CHECK(betti_reduced(cx) == betti_oracle(cx));
  }
}

TEST_CASE("component count") {
  CHECK(component_count(make_circle()) == 1);
  CHECK(component_count(make_two_circles()) == 2);
  CHECK(component_count(ChainComplex{}) == 0);
}

TEST_CASE("shaved subcomplex is acyclic and face-closed") {
  for (const ChainComplex& cx : {make_circle(), make_disk(), make_sphere(), make_torus(), make_two_circles()}) {
    ShaveResult sh = shave_acyclic(cx);
    CHECK(sh.shaved.face_closed());
    CHECK_FALSE(sh.shaved.empty());
    BettiTable t = betti_oracle(restrict_complex(cx, sh.shaved).complex);
    CHECK(t.betti[0] == component_count(cx));
    for (int d = 1; d <= 3; ++d) {
      CHECK(t.betti[d] == 0);
      CHECK(t.torsion[d].empty());
    }
  }
}

TEST_CASE("shaving preserves homology above degree zero") {
  for (const ChainComplex& cx : {make_circle(), make_sphere(), make_torus(), make_two_circles()}) {
    ShaveResult sh = shave_acyclic(cx);
    BettiTable full = betti_oracle(cx);
    BettiTable quot = betti_oracle(sh.quotient.complex);
    for (int d = 1; d <= 3; ++d) {
      CHECK(quot.betti[d] == full.betti[d]);
      CHECK(quot.torsion[d] == full.torsion[d]);
    }
  }
}

TEST_CASE("shaving a disk leaves an empty quotient") {
  ShaveResult sh = shave_acyclic(make_disk());
  CHECK(sh.quotient.complex.total_cells() == 0);
}

TEST_CASE("preserved cells are never shaved") {
  ChainComplex cx = make_disk();
  SubcomplexView keep(cx);
  keep.insert_closure(1, 0);  // edge (0,1) and its vertices
  ShaveResult sh = shave_acyclic(cx, &keep);
  CHECK_FALSE(sh.shaved.contains(1, 0));
  CHECK_FALSE(sh.shaved.contains(0, 0));
  CHECK_FALSE(sh.shaved.contains(0, 1));
  // the face whose closure contains the kept edge is blocked too
  CHECK_FALSE(sh.shaved.contains(2, 0));
}

TEST_CASE("coreduction collapses a seeded disk") {
  CoreduceResult co = coreduce(make_disk(), true);
  CHECK(co.seeds_removed == 1);
  CHECK(co.reduced.total_cells() == 0);
  CHECK(co.pairs.size() == 3);
}

TEST_CASE("coreduction preserves homology above degree zero") {
  for (const ChainComplex& cx : {make_circle(), make_sphere(), make_torus(), make_torsion()}) {
    CoreduceResult co = coreduce(cx, true);
    BettiTable full = betti_oracle(cx);
    BettiTable red = betti_oracle(co.reduced);
    for (int d = 1; d <= 3; ++d) {
      CHECK(red.betti[d] == full.betti[d]);
      CHECK(red.torsion[d] == full.torsion[d]);
    }
  }
}

TEST_CASE("coreduction pair trace is consistent") {
  ChainComplex cx = make_sphere();
  CoreduceResult co = coreduce(cx, true);
  for (const CoreductionPair& p : co.pairs) {
    bool sign_ok = false;
    for (const auto& [f, s] : cx.faces(p.face_dim + 1, p.coface))
      if (f == p.face && (s == 1 || s == -1)) sign_ok = true;
    CHECK(sign_ok);
  }
}

TEST_CASE("homology generators of the circle") {
  ChainComplex cx = make_circle();
  HomologyResult h = homology(cx, 1);
  CHECK(h.betti == 1);
  CHECK(h.torsion.empty());
  REQUIRE(h.generators.size() == 1);
  const IntChain& g = h.generators[0];
  CHECK(cx.boundary(g).zero());
  // the only primitive cycle, up to sign: e01 + e12 - e02
  Int s = g.at(0);
  CHECK((s == 1 || s == -1));
  CHECK(g.at(1) == s);
  CHECK(g.at(2) == -s);
}

TEST_CASE("homology generators of the torus") {
  ChainComplex cx = make_torus();
  HomologyResult h1 = homology(cx, 1);
  CHECK(h1.betti == 2);
  REQUIRE(h1.generators.size() == 2);
  for (const IntChain& g : h1.generators) CHECK(cx.boundary(g).zero());

  HomologyResult h2 = homology(cx, 2);
  CHECK(h2.betti == 1);
  REQUIRE(h2.generators.size() == 1);
  // fundamental class: all 9 squares with the same sign
  Int s = h2.generators[0].at(0);
  CHECK((s == 1 || s == -1));
  for (int f = 0; f < 9; ++f) CHECK(h2.generators[0].at(f) == s);
}

TEST_CASE("homology detects torsion") {
  HomologyResult h = homology(make_torsion(), 1);
  CHECK(h.betti == 0);
  CHECK(h.torsion == std::vector<Int>{2});
  CHECK(h.generators.empty());
}

TEST_CASE("betti without generators matches the generator path") {
  for (const ChainComplex& cx : {make_circle(), make_sphere(), make_torus(), make_torsion()}) {
    for (int d = 0; d <= 2; ++d) {
      HomologyResult a = homology(cx, d, false);
      HomologyResult b = homology(cx, d, true);
      CHECK(a.betti == b.betti);
      CHECK(a.torsion == b.torsion);
    }
  }
}

TEST_CASE("relative homology of the disk modulo its boundary") {
  ChainComplex cx = make_disk();
  SubcomplexView rim(cx);
  for (CellId e = 0; e < 3; ++e) rim.insert_closure(1, e);

  HomologyResult h2 = relative_homology(cx, rim, 2);
  CHECK(h2.betti == 1);
  REQUIRE(h2.generators.size() == 1);
  Int s = h2.generators[0].at(0);
  CHECK((s == 1 || s == -1));

  CHECK(relative_homology(cx, rim, 1).betti == 0);
  CHECK(relative_homology(cx, rim, 0).betti == 0);
}

TEST_CASE("cohomology of standard spaces") {
  CHECK(cohomology(make_circle(), 0).betti == 1);
  CHECK(cohomology(make_two_circles(), 0).betti == 2);
  CHECK(cohomology(make_circle(), 1).betti == 1);
  CHECK(cohomology(make_sphere(), 1).betti == 0);
  CHECK(cohomology(make_sphere(), 2).betti == 1);
  CHECK(cohomology(make_torus(), 1).betti == 2);
  CHECK(cohomology(make_torus(), 2).betti == 1);
}

TEST_CASE("cohomology generators are cocycles and pair with homology") {
  ChainComplex cx = make_torus();
  HomologyResult hom = homology(cx, 1);
  HomologyResult coh = cohomology(cx, 1);
  REQUIRE(hom.generators.size() == 2);
  REQUIRE(coh.generators.size() == 2);
  for (const IntChain& c : coh.generators) CHECK(cx.coboundary(c).zero());
  // the evaluation matrix <c_i, z_j> must be unimodular
  Int a = inner_product(coh.generators[0], hom.generators[0]);
  Int b = inner_product(coh.generators[0], hom.generators[1]);
  Int c = inner_product(coh.generators[1], hom.generators[0]);
  Int d = inner_product(coh.generators[1], hom.generators[1]);
  Int det = a * d - b * c;
  CHECK((det == 1 || det == -1));
}

TEST_CASE("cohomology rejects torsion below the requested degree") {
  CHECK_THROWS_AS((void)cohomology(make_torsion(), 2), TopologyError);
}

TEST_CASE("mod-2 cohomology sees the torsion class") {
  ChainComplex cx = make_torsion();
  HomologyResult h = cohomology_mod2(cx, 1);
  CHECK(h.betti == 1);
  REQUIRE(h.generators.size() == 1);
  // every 1-chain is a mod-2 cycle here; a + b bounds, the loop a does not
  IntChain a(1), ab(1);
  a.set(0, 1);
  ab.set(0, 1);
  ab.set(1, 1);
  CHECK(inner_product(h.generators[0], a) % 2 != 0);
  CHECK(inner_product(h.generators[0], ab) % 2 == 0);
}

TEST_CASE("mod-2 cohomology of torsion-free spaces matches the integral ranks") {
  CHECK(cohomology_mod2(make_circle(), 1).betti == 1);
  CHECK(cohomology_mod2(make_torus(), 1).betti == 2);
  CHECK(cohomology_mod2(make_sphere(), 2).betti == 1);
  CHECK(cohomology_mod2(make_sphere(), 1).betti == 0);
}
