#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "topocut/homology.hpp"
#include "topocut/scenes.hpp"

using namespace topocut;

namespace {

struct SceneCheck {
  Skeleton skeleton;
  ComplexSlice conductor;
  ComplexSlice insulator;
};

SceneCheck build(const std::string& name, int res) {
  SceneCheck out;
  out.skeleton = build_skeleton(generate_scene(name, res));
  out.conductor = restrict_complex(out.skeleton.complex, out.skeleton.regions.conductor);
  out.insulator = restrict_complex(out.skeleton.complex, out.skeleton.regions.insulator);
  return out;
}

/// Pairing of every first-cohomology generator of the insulating region with
/// every probe loop. Rows: generators, columns: probes.
std::vector<std::vector<Int>> probe_pairing(const SceneCheck& sc, const std::string& name, int res) {
  HomologyResult h1 = cohomology(sc.insulator.complex, 1);
  auto probes = scene_probes(name, res);
  std::vector<std::vector<Int>> p;
  for (const IntChain& g : h1.generators) {
    std::vector<Int> row;
    for (const LatticeLoop& loop : probes) {
      IntChain c = lattice_loop_chain(sc.skeleton, loop);
      // probes must be cycles supported in the insulating region
      REQUIRE(sc.skeleton.complex.boundary(c).zero());
      for (const auto& [id, v] : c.coeffs) REQUIRE(sc.skeleton.regions.insulator.contains(1, id));
      row.push_back(inner_product(g, sc.insulator.push(c)));
    }
    p.push_back(std::move(row));
  }
  return p;
}

}  // namespace

TEST_CASE("scene registry") {
  CHECK(scene_names().size() == 4);
  for (const auto& n : scene_names()) CHECK(scene_min_resolution(n) >= 3);
  CHECK_THROWS_AS((void)generate_scene("nope", 5), ParseError);
  CHECK_THROWS_AS((void)scene_min_resolution("nope"), ParseError);
  for (const auto& n : scene_names())
    CHECK_THROWS_AS((void)generate_scene(n, scene_min_resolution(n) - 1), ParseError);
}

TEST_CASE("scene generation is deterministic") {
  for (const auto& n : scene_names()) {
    int res = scene_min_resolution(n);
    CHECK(serialize_mesh(generate_scene(n, res)) == serialize_mesh(generate_scene(n, res)));
  }
}

TEST_CASE("solid torus scene") {
  for (int res : {3, 5}) {
    CAPTURE(res);
    SceneCheck sc = build("solid-torus", res);
    BettiTable tc = betti_reduced(sc.conductor.complex);
    CHECK(tc.betti == std::array<int, 4>{1, 1, 0, 0});
    BettiTable ta = betti_reduced(sc.insulator.complex);
    CHECK(ta.betti == std::array<int, 4>{1, 1, 1, 0});
    for (int d = 0; d <= 3; ++d) CHECK(ta.torsion[d].empty());

    auto p = probe_pairing(sc, "solid-torus", res);
    REQUIRE(p.size() == 1);
    REQUIRE(p[0].size() == 1);
    CHECK((p[0][0] == 1 || p[0][0] == -1));
  }
}

TEST_CASE("double torus scene") {
  for (int res : {3, 4}) {
    CAPTURE(res);
    SceneCheck sc = build("double-torus", res);
    CHECK(betti_reduced(sc.conductor.complex).betti == std::array<int, 4>{1, 2, 0, 0});
    CHECK(betti_reduced(sc.insulator.complex).betti == std::array<int, 4>{1, 2, 1, 0});

    auto p = probe_pairing(sc, "double-torus", res);
    REQUIRE(p.size() == 2);
    Int det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    CHECK(det != 0);  // the two probes witness two independent loops
  }
}

TEST_CASE("two turn coil scene") {
  SceneCheck sc = build("two-turn-coil", 4);
  CHECK(betti_reduced(sc.conductor.complex).betti == std::array<int, 4>{1, 1, 0, 0});
  CHECK(betti_reduced(sc.insulator.complex).betti == std::array<int, 4>{1, 1, 1, 0});

  // the axial probe links both turns
  auto p = probe_pairing(sc, "two-turn-coil", 4);
  REQUIRE(p.size() == 1);
  CHECK((p[0][0] == 2 || p[0][0] == -2));
}

TEST_CASE("trefoil scene") {
  int res = scene_min_resolution("trefoil");
  SceneCheck sc = build("trefoil", res);
  CHECK(betti_reduced(sc.conductor.complex).betti == std::array<int, 4>{1, 1, 0, 0});
  CHECK(betti_reduced(sc.insulator.complex).betti == std::array<int, 4>{1, 1, 1, 0});

  auto p = probe_pairing(sc, "trefoil", res);
  REQUIRE(p.size() == 1);
  CHECK((p[0][0] == 1 || p[0][0] == -1));
}
