#pragma once

#include <array>
#include <string>
#include <vector>

#include "topocut/cell_complex.hpp"

namespace topocut {

enum class RegionKind { Conductor, Insulator };

/// Labeled volume mesh: either tetrahedra over explicit vertices, or
/// axis-aligned unit voxels on an integer lattice (exactly one of the two).
struct Mesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 4>> tets;    // vertex ids, any order
  std::vector<std::array<int, 3>> voxels;  // lattice min corners
  std::vector<RegionKind> region;          // one per volume
  double pitch = 1.0;                      // voxel edge length in meters

  bool is_voxel() const { return !voxels.empty(); }
  std::size_t volume_count() const { return is_voxel() ? voxels.size() : tets.size(); }
};

/// Parses `cwmesh-1` JSON. For voxel documents the vertex list is derived
/// from the lattice (sorted by coordinate); a provided list must match it.
Mesh parse_mesh(const std::string& text);

std::string serialize_mesh(const Mesh& mesh);

/// Conductor / insulator closures. Interface cells belong to both.
struct RegionLabeling {
  SubcomplexView conductor;   // closure of conductor volumes
  SubcomplexView insulator;   // closure of the complement of the conductor
  SubcomplexView interface;   // conductor intersect insulator
};

/// Full cell skeleton with region views and enough geometry for the
/// constitutive matrices.
struct Skeleton {
  ChainComplex complex;
  RegionLabeling regions;
  std::vector<std::array<double, 3>> positions;  // per node, meters
  // Sorted vertex ids of every cell (2 per edge, 3-4 per face, 4 or 8 per volume).
  std::array<std::vector<std::vector<CellId>>, ChainComplex::kMaxDim + 1> cell_vertices;
  bool voxel = false;
  double pitch = 1.0;
  std::vector<CellId> volume_of_input;  // volume cell id per input volume index

  // The region views point into `complex`; copies and moves must rebind them.
  Skeleton() = default;
  Skeleton(const Skeleton& o)
      : complex(o.complex), regions(o.regions), positions(o.positions), cell_vertices(o.cell_vertices),
        voxel(o.voxel), pitch(o.pitch), volume_of_input(o.volume_of_input) {
    rebind();
  }
  Skeleton(Skeleton&& o) noexcept
      : complex(std::move(o.complex)), regions(std::move(o.regions)), positions(std::move(o.positions)),
        cell_vertices(std::move(o.cell_vertices)), voxel(o.voxel), pitch(o.pitch),
        volume_of_input(std::move(o.volume_of_input)) {
    rebind();
  }
  Skeleton& operator=(const Skeleton& o) {
    if (this != &o) *this = Skeleton(o);
    return *this;
  }
  Skeleton& operator=(Skeleton&& o) noexcept {
    complex = std::move(o.complex);
    regions = std::move(o.regions);
    positions = std::move(o.positions);
    cell_vertices = std::move(o.cell_vertices);
    voxel = o.voxel;
    pitch = o.pitch;
    volume_of_input = std::move(o.volume_of_input);
    rebind();
    return *this;
  }

 private:
  void rebind() {
    regions.conductor.parent = &complex;
    regions.insulator.parent = &complex;
    regions.interface.parent = &complex;
  }
};

/// Builds the skeleton: edges/faces deduplicated on sorted vertex keys,
/// deterministic cell ids (sorted keys), incidence validated, and the whole
/// complex checked to be homologically trivial (beta = (1,0,0), no torsion).
Skeleton build_skeleton(const Mesh& mesh);

}  // namespace topocut
