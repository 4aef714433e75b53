#pragma once

#include <array>
#include <string>
#include <vector>

#include "topocut/mesh.hpp"

namespace topocut {

/// Closed lattice polyline: consecutive vertices one unit apart, last
/// implicitly connected to first.
using LatticeLoop = std::vector<std::array<int, 3>>;

/// Built-in voxel test geometries. All scenes are a conductor inside a full
/// insulating box with at least one voxel of margin; deterministic for fixed
/// (name, resolution).
///
///   solid-torus   (res >= 3): square ring of res x res perimeter voxels
///   double-torus  (res >= 3): two rings sharing one side column (figure eight)
///   two-turn-coil (res >= 4): staircase helix winding twice around a vertical
///                             axis, closed through an outer return column
///   trefoil       (res >= 5): lattice (2,3) torus knot tube
std::vector<std::string> scene_names();
int scene_min_resolution(const std::string& name);

Mesh generate_scene(const std::string& name, int resolution);

/// Probe loops in the insulating region, one per independent handle of the
/// conductor: each threads a hole and closes outside the conductor.
/// The two-turn-coil probe runs along the coil axis (it links both turns).
std::vector<LatticeLoop> scene_probes(const std::string& name, int resolution);

/// Ordered closed conductor voxel curves, one per wire loop (the double
/// torus returns two, sharing one column of voxels).
std::vector<std::vector<std::array<int, 3>>> scene_conductor_loops(const std::string& name, int resolution);

/// Edge chain of a closed lattice polyline (coefficients +-1 following the
/// traversal direction).
IntChain lattice_loop_chain(const Skeleton& skeleton, const LatticeLoop& loop);

}  // namespace topocut
