#include "topocut/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

namespace topocut {

namespace {

using Voxel = std::array<int, 3>;

int chebyshev(const Voxel& a, const Voxel& b) {
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

int l1(const Voxel& a, const Voxel& b) {
  return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

/// A closed voxel curve must be face-connected and simple: voxels more than
/// three steps apart along the curve keep Chebyshev distance >= 2. Up to
/// three steps apart, a corner contact means the (at most four) voxels all
/// meet at one lattice vertex and their union is contractible, so such
/// staircase pinches do not change the homotopy type of the tube.
void validate_curve(const std::vector<Voxel>& path, const std::string& scene) {
  const int n = static_cast<int>(path.size());
  std::set<Voxel> seen(path.begin(), path.end());
  if (static_cast<int>(seen.size()) != n) throw ParseError("scene " + scene + ": curve revisits a voxel");
  for (int i = 0; i < n; ++i) {
    if (l1(path[static_cast<std::size_t>(i)], path[static_cast<std::size_t>((i + 1) % n)]) != 1)
      throw ParseError("scene " + scene + ": curve not face-connected");
    for (int j = i + 1; j < n; ++j) {
      int cyc = std::min(j - i, n - (j - i));
      if (cyc <= 3) continue;
      const Voxel& a = path[static_cast<std::size_t>(i)];
      const Voxel& b = path[static_cast<std::size_t>(j)];
      if (chebyshev(a, b) < 2)
        throw ParseError("scene " + scene + ": geometry would self-touch (resolution too low) at (" +
                         std::to_string(a[0]) + "," + std::to_string(a[1]) + "," + std::to_string(a[2]) +
                         ")@" + std::to_string(i) + " vs (" + std::to_string(b[0]) + "," +
                         std::to_string(b[1]) + "," + std::to_string(b[2]) + ")@" + std::to_string(j));
    }
  }
}

Mesh fill_box(int nx, int ny, int nz, const std::set<Voxel>& conductor) {
  Mesh m;
  std::set<Voxel> corners;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        Voxel v{i, j, k};
        m.voxels.push_back(v);
        m.region.push_back(conductor.count(v) ? RegionKind::Conductor : RegionKind::Insulator);
        for (int dx = 0; dx <= 1; ++dx)
          for (int dy = 0; dy <= 1; ++dy)
            for (int dz = 0; dz <= 1; ++dz) corners.insert({i + dx, j + dy, k + dz});
      }
  for (const auto& c : corners)
    m.vertices.push_back({static_cast<double>(c[0]), static_cast<double>(c[1]), static_cast<double>(c[2])});
  for (const auto& v : conductor)
    if (v[0] < 1 || v[1] < 1 || v[2] < 1 || v[0] >= nx - 1 || v[1] >= ny - 1 || v[2] >= nz - 1)
      throw ParseError("scene conductor touches the bounding box");
  return m;
}

/// CCW perimeter of the rectangle [x0,x1] x [y0,y1] at height z.
std::vector<Voxel> rect_ring(int x0, int x1, int y0, int y1, int z) {
  std::vector<Voxel> out;
  for (int x = x0; x <= x1; ++x) out.push_back({x, y0, z});
  for (int y = y0 + 1; y <= y1; ++y) out.push_back({x1, y, z});
  for (int x = x1 - 1; x >= x0; --x) out.push_back({x, y1, z});
  for (int y = y1 - 1; y >= y0 + 1; --y) out.push_back({x0, y, z});
  return out;
}

void append_line(LatticeLoop& loop, std::array<int, 3> from, const std::array<int, 3>& to) {
  loop.push_back(from);
  for (int axis = 0; axis < 3; ++axis) {
    int step = to[axis] > from[axis] ? 1 : -1;
    while (from[axis] != to[axis]) {
      from[axis] += step;
      loop.push_back(from);
    }
  }
  loop.pop_back();  // caller appends the next segment starting at `to`
}

/// Rectangle threading vertically at (px, py): up to z = zt, across in x to
/// x = xo, down, and back. All segments on lattice lines.
LatticeLoop probe_rect_x(int px, int py, int zt, int xo) {
  LatticeLoop loop;
  append_line(loop, {px, py, 0}, {px, py, zt});
  append_line(loop, {px, py, zt}, {xo, py, zt});
  append_line(loop, {xo, py, zt}, {xo, py, 0});
  append_line(loop, {xo, py, 0}, {px, py, 0});
  return loop;
}

// -- scene builders --------------------------------------------------------

struct Built {
  Mesh mesh;
  std::vector<LatticeLoop> probes;
  std::vector<std::vector<Voxel>> loops;  // ordered conductor curves
};

Built build_solid_torus(int r) {
  int a = 1, b = r;
  auto ring = rect_ring(a, b, a, b, 1);
  validate_curve(ring, "solid-torus");
  Built out;
  out.mesh = fill_box(r + 2, r + 2, 3, {ring.begin(), ring.end()});
  int h = (r + 1) / 2 + 1;  // lattice line inside (or on the rim of) the hole
  out.probes.push_back(probe_rect_x(h, h, 3, 0));
  out.loops.push_back(std::move(ring));
  return out;
}

Built build_double_torus(int r) {
  // Two square rings sharing the column x = r: a figure eight.
  auto ring_a = rect_ring(1, r, 1, r, 1);
  auto ring_b = rect_ring(r, 2 * r - 1, 1, r, 1);
  validate_curve(ring_a, "double-torus");
  validate_curve(ring_b, "double-torus");
  std::set<Voxel> cond(ring_a.begin(), ring_a.end());
  cond.insert(ring_b.begin(), ring_b.end());
  Built out;
  out.mesh = fill_box(2 * r + 1, r + 2, 3, cond);
  out.probes.push_back(probe_rect_x(2, 2, 3, 0));                    // west hole, exits west
  out.probes.push_back(probe_rect_x(r + 1, 2, 3, 2 * r + 1));       // east hole, exits east
  out.loops.push_back(std::move(ring_a));
  out.loops.push_back(std::move(ring_b));
  return out;
}

Built build_two_turn_coil(int r) {
  // Staircase helix on the square [a,b]^2, one z step per side, two laps,
  // closed by a return column outside the square (y = 1).
  int a = 3, b = a + r - 1;
  std::vector<Voxel> path;
  auto side = [&](Voxel from, const Voxel& to) {
    path.push_back(from);
    for (int axis = 0; axis < 3; ++axis) {
      int step = to[axis] > from[axis] ? 1 : -1;
      while (from[axis] != to[axis]) {
        from[axis] += step;
        path.push_back(from);
      }
    }
    path.pop_back();
  };
  for (int lap = 0; lap < 2; ++lap) {
    int z = 1 + 4 * lap;
    side({a, a, z}, {b, a, z});              // south, eastward
    side({b, a, z}, {b, a, z + 1});          // corner step
    side({b, a, z + 1}, {b, b, z + 1});      // east, northward
    side({b, b, z + 1}, {b, b, z + 2});
    side({b, b, z + 2}, {a, b, z + 2});      // north, westward
    side({a, b, z + 2}, {a, b, z + 3});
    side({a, b, z + 3}, {a, a, z + 3});      // west, southward
    side({a, a, z + 3}, {a, a, z + 4});
  }
  // return: radially out over the top, down at y = 1, back in at z = 1
  side({a, a, 9}, {a, 1, 9});
  side({a, 1, 9}, {a, 1, 1});
  side({a, 1, 1}, {a, a, 1});  // ends one voxel short of the start, closing the loop
  validate_curve(path, "two-turn-coil");

  Built out;
  out.mesh = fill_box(b + 2, b + 2, 11, {path.begin(), path.end()});
  out.probes.push_back(probe_rect_x(a + 2, a + 2, 11, b + 2));  // axial, exits east
  out.loops.push_back(std::move(path));
  return out;
}

Built build_trefoil(int s) {
  // (2,3) torus knot p(t) = ((2+cos 3t) cos 2t, (2+cos 3t) sin 2t, sin 3t),
  // scaled by s, rounded to voxels and joined with staircases.
  int off = 3 * s + 2;
  int offz = s + 2;
  const int samples = 400 * s;
  std::vector<Voxel> path;
  for (int k = 0; k < samples; ++k) {
    double t = 2.0 * M_PI * k / samples;
    double rad = 2.0 + std::cos(3 * t);
    Voxel v{static_cast<int>(std::floor(s * rad * std::cos(2 * t))) + off,
            static_cast<int>(std::floor(s * rad * std::sin(2 * t))) + off,
            static_cast<int>(std::floor(s * std::sin(3 * t))) + offz};
    if (path.empty()) {
      path.push_back(v);
      continue;
    }
    // staircase: one axis at a time
    Voxel cur = path.back();
    for (int axis = 0; axis < 3; ++axis) {
      int step = v[axis] > cur[axis] ? 1 : -1;
      while (cur[axis] != v[axis]) {
        cur[axis] += step;
        path.push_back(cur);
      }
    }
  }
  // close the staircase back to the start (t = 2 pi rounds off-by-one, so
  // the wrap is never closed by sampling alone)
  {
    Voxel cur = path.back();
    const Voxel first = path.front();
    for (int axis = 0; axis < 3; ++axis) {
      int step = first[axis] > cur[axis] ? 1 : -1;
      while (cur[axis] != first[axis]) {
        cur[axis] += step;
        path.push_back(cur);
      }
    }
    if (path.back() == first) path.pop_back();
  }
  // The sampled curve grazing a lattice plane produces local detours a
  // simple curve cannot contain: backtracks v,w,v, U-turns (p[i], p[i+3]
  // face-adjacent), and arches (p[i], p[i+4] two steps apart). Rewrite them
  // away until stable; the rotation exposes patterns across the wrap point.
  auto linear_smooth = [](std::vector<Voxel>& p) {
    bool changed = false;
    std::vector<Voxel> out;
    for (const Voxel& v : p) {
      out.push_back(v);
      for (bool again = true; again;) {
        again = false;
        std::size_t n = out.size();
        if (n >= 2 && out[n - 1] == out[n - 2]) {
          out.pop_back();
          changed = again = true;
        } else if (n >= 3 && out[n - 1] == out[n - 3]) {
          out.pop_back();
          out.pop_back();
          changed = again = true;
        } else if (n >= 4 && l1(out[n - 1], out[n - 4]) == 1) {
          out.erase(out.end() - 3, out.end() - 1);
          changed = again = true;
        } else if (n >= 5 && l1(out[n - 1], out[n - 5]) == 2) {
          Voxel a = out[n - 5], b = out[n - 1], m = a;
          for (int axis = 0; axis < 3; ++axis) {
            if (a[axis] != b[axis]) {
              m[axis] = std::abs(a[axis] - b[axis]) == 2 ? (a[axis] + b[axis]) / 2 : b[axis];
              break;
            }
          }
          out.erase(out.end() - 4, out.end() - 1);
          out.insert(out.end() - 1, m);
          changed = again = true;
        }
      }
    }
    p.swap(out);
    return changed;
  };
  for (bool changed = true; changed;) {
    changed = linear_smooth(path);
    std::rotate(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(path.size() / 2), path.end());
    changed = linear_smooth(path) || changed;
  }
  validate_curve(path, "trefoil");

  int nx = 6 * s + 5, nz = 2 * s + 5;
  Built out;
  out.mesh = fill_box(nx, nx, nz, {path.begin(), path.end()});
  // probe around the outermost strand (t = 0, heading +y): rectangle in the
  // lattice plane y = y0 around the tube cross-section
  Voxel v0 = path.front();  // near ((2+1)s, 0, 0) + offsets
  int y0 = v0[1] + 1;
  LatticeLoop probe;
  append_line(probe, {v0[0] - 2, y0, v0[2] - 2}, {v0[0] + 3, y0, v0[2] - 2});
  append_line(probe, {v0[0] + 3, y0, v0[2] - 2}, {v0[0] + 3, y0, v0[2] + 3});
  append_line(probe, {v0[0] + 3, y0, v0[2] + 3}, {v0[0] - 2, y0, v0[2] + 3});
  append_line(probe, {v0[0] - 2, y0, v0[2] + 3}, {v0[0] - 2, y0, v0[2] - 2});
  out.probes.push_back(std::move(probe));
  out.loops.push_back(std::move(path));
  return out;
}

Built build_scene(const std::string& name, int res) {
  if (res < scene_min_resolution(name))
    throw ParseError("scene " + name + ": resolution below minimum " +
                     std::to_string(scene_min_resolution(name)));
  if (name == "solid-torus") return build_solid_torus(res);
  if (name == "double-torus") return build_double_torus(res);
  if (name == "two-turn-coil") return build_two_turn_coil(res);
  if (name == "trefoil") return build_trefoil(res);
  throw ParseError("unknown scene: " + name);  // unreachable
}

}  // namespace

std::vector<std::string> scene_names() { return {"solid-torus", "double-torus", "two-turn-coil", "trefoil"}; }

int scene_min_resolution(const std::string& name) {
  if (name == "solid-torus") return 3;
  if (name == "double-torus") return 3;
  if (name == "two-turn-coil") return 4;
  if (name == "trefoil") return 5;
  std::string known;
  for (const std::string& s : scene_names()) known += (known.empty() ? "" : ", ") + s;
  throw ParseError("unknown scene: " + name + " (valid scenes: " + known + ")");
}

Mesh generate_scene(const std::string& name, int resolution) { return build_scene(name, resolution).mesh; }

std::vector<LatticeLoop> scene_probes(const std::string& name, int resolution) {
  return build_scene(name, resolution).probes;
}

std::vector<std::vector<std::array<int, 3>>> scene_conductor_loops(const std::string& name, int resolution) {
  return build_scene(name, resolution).loops;
}

IntChain lattice_loop_chain(const Skeleton& skeleton, const LatticeLoop& loop) {
  if (!skeleton.voxel) throw TopologyError("lattice_loop_chain: voxel skeleton required");
  std::map<std::array<int, 3>, CellId> vertex_at;
  for (CellId v = 0; v < skeleton.complex.cell_count(0); ++v) {
    const auto& p = skeleton.positions[static_cast<std::size_t>(v)];
    vertex_at[{static_cast<int>(std::lround(p[0] / skeleton.pitch)),
               static_cast<int>(std::lround(p[1] / skeleton.pitch)),
               static_cast<int>(std::lround(p[2] / skeleton.pitch))}] = v;
  }
  IntChain chain(1);
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto ia = vertex_at.find(loop[i]);
    auto ib = vertex_at.find(loop[(i + 1) % n]);
    if (ia == vertex_at.end() || ib == vertex_at.end())
      throw TopologyError("lattice_loop_chain: loop vertex not in the complex");
    CellId va = ia->second, vb = ib->second;
    CellId lo = std::min(va, vb), hi = std::max(va, vb);
    CellId edge = -1;
    for (const auto& [e, s] : skeleton.complex.cofaces(0, lo)) {
      const auto& vs = skeleton.cell_vertices[1][static_cast<std::size_t>(e)];
      if (vs.size() == 2 && vs[0] == lo && vs[1] == hi) {
        edge = e;
        break;
      }
    }
    if (edge < 0) throw TopologyError("lattice_loop_chain: consecutive loop vertices not connected");
    chain.add(edge, va < vb ? 1 : -1);  // edges are oriented low id -> high id
  }
  return chain;
}

}  // namespace topocut
