#include "topocut/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "json.hpp"
#include "topocut/homology.hpp"

namespace topocut {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

RegionKind parse_region(const std::string& s) {
  if (s == "conductor") return RegionKind::Conductor;
  if (s == "insulator") return RegionKind::Insulator;
  throw ParseError("unknown region label: " + s);
}

std::vector<std::array<int, 3>> voxel_corner_lattice(const std::vector<std::array<int, 3>>& voxels) {
  std::set<std::array<int, 3>> corners;
  for (const auto& v : voxels)
    for (int dx = 0; dx <= 1; ++dx)
      for (int dy = 0; dy <= 1; ++dy)
        for (int dz = 0; dz <= 1; ++dz) corners.insert({v[0] + dx, v[1] + dy, v[2] + dz});
  return {corners.begin(), corners.end()};
}

}  // namespace

Mesh parse_mesh(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "cwmesh-1") throw ParseError("unsupported format tag");
    if (doc.at("dimension").get<int>() != 3) throw ParseError("only dimension 3 is supported");

    Mesh mesh;
    if (doc.contains("pitch")) {
      mesh.pitch = doc["pitch"].get<double>();
      if (!(mesh.pitch > 0.0)) throw ParseError("pitch must be positive");
    }

    const json& volumes = doc.at("volumes");
    bool has_tets = volumes.contains("tets");
    bool has_voxels = volumes.contains("voxels");
    if (has_tets == has_voxels) throw ParseError("volumes must hold exactly one of tets, voxels");

    if (has_tets) {
      for (const auto& row : doc.at("vertices")) {
        if (row.size() != 3) throw ParseError("vertex must have 3 coordinates");
        mesh.vertices.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
      }
      std::set<std::array<int, 4>> seen;
      for (const auto& row : volumes["tets"]) {
        if (row.size() != 4) throw ParseError("tet must have 4 vertex ids");
        std::array<int, 4> t{row[0].get<int>(), row[1].get<int>(), row[2].get<int>(), row[3].get<int>()};
        for (int v : t)
          if (v < 0 || v >= static_cast<int>(mesh.vertices.size())) throw ParseError("tet vertex id out of range");
        std::array<int, 4> key = t;
        std::sort(key.begin(), key.end());
        if (key[0] == key[1] || key[1] == key[2] || key[2] == key[3]) throw ParseError("degenerate tet");
        if (!seen.insert(key).second) throw ParseError("duplicate volume");
        mesh.tets.push_back(t);
      }
      if (mesh.tets.empty()) throw ParseError("no volumes");
    } else {
      std::set<std::array<int, 3>> seen;
      for (const auto& row : volumes["voxels"]) {
        if (row.size() != 3) throw ParseError("voxel must have 3 lattice coordinates");
        std::array<int, 3> v{row[0].get<int>(), row[1].get<int>(), row[2].get<int>()};
        if (!seen.insert(v).second) throw ParseError("duplicate volume");
        mesh.voxels.push_back(v);
      }
      if (mesh.voxels.empty()) throw ParseError("no volumes");
      auto lattice = voxel_corner_lattice(mesh.voxels);
      for (const auto& c : lattice)
        mesh.vertices.push_back({c[0] * mesh.pitch, c[1] * mesh.pitch, c[2] * mesh.pitch});
      if (doc.contains("vertices")) {
        const json& given = doc["vertices"];
        if (given.size() != mesh.vertices.size()) throw ParseError("vertex list does not match voxel lattice");
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
          for (int k = 0; k < 3; ++k)
            if (given[i][static_cast<std::size_t>(k)].get<double>() != mesh.vertices[i][static_cast<std::size_t>(k)])
              throw ParseError("vertex list does not match voxel lattice");
      }
    }

    const json& regions = doc.at("regions");
    if (regions.size() != mesh.volume_count()) throw ParseError("regions size must match volume count");
    for (const auto& r : regions) mesh.region.push_back(parse_region(r.get<std::string>()));
    return mesh;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
}

std::string serialize_mesh(const Mesh& mesh) {
  ordered_json doc;
  doc["format"] = "cwmesh-1";
  doc["dimension"] = 3;
  ordered_json verts = ordered_json::array();
  for (const auto& v : mesh.vertices) verts.push_back({v[0], v[1], v[2]});
  doc["vertices"] = std::move(verts);
  ordered_json volumes;
  if (mesh.is_voxel()) {
    ordered_json rows = ordered_json::array();
    for (const auto& v : mesh.voxels) rows.push_back({v[0], v[1], v[2]});
    volumes["voxels"] = std::move(rows);
  } else {
    ordered_json rows = ordered_json::array();
    for (const auto& t : mesh.tets) rows.push_back({t[0], t[1], t[2], t[3]});
    volumes["tets"] = std::move(rows);
  }
  doc["volumes"] = std::move(volumes);
  ordered_json regions = ordered_json::array();
  for (RegionKind r : mesh.region) regions.push_back(r == RegionKind::Conductor ? "conductor" : "insulator");
  doc["regions"] = std::move(regions);
  doc["pitch"] = mesh.pitch;
  return doc.dump();
}

namespace {

// -- voxel skeleton --------------------------------------------------------
//
// Cells are elementary cubes keyed (x, y, z, ext): min corner plus a bitmask
// of spanned axes. dim = popcount(ext).

using CubeKey = std::array<int, 4>;

int cube_dim(const CubeKey& k) {
  int e = k[3];
  return (e & 1) + ((e >> 1) & 1) + ((e >> 2) & 1);
}

void build_voxel_skeleton(const Mesh& mesh, Skeleton& out) {
  std::array<std::set<CubeKey>, 4> keys;
  for (const auto& v : mesh.voxels) {
    // 27 sub-cells: per axis low corner, high corner, or full span
    for (int cx = 0; cx < 3; ++cx)
      for (int cy = 0; cy < 3; ++cy)
        for (int cz = 0; cz < 3; ++cz) {
          CubeKey k{v[0] + (cx == 1 ? 1 : 0), v[1] + (cy == 1 ? 1 : 0), v[2] + (cz == 1 ? 1 : 0),
                    (cx == 2 ? 1 : 0) | (cy == 2 ? 2 : 0) | (cz == 2 ? 4 : 0)};
          keys[cube_dim(k)].insert(k);
        }
  }

  std::array<std::map<CubeKey, CellId>, 4> id_of;
  for (int d = 0; d <= 3; ++d) {
    CellId next = 0;
    for (const CubeKey& k : keys[d]) id_of[d].emplace(k, next++);
  }

  for (int d = 0; d <= 3; ++d) {
    for (const CubeKey& k : keys[d]) {
      std::vector<ChainComplex::Entry> faces;
      int nth = 0;  // 1-based index of the axis among the spanned ones
      for (int axis = 0; axis < 3; ++axis) {
        if (!(k[3] & (1 << axis))) continue;
        ++nth;
        int sign = (nth % 2 == 1) ? 1 : -1;  // (-1)^(nth-1)
        CubeKey lower = k, upper = k;
        lower[3] &= ~(1 << axis);
        upper[3] &= ~(1 << axis);
        upper[axis] += 1;
        faces.push_back({id_of[d - 1].at(upper), static_cast<std::int8_t>(sign)});
        faces.push_back({id_of[d - 1].at(lower), static_cast<std::int8_t>(-sign)});
      }
      out.complex.add_cell(d, std::move(faces));

      std::vector<CellId> corners;
      for (int dx = 0; dx <= ((k[3] & 1) ? 1 : 0); ++dx)
        for (int dy = 0; dy <= ((k[3] & 2) ? 1 : 0); ++dy)
          for (int dz = 0; dz <= ((k[3] & 4) ? 1 : 0); ++dz)
            corners.push_back(id_of[0].at(CubeKey{k[0] + dx, k[1] + dy, k[2] + dz, 0}));
      std::sort(corners.begin(), corners.end());
      out.cell_vertices[d].push_back(std::move(corners));
    }
  }

  for (const CubeKey& k : keys[0]) out.positions.push_back({k[0] * mesh.pitch, k[1] * mesh.pitch, k[2] * mesh.pitch});

  out.volume_of_input.reserve(mesh.voxels.size());
  for (const auto& v : mesh.voxels) out.volume_of_input.push_back(id_of[3].at(CubeKey{v[0], v[1], v[2], 7}));
  out.voxel = true;
  out.pitch = mesh.pitch;
}

// -- tetrahedral skeleton --------------------------------------------------
//
// Simplices oriented by ascending vertex id; the j-th face (omitting the
// j-th vertex of the sorted tuple) carries sign (-1)^j.

void build_tet_skeleton(const Mesh& mesh, Skeleton& out) {
  std::set<std::array<int, 2>> edge_keys;
  std::set<std::array<int, 3>> face_keys;
  std::set<std::array<int, 4>> vol_keys;
  for (const auto& t : mesh.tets) {
    std::array<int, 4> s = t;
    std::sort(s.begin(), s.end());
    vol_keys.insert(s);
    for (int j = 0; j < 4; ++j) {
      std::array<int, 3> f{};
      int w = 0;
      for (int i = 0; i < 4; ++i)
        if (i != j) f[static_cast<std::size_t>(w++)] = s[static_cast<std::size_t>(i)];
      face_keys.insert(f);
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
          edge_keys.insert({f[static_cast<std::size_t>(a)], f[static_cast<std::size_t>(b)]});
    }
  }

  std::map<std::array<int, 2>, CellId> edge_id;
  std::map<std::array<int, 3>, CellId> face_id;
  std::map<std::array<int, 4>, CellId> vol_id;
  CellId next = 0;
  for (const auto& k : edge_keys) edge_id.emplace(k, next++);
  next = 0;
  for (const auto& k : face_keys) face_id.emplace(k, next++);
  next = 0;
  for (const auto& k : vol_keys) vol_id.emplace(k, next++);

  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    out.complex.add_cell(0, {});
    out.cell_vertices[0].push_back({static_cast<CellId>(v)});
  }
  for (const auto& k : edge_keys) {
    out.complex.add_cell(1, {{k[0], -1}, {k[1], 1}});
    out.cell_vertices[1].push_back({k[0], k[1]});
  }
  for (const auto& k : face_keys) {
    std::vector<ChainComplex::Entry> faces;
    for (int j = 0; j < 3; ++j) {
      std::array<int, 2> e{};
      int w = 0;
      for (int i = 0; i < 3; ++i)
        if (i != j) e[static_cast<std::size_t>(w++)] = k[static_cast<std::size_t>(i)];
      faces.push_back({edge_id.at(e), static_cast<std::int8_t>(j % 2 == 0 ? 1 : -1)});
    }
    out.complex.add_cell(2, std::move(faces));
    out.cell_vertices[2].push_back({k[0], k[1], k[2]});
  }
  for (const auto& k : vol_keys) {
    std::vector<ChainComplex::Entry> faces;
    for (int j = 0; j < 4; ++j) {
      std::array<int, 3> f{};
      int w = 0;
      for (int i = 0; i < 4; ++i)
        if (i != j) f[static_cast<std::size_t>(w++)] = k[static_cast<std::size_t>(i)];
      faces.push_back({face_id.at(f), static_cast<std::int8_t>(j % 2 == 0 ? 1 : -1)});
    }
    out.complex.add_cell(3, std::move(faces));
    out.cell_vertices[3].push_back({k[0], k[1], k[2], k[3]});
  }

  out.positions = mesh.vertices;
  out.volume_of_input.reserve(mesh.tets.size());
  for (const auto& t : mesh.tets) {
    std::array<int, 4> s = t;
    std::sort(s.begin(), s.end());
    out.volume_of_input.push_back(vol_id.at(s));
  }
  out.voxel = false;
  out.pitch = mesh.pitch;
}

}  // namespace

Skeleton build_skeleton(const Mesh& mesh) {
  if (mesh.volume_count() == 0) throw ParseError("mesh has no volumes");
  if (mesh.region.size() != mesh.volume_count()) throw ParseError("regions size must match volume count");

  Skeleton out;
  if (mesh.is_voxel())
    build_voxel_skeleton(mesh, out);
  else
    build_tet_skeleton(mesh, out);
  out.complex.validate();

  const ChainComplex& cx = out.complex;
  SubcomplexView conductor(cx);
  for (std::size_t i = 0; i < mesh.region.size(); ++i)
    if (mesh.region[i] == RegionKind::Conductor) conductor.insert_closure(3, out.volume_of_input[i]);

  // Closure of the complement; the interface ends up in both regions.
  SubcomplexView insulator(cx);
  for (int d = 0; d <= 3; ++d)
    for (CellId id = 0; id < cx.cell_count(d); ++id)
      if (!conductor.contains(d, id)) insulator.insert(d, id);
  for (int d = 3; d >= 1; --d)
    for (CellId id = 0; id < cx.cell_count(d); ++id)
      if (insulator.contains(d, id))
        for (const auto& [f, s] : cx.faces(d, id)) insulator.insert(d - 1, f);

  if (conductor.empty()) throw TopologyError("conducting region is empty");
  if (insulator.empty()) throw TopologyError("insulating region is empty");

  out.regions.interface = SubcomplexView::intersection(conductor, insulator);
  out.regions.conductor = std::move(conductor);
  out.regions.insulator = std::move(insulator);

  BettiTable betti = betti_reduced(cx);
  bool trivial = betti.betti[0] == 1 && betti.betti[1] == 0 && betti.betti[2] == 0 && betti.betti[3] == 0;
  for (int d = 0; d <= 3; ++d)
    if (!betti.torsion[d].empty()) trivial = false;
  if (!trivial) throw TopologyError("mesh complex is not homologically trivial");
  return out;
}

}  // namespace topocut
