#include "topocut/cell_complex.hpp"

#include <algorithm>
#include <map>

namespace topocut {

void ChainComplex::ensure_cofaces() const {
  if (cofaces_built_) return;
  for (int d = 0; d <= kMaxDim; ++d)
    cofaces_[d].assign(static_cast<std::size_t>(counts_[d]), {});
  for (int d = 1; d <= kMaxDim; ++d) {
    for (CellId id = 0; id < counts_[d]; ++id) {
      for (const auto& [f, sign] : faces_[d][static_cast<std::size_t>(id)])
        cofaces_[d - 1][static_cast<std::size_t>(f)].push_back({id, sign});
    }
  }
  cofaces_built_ = true;
}

void ChainComplex::validate() const {
  for (int d = 1; d <= kMaxDim; ++d) {
    for (CellId id = 0; id < counts_[d]; ++id) {
      for (const auto& [f, sign] : faces_[d][static_cast<std::size_t>(id)]) {
        if (f < 0 || f >= counts_[d - 1]) throw TopologyError("ChainComplex: face id out of range");
        if (sign != 1 && sign != -1) throw TopologyError("ChainComplex: incidence not in {-1,+1}");
      }
    }
  }
  // dd = 0, cell by cell.
  for (int d = 2; d <= kMaxDim; ++d) {
    for (CellId id = 0; id < counts_[d]; ++id) {
      std::map<CellId, int> acc;
      for (const auto& [f, s1] : faces_[d][static_cast<std::size_t>(id)])
        for (const auto& [g, s2] : faces_[d - 1][static_cast<std::size_t>(f)]) acc[g] += int(s1) * int(s2);
      for (const auto& [g, v] : acc)
        if (v != 0) throw TopologyError("ChainComplex: dd != 0");
    }
  }
}

IntChain ChainComplex::boundary(const IntChain& chain) const {
  if (chain.dim < 1 || chain.dim > dim_) throw TopologyError("boundary: dimension out of range");
  IntChain out(chain.dim - 1);
  for (const auto& [id, v] : chain.coeffs) {
    if (id < 0 || id >= counts_[chain.dim]) throw TopologyError("boundary: invalid cell id");
    for (const auto& [f, sign] : faces_[chain.dim][static_cast<std::size_t>(id)]) out.add(f, Int(sign) * v);
  }
  return out;
}

IntChain ChainComplex::coboundary(const IntChain& cochain) const {
  if (cochain.dim < 0 || cochain.dim > kMaxDim) throw TopologyError("coboundary: dimension out of range");
  IntChain out(cochain.dim + 1);
  for (const auto& [id, v] : cochain.coeffs) {
    if (id < 0 || id >= counts_[cochain.dim]) throw TopologyError("coboundary: invalid cell id");
    for (const auto& [c, sign] : cofaces(cochain.dim, id)) out.add(c, Int(sign) * v);
  }
  return out;
}

CxCochain ChainComplex::coboundary(const CxCochain& cochain) const {
  if (cochain.dim < 0 || cochain.dim > kMaxDim) throw TopologyError("coboundary: dimension out of range");
  if (cochain.dim == kMaxDim) return CxCochain(cochain.dim + 1, 0);
  CxCochain out(cochain.dim + 1, static_cast<std::size_t>(counts_[cochain.dim + 1]));
  for (CellId id = 0; id < counts_[cochain.dim + 1]; ++id) {
    Complex acc{0.0, 0.0};
    for (const auto& [f, sign] : faces_[cochain.dim + 1][static_cast<std::size_t>(id)])
      acc += double(sign) * cochain[f];
    out[id] = acc;
  }
  return out;
}

void SubcomplexView::insert_closure(int d, CellId id) {
  if (contains(d, id)) return;
  insert(d, id);
  if (d == 0) return;
  for (const auto& [f, sign] : parent->faces(d, id)) {
    (void)sign;
    insert_closure(d - 1, f);
  }
}

int SubcomplexView::count(int d) const {
  if (d < 0 || d > ChainComplex::kMaxDim) return 0;
  return static_cast<int>(std::count(member[d].begin(), member[d].end(), char(1)));
}

bool SubcomplexView::empty() const {
  for (int d = 0; d <= ChainComplex::kMaxDim; ++d)
    if (count(d) > 0) return false;
  return true;
}

bool SubcomplexView::face_closed() const {
  for (int d = 1; d <= ChainComplex::kMaxDim; ++d) {
    for (CellId id = 0; id < parent->cell_count(d); ++id) {
      if (!contains(d, id)) continue;
      for (const auto& [f, sign] : parent->faces(d, id)) {
        (void)sign;
        if (!contains(d - 1, f)) return false;
      }
    }
  }
  return true;
}

SubcomplexView SubcomplexView::full(const ChainComplex& cx) {
  SubcomplexView v(cx);
  for (int d = 0; d <= ChainComplex::kMaxDim; ++d)
    std::fill(v.member[d].begin(), v.member[d].end(), char(1));
  return v;
}

SubcomplexView SubcomplexView::intersection(const SubcomplexView& a, const SubcomplexView& b) {
  if (a.parent != b.parent) throw TopologyError("SubcomplexView::intersection: different parents");
  SubcomplexView v(*a.parent);
  for (int d = 0; d <= ChainComplex::kMaxDim; ++d)
    for (std::size_t i = 0; i < v.member[d].size(); ++i)
      v.member[d][i] = a.member[d][i] && b.member[d][i];
  return v;
}

IntChain ComplexSlice::lift(const IntChain& chain_in_slice) const {
  IntChain out(chain_in_slice.dim);
  for (const auto& [id, v] : chain_in_slice.coeffs) out.set(new_to_old[chain_in_slice.dim][static_cast<std::size_t>(id)], v);
  return out;
}

IntChain ComplexSlice::push(const IntChain& chain_in_parent) const {
  IntChain out(chain_in_parent.dim);
  for (const auto& [id, v] : chain_in_parent.coeffs) {
    CellId nid = old_to_new[chain_in_parent.dim][static_cast<std::size_t>(id)];
    if (nid >= 0) out.set(nid, v);
  }
  return out;
}

namespace {

ComplexSlice build_slice(const ChainComplex& cx, const SubcomplexView& keep) {
  ComplexSlice out;
  out.complex.set_dim(0);
  for (int d = 0; d <= ChainComplex::kMaxDim; ++d) {
    out.old_to_new[d].assign(static_cast<std::size_t>(cx.cell_count(d)), -1);
    for (CellId id = 0; id < cx.cell_count(d); ++id) {
      if (!keep.contains(d, id)) continue;
      std::vector<ChainComplex::Entry> fs;
      if (d > 0) {
        for (const auto& [f, sign] : cx.faces(d, id)) {
          CellId nf = out.old_to_new[d - 1][static_cast<std::size_t>(f)];
          if (nf >= 0) fs.push_back({nf, sign});
        }
      }
      CellId nid = out.complex.add_cell(d, std::move(fs));
      out.new_to_old[d].push_back(id);
      out.old_to_new[d][static_cast<std::size_t>(id)] = nid;
    }
  }
  return out;
}

}  // namespace

ComplexSlice restrict_complex(const ChainComplex& cx, const SubcomplexView& view) {
  if (!view.face_closed()) throw TopologyError("restrict_complex: view not face-closed");
  return build_slice(cx, view);
}

ComplexSlice relative_complex(const ChainComplex& cx, const SubcomplexView& sub) {
  if (!sub.face_closed()) throw TopologyError("relative_complex: sub not face-closed");
  SubcomplexView keep = SubcomplexView::full(cx);
  for (int d = 0; d <= ChainComplex::kMaxDim; ++d)
    for (std::size_t i = 0; i < keep.member[d].size(); ++i)
      if (sub.member[d][i]) keep.member[d][i] = 0;
  return build_slice(cx, keep);
}

}  // namespace topocut
