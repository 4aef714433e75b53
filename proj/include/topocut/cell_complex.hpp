#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "topocut/chain.hpp"
#include "topocut/types.hpp"

namespace topocut {

/// Graded cell storage with integer incidence numbers kappa in {-1,0,+1}.
///
/// incidence[d] is the boundary matrix from d-cells to (d-1)-cells, stored
/// column-major: faces(d, cell) lists the (d-1)-faces of one d-cell with their
/// signs. The coboundary is the transpose of the same data; a row-major index
/// (cofaces) is built lazily and never stored twice.
///
/// Immutable after construction; all operations are pure.
class ChainComplex {
 public:
  using Entry = std::pair<CellId, std::int8_t>;  // (cell id, kappa)

  ChainComplex() : counts_{0, 0, 0, 0} {}

  static constexpr int kMaxDim = 3;

  int dim() const { return dim_; }
  int cell_count(int d) const { return (d < 0 || d > kMaxDim) ? 0 : counts_[d]; }
  std::size_t total_cells() const {
    std::size_t n = 0;
    for (int d = 0; d <= kMaxDim; ++d) n += static_cast<std::size_t>(counts_[d]);
    return n;
  }

  /// Faces of a d-cell, with incidence signs.
  const std::vector<Entry>& faces(int d, CellId id) const { return faces_[d][static_cast<std::size_t>(id)]; }

  /// Cofaces of a d-cell (the (d+1)-cells it bounds), with incidence signs.
  const std::vector<Entry>& cofaces(int d, CellId id) const {
    ensure_cofaces();
    return cofaces_[d][static_cast<std::size_t>(id)];
  }

  // -- construction -------------------------------------------------------

  void set_dim(int d) {
    if (d < 0 || d > kMaxDim) throw TopologyError("ChainComplex: dimension out of range");
    dim_ = d;
  }

  CellId add_cell(int d, std::vector<Entry> cell_faces) {
    if (d < 0 || d > kMaxDim) throw TopologyError("ChainComplex: dimension out of range");
    if (d > dim_) dim_ = d;
    CellId id = counts_[d]++;
    if (faces_[d].size() < static_cast<std::size_t>(counts_[d])) faces_[d].resize(static_cast<std::size_t>(counts_[d]));
    faces_[d][static_cast<std::size_t>(id)] = std::move(cell_faces);
    cofaces_built_ = false;
    return id;
  }

  /// Checks dd=0 for every cell and that face ids are in range. Throws on failure.
  void validate() const;

  // -- operators ----------------------------------------------------------

  IntChain boundary(const IntChain& chain) const;
  IntChain coboundary(const IntChain& cochain) const;
  CxCochain coboundary(const CxCochain& cochain) const;

 private:
  void ensure_cofaces() const;

  int dim_ = 0;
  std::array<int, kMaxDim + 1> counts_;
  std::array<std::vector<std::vector<Entry>>, kMaxDim + 1> faces_;
  mutable std::array<std::vector<std::vector<Entry>>, kMaxDim + 1> cofaces_;
  mutable bool cofaces_built_ = false;
};

/// Subset of a complex's cells, one bitmask per dimension.
/// Face-closure (every face of a member is a member) is required by most users.
struct SubcomplexView {
  const ChainComplex* parent = nullptr;
  std::array<std::vector<char>, ChainComplex::kMaxDim + 1> member;

  SubcomplexView() = default;
  explicit SubcomplexView(const ChainComplex& cx) : parent(&cx) {
    for (int d = 0; d <= ChainComplex::kMaxDim; ++d)
      member[d].assign(static_cast<std::size_t>(cx.cell_count(d)), 0);
  }

  bool contains(int d, CellId id) const {
    return d >= 0 && d <= ChainComplex::kMaxDim && member[d][static_cast<std::size_t>(id)] != 0;
  }
  void insert(int d, CellId id) { member[d][static_cast<std::size_t>(id)] = 1; }

  /// Adds a cell together with all of its faces, recursively.
  void insert_closure(int d, CellId id);

  int count(int d) const;
  bool empty() const;
  bool face_closed() const;

  static SubcomplexView full(const ChainComplex& cx);
  static SubcomplexView intersection(const SubcomplexView& a, const SubcomplexView& b);
};

/// Result of extracting a subcomplex (or quotient) as a standalone complex,
/// with id translation tables both ways. new_to_old[d][new_id] = old id;
/// old_to_new[d][old_id] = new id or -1.
struct ComplexSlice {
  ChainComplex complex;
  std::array<std::vector<CellId>, ChainComplex::kMaxDim + 1> new_to_old;
  std::array<std::vector<CellId>, ChainComplex::kMaxDim + 1> old_to_new;

  IntChain lift(const IntChain& chain_in_slice) const;
  IntChain push(const IntChain& chain_in_parent) const;
};

/// New complex containing exactly the cells of `view` (which must be face-closed).
ComplexSlice restrict_complex(const ChainComplex& cx, const SubcomplexView& view);

/// Quotient complex C(K)/C(S): cells of `sub` removed, incidence to them dropped.
ComplexSlice relative_complex(const ChainComplex& cx, const SubcomplexView& sub);

}  // namespace topocut
