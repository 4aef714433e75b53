#include "topocut/snf.hpp"

#include <cstdlib>
#include <utility>

namespace topocut {

SparseIntMat SparseIntMat::identity(int n) {
  SparseIntMat m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

SparseIntMat SparseIntMat::boundary_matrix(const ChainComplex& cx, int d) {
  if (d < 1 || d > ChainComplex::kMaxDim) throw TopologyError("boundary_matrix: dimension out of range");
  SparseIntMat m(cx.cell_count(d - 1), cx.cell_count(d));
  for (CellId id = 0; id < cx.cell_count(d); ++id)
    for (const auto& [f, sign] : cx.faces(d, id)) m.add(f, id, Int(sign));
  return m;
}

void SparseIntMat::set(int i, int j, const Int& v) {
  auto si = static_cast<std::size_t>(i);
  auto sj = static_cast<std::size_t>(j);
  if (v == 0) {
    rows_[si].erase(j);
    cols_[sj].erase(i);
  } else {
    rows_[si][j] = v;
    cols_[sj][i] = v;
  }
}

void SparseIntMat::add(int i, int j, const Int& v) {
  if (v == 0) return;
  auto si = static_cast<std::size_t>(i);
  auto it = rows_[si].find(j);
  if (it == rows_[si].end()) {
    set(i, j, v);
  } else {
    Int nv = it->second + v;
    set(i, j, nv);
  }
}

std::size_t SparseIntMat::nnz() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

void SparseIntMat::row_axpy(const Int& q, int src, int dst) {
  if (q == 0 || src == dst) return;
  // Copy keys first: set() mutates the source of iteration otherwise.
  std::vector<std::pair<int, Int>> entries(rows_[static_cast<std::size_t>(src)].begin(),
                                           rows_[static_cast<std::size_t>(src)].end());
  for (const auto& [j, v] : entries) add(dst, j, q * v);
}

void SparseIntMat::col_axpy(const Int& q, int src, int dst) {
  if (q == 0 || src == dst) return;
  std::vector<std::pair<int, Int>> entries(cols_[static_cast<std::size_t>(src)].begin(),
                                           cols_[static_cast<std::size_t>(src)].end());
  for (const auto& [i, v] : entries) add(i, dst, q * v);
}

void SparseIntMat::row_swap(int a, int b) {
  if (a == b) return;
  auto sa = static_cast<std::size_t>(a);
  auto sb = static_cast<std::size_t>(b);
  for (const auto& [j, v] : rows_[sa]) cols_[static_cast<std::size_t>(j)].erase(a);
  for (const auto& [j, v] : rows_[sb]) cols_[static_cast<std::size_t>(j)].erase(b);
  std::swap(rows_[sa], rows_[sb]);
  for (const auto& [j, v] : rows_[sa]) cols_[static_cast<std::size_t>(j)][a] = v;
  for (const auto& [j, v] : rows_[sb]) cols_[static_cast<std::size_t>(j)][b] = v;
}

void SparseIntMat::col_swap(int a, int b) {
  if (a == b) return;
  auto sa = static_cast<std::size_t>(a);
  auto sb = static_cast<std::size_t>(b);
  for (const auto& [i, v] : cols_[sa]) rows_[static_cast<std::size_t>(i)].erase(a);
  for (const auto& [i, v] : cols_[sb]) rows_[static_cast<std::size_t>(i)].erase(b);
  std::swap(cols_[sa], cols_[sb]);
  for (const auto& [i, v] : cols_[sa]) rows_[static_cast<std::size_t>(i)][a] = v;
  for (const auto& [i, v] : cols_[sb]) rows_[static_cast<std::size_t>(i)][b] = v;
}

void SparseIntMat::row_negate(int i) {
  auto si = static_cast<std::size_t>(i);
  for (auto& [j, v] : rows_[si]) {
    v = -v;
    cols_[static_cast<std::size_t>(j)][i] = v;
  }
}

void SparseIntMat::col_negate(int j) {
  auto sj = static_cast<std::size_t>(j);
  for (auto& [i, v] : cols_[sj]) {
    v = -v;
    rows_[static_cast<std::size_t>(i)][j] = v;
  }
}

SparseIntMat SparseIntMat::transposed() const {
  SparseIntMat m(ncols_, nrows_);
  for (int i = 0; i < nrows_; ++i)
    for (const auto& [j, v] : row(i)) m.set(j, i, v);
  return m;
}

SparseIntMat SparseIntMat::multiplied(const SparseIntMat& o) const {
  if (ncols_ != o.nrows_) throw TopologyError("SparseIntMat: shape mismatch in product");
  SparseIntMat m(nrows_, o.ncols_);
  for (int i = 0; i < nrows_; ++i) {
    for (const auto& [k, v] : row(i)) {
      for (const auto& [j, w] : o.row(k)) m.add(i, j, v * w);
    }
  }
  return m;
}

IntChain SparseIntMat::apply(const IntChain& x, int result_dim) const {
  IntChain y(result_dim);
  for (const auto& [j, v] : x.coeffs)
    for (const auto& [i, w] : col(j)) y.add(i, w * v);
  return y;
}

bool SparseIntMat::operator==(const SparseIntMat& o) const {
  return nrows_ == o.nrows_ && ncols_ == o.ncols_ && rows_ == o.rows_;
}

namespace {

Int abs_int(const Int& v) { return v < 0 ? Int(-v) : v; }

struct SNFWorker {
  SparseIntMat D;
  SNFOptions opt;
  SparseIntMat U, Uinv, V, Vinv;

  explicit SNFWorker(const SparseIntMat& A, const SNFOptions& o) : D(A), opt(o) {
    if (opt.want_U) U = SparseIntMat::identity(A.rows());
    if (opt.want_Uinv) Uinv = SparseIntMat::identity(A.rows());
    if (opt.want_V) V = SparseIntMat::identity(A.cols());
    if (opt.want_Vinv) Vinv = SparseIntMat::identity(A.cols());
  }

  void row_axpy(const Int& q, int src, int dst) {
    D.row_axpy(q, src, dst);
    if (opt.want_U) U.row_axpy(q, src, dst);
    if (opt.want_Uinv) Uinv.col_axpy(-q, dst, src);
  }
  void row_swap(int a, int b) {
    D.row_swap(a, b);
    if (opt.want_U) U.row_swap(a, b);
    if (opt.want_Uinv) Uinv.col_swap(a, b);
  }
  void row_negate(int i) {
    D.row_negate(i);
    if (opt.want_U) U.row_negate(i);
    if (opt.want_Uinv) Uinv.col_negate(i);
  }
  void col_axpy(const Int& q, int src, int dst) {
    D.col_axpy(q, src, dst);
    if (opt.want_V) V.col_axpy(q, src, dst);
    if (opt.want_Vinv) Vinv.row_axpy(-q, dst, src);
  }
  void col_swap(int a, int b) {
    D.col_swap(a, b);
    if (opt.want_V) V.col_swap(a, b);
    if (opt.want_Vinv) Vinv.row_swap(a, b);
  }

  // Nonzero entry of minimal absolute value in the submatrix (rows >= k,
  // cols >= k); ties broken by lowest row index, then lowest column index.
  bool find_pivot(int k, int* pi, int* pj) {
    bool found = false;
    Int best = 0;
    for (int i = k; i < D.rows(); ++i) {
      for (const auto& [j, v] : D.row(i)) {
        if (j < k) continue;
        Int a = abs_int(v);
        if (!found || a < best) {
          found = true;
          best = a;
          *pi = i;
          *pj = j;
          if (best == 1) return true;  // global minimum, first in (row, col) order
        }
      }
    }
    return found;
  }

  SNFResult run() {
    int n = std::min(D.rows(), D.cols());
    int k = 0;
    while (k < n) {
      int pi = 0, pj = 0;
      if (!find_pivot(k, &pi, &pj)) break;
      row_swap(k, pi);
      col_swap(k, pj);
      if (D.at(k, k) < 0) row_negate(k);
      Int p = D.at(k, k);

      bool clean = true;
      // Clear column k below the pivot.
      std::vector<int> col_rows;
      for (const auto& [i, v] : D.col(k))
        if (i != k) col_rows.push_back(i);
      for (int i : col_rows) {
        Int a = D.at(i, k);
        if (a == 0) continue;
        Int q = a / p;  // truncated: remainder has |r| < p
        row_axpy(-q, k, i);
        if (D.at(i, k) != 0) clean = false;
      }
      if (!clean) continue;  // a remainder smaller than p appeared; re-pivot

      std::vector<int> row_cols;
      for (const auto& [j, v] : D.row(k))
        if (j != k) row_cols.push_back(j);
      for (int j : row_cols) {
        Int a = D.at(k, j);
        if (a == 0) continue;
        Int q = a / p;
        col_axpy(-q, k, j);
        if (D.at(k, j) != 0) clean = false;
      }
      if (!clean) continue;

      if (p != 1) {
        // Pivot must divide every remaining entry for the divisor chain.
        int bad_row = -1;
        for (int i = k + 1; i < D.rows() && bad_row < 0; ++i) {
          for (const auto& [j, v] : D.row(i)) {
            if (j <= k) continue;
            if (v % p != 0) {
              bad_row = i;
              break;
            }
          }
        }
        if (bad_row >= 0) {
          row_axpy(1, bad_row, k);
          continue;
        }
      }
      ++k;
    }

    SNFResult res;
    res.rank = k;
    for (int i = 0; i < k; ++i) res.divisors.push_back(D.at(i, i));
    res.D = std::move(D);
    res.has_transforms = opt.want_U || opt.want_Uinv || opt.want_V || opt.want_Vinv;
    res.U = std::move(U);
    res.Uinv = std::move(Uinv);
    res.V = std::move(V);
    res.Vinv = std::move(Vinv);
    return res;
  }
};

}  // namespace

SNFResult smith_normal_form(const SparseIntMat& A, const SNFOptions& opt) {
  SNFWorker w(A, opt);
  return w.run();
}

int snf_rank(const SparseIntMat& A) {
  SNFWorker w(A, SNFOptions{});
  return w.run().rank;
}

}  // namespace topocut
