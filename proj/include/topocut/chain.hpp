#pragma once

#include <map>
#include <vector>

#include "topocut/types.hpp"

namespace topocut {

/// Sparse integer chain (or cochain, on the same cell basis): cell id -> coefficient.
/// Stored coefficients are always nonzero, so the key set is the support.
struct IntChain {
  int dim = 0;
  std::map<CellId, Int> coeffs;

  IntChain() = default;
  explicit IntChain(int d) : dim(d) {}

  bool zero() const { return coeffs.empty(); }

  const Int& at(CellId id) const {
    static const Int kZero = 0;
    auto it = coeffs.find(id);
    return it == coeffs.end() ? kZero : it->second;
  }

  void add(CellId id, const Int& v) {
    if (v == 0) return;
    auto it = coeffs.find(id);
    if (it == coeffs.end()) {
      coeffs.emplace(id, v);
    } else {
      it->second += v;
      if (it->second == 0) coeffs.erase(it);
    }
  }

  void set(CellId id, const Int& v) {
    if (v == 0)
      coeffs.erase(id);
    else
      coeffs[id] = v;
  }

  IntChain& operator+=(const IntChain& o) {
    for (const auto& [id, v] : o.coeffs) add(id, v);
    return *this;
  }

  IntChain& operator-=(const IntChain& o) {
    for (const auto& [id, v] : o.coeffs) add(id, -v);
    return *this;
  }

  IntChain& operator*=(const Int& s) {
    if (s == 0) {
      coeffs.clear();
      return *this;
    }
    for (auto& [id, v] : coeffs) v *= s;
    return *this;
  }

  friend IntChain operator+(IntChain a, const IntChain& b) { return a += b; }
  friend IntChain operator-(IntChain a, const IntChain& b) { return a -= b; }
  friend IntChain operator*(const Int& s, IntChain a) { return a *= s; }

  bool operator==(const IntChain& o) const { return dim == o.dim && coeffs == o.coeffs; }
};

/// Complex-valued cochain; dense over the cells of one dimension.
struct CxCochain {
  int dim = 0;
  std::vector<Complex> values;

  CxCochain() = default;
  CxCochain(int d, std::size_t count) : dim(d), values(count, Complex{0.0, 0.0}) {}

  Complex& operator[](CellId id) { return values[static_cast<std::size_t>(id)]; }
  const Complex& operator[](CellId id) const { return values[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return values.size(); }
};

inline Int inner_product(const IntChain& a, const IntChain& b) {
  if (a.dim != b.dim) throw TopologyError("inner_product: dimension mismatch");
  const IntChain& small = a.coeffs.size() <= b.coeffs.size() ? a : b;
  const IntChain& big = a.coeffs.size() <= b.coeffs.size() ? b : a;
  Int acc = 0;
  for (const auto& [id, v] : small.coeffs) acc += v * big.at(id);
  return acc;
}

inline Complex inner_product(const IntChain& a, const CxCochain& b) {
  if (a.dim != b.dim) throw TopologyError("inner_product: dimension mismatch");
  Complex acc{0.0, 0.0};
  for (const auto& [id, v] : a.coeffs)
    acc += static_cast<double>(v) * b[id];
  return acc;
}

}  // namespace topocut
