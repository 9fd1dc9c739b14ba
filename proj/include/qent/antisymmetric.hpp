#pragma once

#include <vector>

#include "qent/hilbert.hpp"

namespace qent {

/// Multi-index [k,l,m,n] of chi = (|kl> - |lk>) (x) (|mn> - |nm>), k<l, m<n.
struct ChiIndex {
  int k;
  int l;
  int m;
  int n;

  friend bool operator==(const ChiIndex&, const ChiIndex&) = default;
};

/// All C(d1,2) * C(d2,2) indices, ordered lexicographically by (k,l,m,n).
std::vector<ChiIndex> chi_indices(const HilbertDims& dims);

/// <chi_alpha | phi (x) phi'>, with the two-copy spaces identified through
/// copy_space_map. chi is real, so no conjugation enters.
inline Complex chi_overlap(const ChiIndex& a, const CVector& phi,
                           const CVector& phi2, const HilbertDims& dims) {
  const auto [km, ln] = copy_space_map(a.k, a.l, a.m, a.n, dims);
  const auto [kn, lm] = copy_space_map(a.k, a.l, a.n, a.m, dims);
  return phi(km) * phi2(ln) - phi(kn) * phi2(lm) - phi(lm) * phi2(kn) +
         phi(ln) * phi2(km);
}

}  // namespace qent
