#pragma once

// Hot loops of the library in two flavours: an OpenMP version used by the
// public API and a plain serial version kept as a reference for tests and the
// benchmark. Both must produce identical results up to round-off.

#include <span>
#include <vector>

#include "qent/antisymmetric.hpp"
#include "qent/hilbert.hpp"

namespace qent {

enum class Site { First, Second };

/// Jump operator L acting on one subsystem, with rate Gamma_i.
struct LocalJump {
  Site site;
  CMatrix op;
  double rate;
};

namespace kernels {

/// Kronecker lift of a local operator to H1 (x) H2.
CMatrix lift(Site site, const CMatrix& local, const HilbertDims& dims);

/// out = sum_i rate_i (L_i rho L_i^+ - {L_i^+ L_i, rho}/2), all L_i lifted by
/// dense Kronecker products. O(N^3) per jump.
void lindblad_apply_serial(const HilbertDims& dims, std::span<const LocalJump> jumps,
                           const CMatrix& rho, CMatrix& out);

/// Same result, applying each local operator through the tensor structure
/// (O(d N^2) per pass) with OpenMP over matrix columns.
void lindblad_apply_parallel(const HilbertDims& dims,
                             std::span<const LocalJump> jumps, const CMatrix& rho,
                             CMatrix& out);

/// T^alpha_{jk} = <chi_alpha|phi_j (x) phi_k> for every alpha.
std::vector<CMatrix> build_T_serial(const HilbertDims& dims,
                                    std::span<const ChiIndex> chis,
                                    std::span<const CVector> phis);

std::vector<CMatrix> build_T_parallel(const HilbertDims& dims,
                                      std::span<const ChiIndex> chis,
                                      std::span<const CVector> phis);

}  // namespace kernels
}  // namespace qent
