#pragma once

#include <cstdint>
#include <random>

#include "qent/hilbert.hpp"

namespace qent {

using Rng = std::mt19937_64;

/// Independent stream for worker `index` under a common seed.
Rng make_rng(std::uint64_t seed, std::uint64_t index = 0);

CVector random_complex_gaussian(Eigen::Index n, Rng& rng);
/// Haar-distributed unitary via QR of a Ginibre matrix with phase fix.
CMatrix random_unitary(Eigen::Index n, Rng& rng);
PureState random_pure_state(const HilbertDims& dims, Rng& rng);
/// G G^+ / tr(G G^+) for a complex Gaussian N x rank matrix G.
DensityMatrix random_density_matrix(const HilbertDims& dims, int rank, Rng& rng);

}  // namespace qent
