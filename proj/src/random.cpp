#include "qent/random.hpp"

#include "qent/errors.hpp"

namespace qent {

Rng make_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

CVector random_complex_gaussian(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  CMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) g.col(j) = random_complex_gaussian(n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

PureState random_pure_state(const HilbertDims& dims, Rng& rng) {
  CVector v = random_complex_gaussian(dims.total(), rng);
  v.normalize();
  return PureState(dims, std::move(v));
}

DensityMatrix random_density_matrix(const HilbertDims& dims, int rank, Rng& rng) {
  if (rank < 1 || rank > dims.total()) throw DomainError("rank out of range");
  CMatrix g(dims.total(), rank);
  for (int j = 0; j < rank; ++j) g.col(j) = random_complex_gaussian(dims.total(), rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(dims, hermitian_part(rho));
}

}  // namespace qent
