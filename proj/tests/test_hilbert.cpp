#include <doctest.h>

#include <cmath>

#include "qent/errors.hpp"
#include "qent/hilbert.hpp"
#include "qent/random.hpp"

using namespace qent;

TEST_CASE("flat index is row-major over the first subsystem") {
  const HilbertDims dims(3, 4);
  CHECK(flat_index(0, 0, dims) == 0);
  CHECK(flat_index(0, 3, dims) == 3);
  CHECK(flat_index(1, 0, dims) == 4);
  CHECK(flat_index(2, 3, dims) == 11);
  CHECK_THROWS_AS(flat_index(3, 0, dims), DomainError);
}

TEST_CASE("copy space map pairs the indices of each copy") {
  const HilbertDims dims(2, 3);
  const auto [first, second] = copy_space_map(0, 1, 2, 0, dims);
  CHECK(first == flat_index(0, 2, dims));
  CHECK(second == flat_index(1, 0, dims));
}

TEST_CASE("local dimensions below two are rejected") {
  CHECK_THROWS_AS(HilbertDims(1, 2), DomainError);
}

TEST_CASE("pure states must be normalized") {
  const HilbertDims dims(2, 2);
  CVector v = CVector::Zero(4);
  v(0) = 1.0;
  CHECK_NOTHROW(PureState(dims, v));
  v(1) = 1.0;
  CHECK_THROWS_AS(PureState(dims, v), ValidationError);
  CHECK_THROWS(PureState(dims, CVector::Zero(3)));
}

TEST_CASE("density matrix constructor checks every invariant") {
  const HilbertDims dims(2, 2);
  CMatrix m = CMatrix::Identity(4, 4) / 4.0;
  CHECK_NOTHROW(DensityMatrix(dims, m));

  CMatrix non_herm = m;
  non_herm(0, 1) = Complex(0.0, 0.1);
  CHECK_THROWS_AS(DensityMatrix(dims, non_herm), ValidationError);

  CHECK_THROWS_AS(DensityMatrix(dims, m * 2.0), ValidationError);

  CMatrix negative = CMatrix::Zero(4, 4);
  negative(0, 0) = 1.2;
  negative(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix(dims, negative), ValidationError);
}

TEST_CASE("integrator output is symmetrized or rejected by tolerance") {
  const HilbertDims dims(2, 2);
  CMatrix m = CMatrix::Identity(4, 4) / 4.0;
  m(0, 1) = Complex(1e-9, 0.0);
  const DensityMatrix rho = DensityMatrix::from_integrator(dims, m, 1e-6);
  CHECK(std::abs(rho(0, 1) - rho(1, 0)) < 1e-15);

  CMatrix drifted = CMatrix::Identity(4, 4) / 4.0;
  drifted(0, 0) += 1e-3;
  CHECK_THROWS_AS(DensityMatrix::from_integrator(dims, drifted, 1e-6), IntegrityError);
}

TEST_CASE("spectral decomposition of a dephased two-term state") {
  // Equal-weight superposition whose coherence has decayed to one half:
  // eigenvalues (1 +- 1/2) / 2.
  const HilbertDims dims(3, 3);
  const int i = flat_index(0, 2, dims);
  const int j = flat_index(2, 0, dims);
  CMatrix m = CMatrix::Zero(9, 9);
  m(i, i) = m(j, j) = 0.5;
  m(i, j) = m(j, i) = 0.25;
  const SpectralDecomposition spec = spectral(DensityMatrix(dims, m));
  REQUIRE(spec.eigenvalues.size() == 2);
  CHECK(spec.eigenvalues(0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(spec.eigenvalues(1) == doctest::Approx(0.25).epsilon(1e-14));

  CMatrix rebuilt = CMatrix::Zero(9, 9);
  for (const auto& phi : spec.subnormalized) rebuilt += phi * phi.adjoint();
  CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("spectral decomposition reconstructs random states") {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const HilbertDims dims(2 + trial % 3, 2 + (trial / 3) % 2);
    const DensityMatrix rho = random_density_matrix(dims, 1 + trial % dims.total(), rng);
    const SpectralDecomposition spec = spectral(rho);
    for (Eigen::Index k = 1; k < spec.eigenvalues.size(); ++k) {
      CHECK(spec.eigenvalues(k) <= spec.eigenvalues(k - 1));
    }
    CMatrix rebuilt = CMatrix::Zero(dims.total(), dims.total());
    for (const auto& phi : spec.subnormalized) rebuilt += phi * phi.adjoint();
    CHECK((rebuilt - rho.matrix()).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("two-term states") {
  const HilbertDims dims(3, 3);
  const PureState psi = two_term_state(0.6, 0.8, 0, 2, 2, 0, dims);
  CHECK(std::abs(psi(0, 2) - Complex(0.6)) < 1e-15);
  CHECK(std::abs(psi(2, 0) - Complex(0.8)) < 1e-15);
  CHECK_THROWS_AS(two_term_state(0.6, 0.8, 1, 1, 1, 1, dims), ValidationError);
  CHECK_THROWS_AS(two_term_state(0.6, 0.6, 0, 1, 1, 0, dims), ValidationError);
}

TEST_CASE("Bell states and their reductions") {
  for (const BellKind kind :
       {BellKind::PsiPlus, BellKind::PsiMinus, BellKind::PhiPlus, BellKind::PhiMinus}) {
    const PureState psi = bell_state(kind);
    const CMatrix red = reduced_first(psi);
    CHECK((red - CMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-15);
  }
  const PureState psi_plus = bell_state(BellKind::PsiPlus);
  CHECK(std::abs(psi_plus(0, 1) - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(psi_plus(1, 0) - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  const PureState phi_minus = bell_state(BellKind::PhiMinus, HilbertDims(3, 3));
  CHECK(std::abs(phi_minus(1, 1) + Complex(1.0 / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("maximally mixed state") {
  const DensityMatrix rho = DensityMatrix::maximally_mixed(HilbertDims(2, 3));
  CHECK(std::abs(rho.matrix().trace() - Complex(1.0)) < 1e-15);
  CHECK(eigenvalues_desc(rho.matrix()).minCoeff() == doctest::Approx(1.0 / 6.0));
}
