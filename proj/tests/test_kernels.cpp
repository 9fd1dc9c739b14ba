#include <doctest.h>

#include <vector>

#include "qent/antisymmetric.hpp"
#include "qent/kernels.hpp"
#include "qent/lindblad.hpp"
#include "qent/random.hpp"

using namespace qent;

namespace {

std::vector<LocalJump> both_sites(const EnvironmentModel& model, const HilbertDims& dims) {
  std::vector<LocalJump> jumps;
  for (const auto& t : local_jump_operators(model, dims.d1())) {
    jumps.push_back({Site::First, t.op, t.rate});
  }
  for (const auto& t : local_jump_operators(model, dims.d2())) {
    jumps.push_back({Site::Second, t.op, t.rate});
  }
  return jumps;
}

}  // namespace

TEST_CASE("lifted operators act on the intended factor") {
  const HilbertDims dims(2, 3);
  const CMatrix a1 = annihilation(2);
  const CMatrix lifted = kernels::lift(Site::First, a1, dims);
  // a (x) 1 maps |1 m> to |0 m>.
  for (int m = 0; m < 3; ++m) {
    CHECK(std::abs(lifted(flat_index(0, m, dims), flat_index(1, m, dims)) - Complex(1.0)) <
          1e-15);
  }
  const CMatrix lifted2 = kernels::lift(Site::Second, annihilation(3), dims);
  CHECK(std::abs(lifted2(flat_index(1, 1, dims), flat_index(1, 2, dims)) -
                 Complex(std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("parallel Lindblad kernel matches the serial reference") {
  Rng rng = make_rng(5);
  const std::vector<EnvironmentModel> models{
      EnvironmentModel::dephasing(0.7), EnvironmentModel::thermal(1.3, 0.4),
      EnvironmentModel::zero_temperature(0.9), EnvironmentModel::infinite_temperature(0.5)};
  for (const HilbertDims dims : {HilbertDims(2, 2), HilbertDims(2, 3), HilbertDims(4, 3),
                                 HilbertDims(5, 5)}) {
    const CMatrix rho = random_density_matrix(dims, dims.total(), rng).matrix();
    // Integrator stages are not Hermitian, so test a general matrix as well.
    CMatrix general(dims.total(), dims.total());
    for (Eigen::Index c = 0; c < general.cols(); ++c) {
      general.col(c) = random_complex_gaussian(dims.total(), rng);
    }
    for (const auto& model : models) {
      const auto jumps = both_sites(model, dims);
      for (const CMatrix* input : {&rho, static_cast<const CMatrix*>(&general)}) {
        CMatrix serial;
        CMatrix parallel;
        kernels::lindblad_apply_serial(dims, jumps, *input, serial);
        kernels::lindblad_apply_parallel(dims, jumps, *input, parallel);
        CHECK((serial - parallel).cwiseAbs().maxCoeff() < 1e-13);
      }
    }
  }
}

TEST_CASE("T matrices: parallel kernel matches serial and an explicit contraction") {
  Rng rng = make_rng(6);
  for (const HilbertDims dims : {HilbertDims(2, 2), HilbertDims(3, 2), HilbertDims(3, 4)}) {
    std::vector<CVector> phis;
    for (int j = 0; j < 3; ++j) phis.push_back(random_complex_gaussian(dims.total(), rng));
    const auto chis = chi_indices(dims);
    CHECK(chis.size() == static_cast<std::size_t>(dims.d1() * (dims.d1() - 1) / 2 *
                                                  dims.d2() * (dims.d2() - 1) / 2));
    const auto serial = kernels::build_T_serial(dims, chis, phis);
    const auto parallel = kernels::build_T_parallel(dims, chis, phis);
    REQUIRE(serial.size() == chis.size());
    REQUIRE(parallel.size() == chis.size());

    // Explicit |chi> = (|kl> - |lk>) (x) (|mn> - |nm>) in H1 H1 H2 H2 with
    // |phi_j> (x) |phi_k> laid out as phi_j(a, c) phi_k(b, e) at (a, b, c, e).
    const int d1 = dims.d1();
    const int d2 = dims.d2();
    const auto pos = [&](int a, int b, int c, int e) { return ((a * d1 + b) * d2 + c) * d2 + e; };
    const int big = d1 * d1 * d2 * d2;
    for (std::size_t alpha = 0; alpha < chis.size(); ++alpha) {
      const ChiIndex& x = chis[alpha];
      CVector chi = CVector::Zero(big);
      chi(pos(x.k, x.l, x.m, x.n)) += 1.0;
      chi(pos(x.k, x.l, x.n, x.m)) -= 1.0;
      chi(pos(x.l, x.k, x.m, x.n)) -= 1.0;
      chi(pos(x.l, x.k, x.n, x.m)) += 1.0;
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          CVector prod(big);
          for (int a = 0; a < d1; ++a)
            for (int b = 0; b < d1; ++b)
              for (int c = 0; c < d2; ++c)
                for (int e = 0; e < d2; ++e)
                  prod(pos(a, b, c, e)) =
                      phis[j](flat_index(a, c, dims)) * phis[k](flat_index(b, e, dims));
          const Complex ref = chi.dot(prod);
          CHECK(std::abs(serial[alpha](j, k) - ref) < 1e-12);
          CHECK(std::abs(parallel[alpha](j, k) - ref) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("T matrices are symmetric") {
  Rng rng = make_rng(7);
  const HilbertDims dims(3, 3);
  std::vector<CVector> phis;
  for (int j = 0; j < 4; ++j) phis.push_back(random_complex_gaussian(dims.total(), rng));
  for (const auto& t : kernels::build_T_parallel(dims, chi_indices(dims), phis)) {
    CHECK((t - t.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  }
}
