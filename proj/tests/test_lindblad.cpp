#include <doctest.h>

#include <cmath>
#include <vector>

#include "qent/errors.hpp"
#include "qent/lindblad.hpp"
#include "qent/random.hpp"

using namespace qent;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Single-site thermal state of the truncated oscillator: p_n ~ (nbar/(nbar+1))^n.
CMatrix thermal_site(int d, double nbar) {
  CMatrix s = CMatrix::Zero(d, d);
  const double r = nbar / (nbar + 1.0);
  double norm = 0.0;
  for (int n = 0; n < d; ++n) norm += std::pow(r, n);
  for (int n = 0; n < d; ++n) s(n, n) = std::pow(r, n) / norm;
  return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

TEST_CASE("ladder operators") {
  const CMatrix a = annihilation(4);
  const CMatrix ad = creation(4);
  CHECK(std::abs(a(0, 1) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(a(2, 3) - Complex(std::sqrt(3.0))) < 1e-15);
  CHECK(max_abs(ad * a - number_operator(4)) < 1e-14);
  // Truncation: a^dagger annihilates the top level.
  CHECK(ad.col(3).norm() < 1e-15);
}

TEST_CASE("jump operator sets per environment") {
  CHECK(local_jump_operators(EnvironmentModel::dephasing(1.0), 3).size() == 1);
  CHECK(local_jump_operators(EnvironmentModel::thermal(1.0, 0.3), 3).size() == 2);
  CHECK(local_jump_operators(EnvironmentModel::zero_temperature(1.0), 3).size() == 1);
  const auto inf = local_jump_operators(EnvironmentModel::infinite_temperature(0.7), 3);
  REQUIRE(inf.size() == 2);
  CHECK(inf[0].rate == doctest::Approx(0.7));
  CHECK(inf[1].rate == doctest::Approx(0.7));
  const auto th = local_jump_operators(EnvironmentModel::thermal(2.0, 0.25), 2);
  REQUIRE(th.size() == 2);
  CHECK(th[0].rate == doctest::Approx(2.5));
  CHECK(th[1].rate == doctest::Approx(0.5));
  CHECK_THROWS_AS(local_jump_operators(EnvironmentModel::dephasing(1.0, Ladder::QubitSigma), 3),
                  ConfigError);
  CHECK_THROWS_AS(EnvironmentModel::thermal(-1.0, 0.0).validate(), ConfigError);
}

TEST_CASE("generator is trace preserving and Hermiticity preserving") {
  Rng rng = make_rng(21);
  for (const auto& model :
       {EnvironmentModel::dephasing(1.0), EnvironmentModel::thermal(0.8, 0.6),
        EnvironmentModel::infinite_temperature(1.1)}) {
    const HilbertDims dims(3, 2);
    const Generator gen(dims, model);
    const CMatrix rho = random_density_matrix(dims, 4, rng).matrix();
    const CMatrix drho = gen.apply(rho);
    CHECK(std::abs(drho.trace()) < 1e-13);
    CHECK(max_abs(drho - drho.adjoint()) < 1e-13);
  }
}

TEST_CASE("superoperator agrees with the direct generator") {
  Rng rng = make_rng(22);
  const HilbertDims dims(2, 3);
  const Generator gen(dims, EnvironmentModel::thermal(1.0, 0.3));
  const CMatrix rho = random_density_matrix(dims, 3, rng).matrix();
  const CMatrix sup = gen.superoperator();
  const Eigen::Map<const CVector> vec(rho.data(), rho.size());
  const CVector out = sup * vec;
  const Eigen::Map<const CMatrix> back(out.data(), rho.rows(), rho.cols());
  CHECK(max_abs(back - gen.apply(rho)) < 1e-13);
}

TEST_CASE("thermal model at nbar = 0 reproduces the dedicated zero-temperature path") {
  Rng rng = make_rng(23);
  const HilbertDims dims(3, 3);
  const Generator thermal(dims, EnvironmentModel::thermal(1.4, 0.0));
  std::vector<LocalJump> jumps;
  for (const Site site : {Site::First, Site::Second}) {
    for (const auto& t : zero_temperature_jump_operators(1.4, 3)) {
      jumps.push_back({site, t.op, t.rate});
    }
  }
  const Generator zero(dims, jumps);
  const CMatrix rho = random_density_matrix(dims, 5, rng).matrix();
  CHECK(max_abs(thermal.apply(rho) - zero.apply(rho)) < 1e-15);
}

TEST_CASE("propagation at t = 0 returns the initial state") {
  Rng rng = make_rng(24);
  const DensityMatrix rho0 = random_density_matrix(HilbertDims(2, 2), 2, rng);
  const DensityMatrix rho = propagate(rho0, EnvironmentModel::thermal(1.0, 0.5), 0.0);
  CHECK(max_abs(rho.matrix() - rho0.matrix()) == 0.0);
}

TEST_CASE("dephasing keeps populations and damps coherences") {
  const HilbertDims dims(3, 3);
  const PureState psi = two_term_state(0.6, 0.8, 0, 2, 2, 0, dims);
  const DensityMatrix rho0 = DensityMatrix::from_pure(psi);
  const double t = 0.37;
  const DensityMatrix rho = propagate(rho0, EnvironmentModel::dephasing(1.0), t);
  const int i = flat_index(0, 2, dims);
  const int j = flat_index(2, 0, dims);
  CHECK(rho(i, i).real() == doctest::Approx(0.36).epsilon(1e-10));
  CHECK(rho(j, j).real() == doctest::Approx(0.64).epsilon(1e-10));
  // (Gamma/2) [(0-2)^2 + (2-0)^2] = 4 Gamma
  CHECK(std::abs(rho(i, j)) == doctest::Approx(0.48 * std::exp(-4.0 * t)).epsilon(1e-9));
}

TEST_CASE("fixed points") {
  const HilbertDims dims(3, 3);
  CMatrix ground = CMatrix::Zero(9, 9);
  ground(0, 0) = 1.0;
  const DensityMatrix g(dims, ground);
  CHECK(max_abs(propagate(g, EnvironmentModel::zero_temperature(1.0), 2.0).matrix() - ground) <
        1e-12);

  CMatrix diag = CMatrix::Zero(9, 9);
  diag(1, 1) = 0.3;
  diag(5, 5) = 0.7;
  const DensityMatrix dm(dims, diag);
  CHECK(max_abs(propagate(dm, EnvironmentModel::dephasing(1.0), 2.0).matrix() - diag) < 1e-12);
}

TEST_CASE("thermal bath relaxes to the product Gibbs state") {
  for (const int d : {2, 3}) {
    const HilbertDims dims(d, d);
    const double nbar = 0.4;
    const DensityMatrix rho0 = DensityMatrix::from_pure(bell_state(BellKind::PsiPlus, dims));
    const DensityMatrix rho = propagate(rho0, EnvironmentModel::thermal(1.0, nbar), 20.0);
    const CMatrix expected = kron(thermal_site(d, nbar), thermal_site(d, nbar));
    CHECK(max_abs(rho.matrix() - expected) < 1e-7);
  }
}

TEST_CASE("large nbar approaches the infinite-temperature channel") {
  const HilbertDims dims(2, 2);
  const DensityMatrix rho0 = DensityMatrix::from_pure(bell_state(BellKind::PhiPlus));
  const double gamma_tilde = 1.0;
  const double nbar = 50.0;
  const double t = 0.5;
  const DensityMatrix hot =
      propagate(rho0, EnvironmentModel::thermal(gamma_tilde / nbar, nbar), t);
  const DensityMatrix inf =
      propagate(rho0, EnvironmentModel::infinite_temperature(gamma_tilde), t);
  CHECK(max_abs(hot.matrix() - inf.matrix()) <= 2e-2);
}

TEST_CASE("RK4 converges at fourth order against the matrix exponential") {
  const HilbertDims dims(2, 3);
  Rng rng = make_rng(25);
  const DensityMatrix rho0 = random_density_matrix(dims, 3, rng);
  const EnvironmentModel model = EnvironmentModel::thermal(2.0, 0.5);
  const double t = 1.0;
  IntegratorConfig exact;
  exact.method = IntegratorMethod::MatrixExponential;
  const CMatrix ref = propagate(rho0, model, t, exact).matrix();

  IntegratorConfig coarse;
  coarse.method = IntegratorMethod::Rk4Fixed;
  coarse.fixed_step = 0.05;
  IntegratorConfig fine = coarse;
  fine.fixed_step = 0.025;
  const double e1 = max_abs(propagate(rho0, model, t, coarse).matrix() - ref);
  const double e2 = max_abs(propagate(rho0, model, t, fine).matrix() - ref);
  CHECK(e1 / e2 >= 8.0);

  const double adaptive = max_abs(propagate(rho0, model, t).matrix() - ref);
  CHECK(adaptive < 1e-8);
}

TEST_CASE("matrix exponential backend has a size limit") {
  const HilbertDims dims(5, 5);
  const DensityMatrix rho0 = DensityMatrix::maximally_mixed(dims);
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::MatrixExponential;
  CHECK_THROWS(propagate(rho0, EnvironmentModel::dephasing(1.0), 0.1, cfg));
}

TEST_CASE("trajectory grid must start at zero and increase") {
  const DensityMatrix rho0 = DensityMatrix::from_pure(bell_state(BellKind::PsiPlus));
  const auto model = EnvironmentModel::dephasing(1.0);
  CHECK_THROWS_AS(evolve_trajectory(rho0, model, {0.1, 0.2}), DomainError);
  CHECK_THROWS_AS(evolve_trajectory(rho0, model, {0.0, 0.2, 0.2}), DomainError);
  const Trajectory traj = evolve_trajectory(rho0, model, {0.0, 0.5, 1.0});
  REQUIRE(traj.states.size() == 3);
  const DensityMatrix direct = propagate(rho0, model, 1.0);
  CHECK(max_abs(traj.states[2].matrix() - direct.matrix()) < 1e-9);
}

TEST_CASE("propagator refuses to run backwards") {
  const DensityMatrix rho0 = DensityMatrix::from_pure(bell_state(BellKind::PsiPlus));
  Propagator prop(Generator(HilbertDims(2, 2), EnvironmentModel::dephasing(1.0)), rho0, {});
  (void)prop.advance_to(0.5);
  CHECK_THROWS_AS(prop.advance_to(0.25), DomainError);
}
