#include "qent/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "qent/concurrence.hpp"
#include "qent/errors.hpp"
#include "qent/lindblad.hpp"
#include "qent/random.hpp"

namespace qent {

namespace {

double unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Runs `metric` once per sample, each with its own stream, and reduces the
/// per-sample violations in sample order.
PropertyResult run_property(const std::string& name, double tolerance,
                            const PropertySuiteConfig& cfg, std::uint64_t stream,
                            const std::function<double(Rng&)>& metric) {
  const int n = std::max(cfg.samples, 0);
  std::vector<double> values(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    Rng rng = make_rng(cfg.seed ^ (stream * 0x9E3779B97F4A7C15ULL), static_cast<std::uint64_t>(i));
    double v;
    try {
      v = metric(rng);
    } catch (const std::exception&) {
      v = std::numeric_limits<double>::infinity();
    }
    values[static_cast<std::size_t>(i)] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
  PropertyResult r;
  r.name = name;
  r.samples = n;
  r.tolerance = tolerance;
  for (const double v : values) {
    r.worst = std::max(r.worst, v);
    if (v > tolerance) ++r.failures;
  }
  return r;
}

HilbertDims random_dims(Rng& rng, int lo, int hi) {
  return {uniform_int(rng, lo, hi), uniform_int(rng, lo, hi)};
}

EnvironmentModel random_model(Rng& rng) {
  const double gamma = 0.2 + 1.8 * unit(rng);
  switch (uniform_int(rng, 0, 3)) {
    case 0:
      return EnvironmentModel::dephasing(gamma);
    case 1:
      return EnvironmentModel::zero_temperature(gamma);
    case 2:
      return EnvironmentModel::thermal(gamma, unit(rng));
    default:
      return EnvironmentModel::infinite_temperature(gamma);
  }
}

DensityMatrix random_state(const HilbertDims& dims, int max_rank, Rng& rng) {
  const int rank = uniform_int(rng, 1, std::min(max_rank, dims.total()));
  return random_density_matrix(dims, rank, rng);
}

CMatrix local_unitary(const HilbertDims& dims, Rng& rng) {
  const CMatrix u1 = random_unitary(dims.d1(), rng);
  const CMatrix u2 = random_unitary(dims.d2(), rng);
  CMatrix u(dims.total(), dims.total());
  // Row-major |n m>: the first factor is the slow index.
  for (int n = 0; n < dims.d1(); ++n)
    for (int m = 0; m < dims.d2(); ++m)
      for (int n2 = 0; n2 < dims.d1(); ++n2)
        for (int m2 = 0; m2 < dims.d2(); ++m2)
          u(flat_index(n, m, dims), flat_index(n2, m2, dims)) = u1(n, n2) * u2(m, m2);
  return u;
}

std::optional<double> quasipure_value(const DensityMatrix& rho) {
  QuasiPureConfig cfg;
  cfg.min_leading = 0.0;
  try {
    const SpectralDecomposition spec = spectral(rho);
    if (spec.eigenvalues.size() > 1 && spec.eigenvalues(0) - spec.eigenvalues(1) < 1e-6) {
      return std::nullopt;
    }
    return quasipure_concurrence(spec, rho.dims(), cfg).value;
  } catch (const QuasiPureDegenerate&) {
    return std::nullopt;
  }
}

}  // namespace

PropertyResult check_propagation_invariants(const PropertySuiteConfig& cfg) {
  return run_property("density_matrix_invariants", 1e-9, cfg, 1, [](Rng& rng) {
    const HilbertDims dims = random_dims(rng, 2, 3);
    const DensityMatrix rho0 = random_state(dims, dims.total(), rng);
    const EnvironmentModel model = random_model(rng);
    const double t = 3.0 * unit(rng);
    const CMatrix rho = propagate(rho0, model, t).matrix();
    const double trace = std::abs(rho.trace() - 1.0);
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const double negativity = std::max(0.0, -eigenvalues_desc(rho).minCoeff());
    return std::max({trace, herm, negativity});
  });
}

PropertyResult check_estimator_ordering(const PropertySuiteConfig& cfg) {
  return run_property("estimator_ordering", 1e-6, cfg, 2, [](Rng& rng) {
    const HilbertDims dims = random_dims(rng, 2, 4);
    const DensityMatrix rho = random_state(dims, 4, rng);
    const SpectralDecomposition spec = spectral(rho);
    const TMatrixSet tset = build_T(spec.subnormalized, dims);

    LowerBoundConfig lcfg;
    lcfg.restarts = 4;
    lcfg.seed = rng();
    const double lower = optimize_lower_bound(tset, lcfg).estimate.value;
    const ZVector z = ZVector::normalized(random_complex_gaussian(
        static_cast<Eigen::Index>(tset.chis.size()), rng));
    const double fixed = lower_bound_fixed_z(tset, z).value;

    // Any decomposition bounds c from above, so a short search is enough.
    UpperBoundConfig ucfg;
    ucfg.restarts = 2;
    ucfg.max_sweeps = 200;
    ucfg.seed = rng();
    const double upper = upper_convex_roof(rho, ucfg).estimate.value;

    double violation = std::max({fixed - lower, lower - upper, 0.0});
    if (const auto qp = quasipure_value(rho)) violation = std::max(violation, *qp - upper);
    return violation;
  });
}

PropertyResult check_two_qubit_collapse(const PropertySuiteConfig& cfg) {
  return run_property("two_qubit_collapse", 1e-6, cfg, 3, [](Rng& rng) {
    const HilbertDims dims(2, 2);
    const DensityMatrix rho = random_state(dims, 4, rng);
    const SpectralDecomposition spec = spectral(rho);
    LowerBoundConfig lcfg;
    lcfg.restarts = 4;
    lcfg.seed = rng();
    const double lower = optimize_lower_bound(build_T(spec.subnormalized, dims), lcfg)
                             .estimate.value;
    return std::abs(lower - wootters(rho).value);
  });
}

PropertyResult check_pure_state_purity(const PropertySuiteConfig& cfg) {
  return run_property("pure_state_purity", 1e-10, cfg, 4, [](Rng& rng) {
    const HilbertDims dims = random_dims(rng, 2, 5);
    const PureState psi = random_pure_state(dims, rng);
    const CMatrix reduced = reduced_first(psi);
    const double purity = (reduced * reduced).trace().real();
    const double expected = std::sqrt(std::max(0.0, 2.0 * (1.0 - purity)));
    return std::abs(pure_concurrence(psi).value - expected);
  });
}

PropertyResult check_local_unitary_invariance(const PropertySuiteConfig& cfg) {
  return run_property("local_unitary_invariance", 1e-10, cfg, 5, [](Rng& rng) {
    const HilbertDims dims = random_dims(rng, 2, 4);
    const CMatrix u = local_unitary(dims, rng);

    const PureState psi = random_pure_state(dims, rng);
    const PureState rotated(dims, u * psi.amplitudes());
    double worst = std::abs(pure_concurrence(psi).value - pure_concurrence(rotated).value);

    const DensityMatrix rho = random_state(dims, 3, rng);
    const DensityMatrix rho_u(dims, hermitian_part(u * rho.matrix() * u.adjoint()));
    const auto qp = quasipure_value(rho);
    const auto qp_u = quasipure_value(rho_u);
    if (qp && qp_u) worst = std::max(worst, std::abs(*qp - *qp_u));

    const HilbertDims qubits(2, 2);
    const CMatrix uq = local_unitary(qubits, rng);
    const DensityMatrix sigma = random_state(qubits, 4, rng);
    const DensityMatrix sigma_u(qubits, hermitian_part(uq * sigma.matrix() * uq.adjoint()));
    worst = std::max(worst, std::abs(wootters(sigma).value - wootters(sigma_u).value));
    return worst;
  });
}

PropertyResult check_tensor_reconstruction(const PropertySuiteConfig& cfg) {
  return run_property("tensor_reconstruction", 1e-10, cfg, 6, [](Rng& rng) {
    const HilbertDims dims = random_dims(rng, 2, 3);
    const int rank = uniform_int(rng, 1, 3);
    std::vector<CVector> phis;
    for (int j = 0; j < rank; ++j) {
      phis.push_back(random_complex_gaussian(dims.total(), rng) * (0.2 + unit(rng)));
    }
    const TMatrixSet tset = build_T(phis, dims);

    // <phi_l phi_m| (1 - S_1)(1 - S_2) |phi_j phi_k>, S_i swapping the two
    // copies of subsystem i.
    const auto amp = [&](int j, int a, int c) { return phis[j](flat_index(a, c, dims)); };
    const auto direct = [&](int l, int m, int j, int k) {
      Complex acc = 0.0;
      for (int a = 0; a < dims.d1(); ++a)
        for (int b = 0; b < dims.d1(); ++b)
          for (int c = 0; c < dims.d2(); ++c)
            for (int e = 0; e < dims.d2(); ++e) {
              const Complex bra = std::conj(amp(l, a, c) * amp(m, b, e));
              const Complex ket = amp(j, a, c) * amp(k, b, e) - amp(j, a, e) * amp(k, b, c) -
                                  amp(j, b, c) * amp(k, a, e) + amp(j, b, e) * amp(k, a, c);
              acc += bra * ket;
            }
      return acc;
    };
    double diff = 0.0;
    double scale = 1.0;
    for (int l = 0; l < rank; ++l)
      for (int m = 0; m < rank; ++m)
        for (int j = 0; j < rank; ++j)
          for (int k = 0; k < rank; ++k) {
            const Complex ref = direct(l, m, j, k);
            scale = std::max(scale, std::abs(ref));
            diff = std::max(diff, std::abs(ref - tset.tensor_a(l, m, j, k)));
          }
    return diff / scale;
  });
}

std::vector<PropertyResult> run_property_suites(const PropertySuiteConfig& cfg) {
  return {check_propagation_invariants(cfg), check_estimator_ordering(cfg),
          check_two_qubit_collapse(cfg),     check_pure_state_purity(cfg),
          check_local_unitary_invariance(cfg), check_tensor_reconstruction(cfg)};
}

}  // namespace qent
