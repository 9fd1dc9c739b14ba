#include "qent/concurrence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qent/kernels.hpp"
#include "qent/random.hpp"

namespace qent {

namespace {

constexpr double kSingularValueFloor = 1e-13;

double bound_of(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return singular_value_bound(svd.singularValues());
}

// Flat indices (km, ln, kn, lm) of every 2x2 minor entering the pure-state
// concurrence.
class MinorTable {
 public:
  explicit MinorTable(const HilbertDims& dims) {
    for (const auto& chi : chi_indices(dims)) {
      const auto [km, ln] = copy_space_map(chi.k, chi.l, chi.m, chi.n, dims);
      const auto [kn, lm] = copy_space_map(chi.k, chi.l, chi.n, chi.m, dims);
      entries_.push_back({km, ln, kn, lm});
    }
  }

  double concurrence(const Complex* phi) const {
    double sum = 0.0;
    for (const auto& e : entries_) {
      sum += std::norm(phi[e[0]] * phi[e[1]] - phi[e[2]] * phi[e[3]]);
    }
    return 2.0 * std::sqrt(sum);
  }

 private:
  std::vector<std::array<int, 4>> entries_;
};

}  // namespace

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::ExactWootters: return "wootters";
    case Estimator::PureExact: return "pure";
    case Estimator::LowerFixedZ: return "lower_fixed_z";
    case Estimator::LowerOptimized: return "lower_optimized";
    case Estimator::QuasiPure: return "quasipure";
    case Estimator::UpperConvexRoof: return "upper";
  }
  return "unknown";
}

double max_concurrence(const HilbertDims& dims) {
  const double d = dims.min_local();
  return std::sqrt(2.0 * (d - 1.0) / d);
}

double singular_value_bound(const RVector& singular_values) {
  if (singular_values.size() == 0) return 0.0;
  std::vector<double> s(singular_values.data(),
                        singular_values.data() + singular_values.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double value = s.front() < kSingularValueFloor ? 0.0 : s.front();
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] >= kSingularValueFloor) value -= s[i];
  }
  return std::max(value, 0.0);
}

std::vector<ChiIndex> chi_indices(const HilbertDims& dims) {
  std::vector<ChiIndex> out;
  out.reserve(static_cast<std::size_t>(dims.d1() * (dims.d1() - 1) / 2) *
              static_cast<std::size_t>(dims.d2() * (dims.d2() - 1) / 2));
  for (int k = 0; k < dims.d1(); ++k) {
    for (int l = k + 1; l < dims.d1(); ++l) {
      for (int m = 0; m < dims.d2(); ++m) {
        for (int n = m + 1; n < dims.d2(); ++n) out.push_back({k, l, m, n});
      }
    }
  }
  return out;
}

double wootters_functional(const CMatrix& rho4) {
  if (rho4.rows() != 4 || rho4.cols() != 4) {
    throw DomainError("Wootters concurrence needs a 4x4 matrix");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(rho4));
  if (solver.info() != Eigen::Success) throw NumericError("Wootters: eigensolver failed");
  const RVector& mu = solver.eigenvalues();
  if (mu.minCoeff() < -1e-9) {
    throw NumericError("Wootters: matrix has eigenvalue " + std::to_string(mu.minCoeff()));
  }
  CMatrix x = solver.eigenvectors();
  for (int i = 0; i < 4; ++i) x.col(i) *= std::sqrt(std::max(mu(i), 0.0));
  // sigma_y (x) sigma_y in the computational basis.
  Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const CMatrix tau = x.transpose() * flip * x;
  Eigen::JacobiSVD<CMatrix> svd(tau);
  return singular_value_bound(svd.singularValues());
}

ConcurrenceEstimate wootters(const DensityMatrix& rho) {
  if (rho.dims().d1() != 2 || rho.dims().d2() != 2) {
    throw DomainError("Wootters concurrence is defined for two qubits only");
  }
  return {wootters_functional(rho.matrix()), Estimator::ExactWootters, 0, true, true};
}

double pure_concurrence_value(const CVector& phi, const HilbertDims& dims) {
  if (phi.size() != dims.total()) throw DomainError("vector length does not match dims");
  return MinorTable(dims).concurrence(phi.data());
}

ConcurrenceEstimate pure_concurrence(const PureState& psi) {
  return {pure_concurrence_value(psi.amplitudes(), psi.dims()), Estimator::PureExact, 0,
          true, true};
}

Complex TMatrixSet::tensor_a(int l, int m, int j, int k) const {
  Complex acc = 0.0;
  for (const auto& t : mats) acc += std::conj(t(l, m)) * t(j, k);
  return acc;
}

TMatrixSet build_T(std::span<const CVector> decomposition, const HilbertDims& dims) {
  TMatrixSet out{dims, chi_indices(dims), {}};
  out.mats = kernels::build_T_parallel(dims, out.chis, decomposition);
  return out;
}

ZVector::ZVector(CVector z) : z_(std::move(z)) {
  if (std::abs(z_.squaredNorm() - 1.0) > 1e-12) {
    throw ValidationError("Z vector must satisfy sum |z|^2 = 1");
  }
}

ZVector ZVector::normalized(const CVector& w) {
  const double n = w.norm();
  if (!(n > 0.0)) throw ValidationError("cannot normalize a zero Z vector");
  return ZVector(w / n);
}

ZVector ZVector::unit(Eigen::Index alpha, Eigen::Index count) {
  if (alpha < 0 || alpha >= count) throw DomainError("Z unit index out of range");
  CVector z = CVector::Zero(count);
  z(alpha) = 1.0;
  return ZVector(std::move(z));
}

ConcurrenceEstimate lower_bound_fixed_z(const TMatrixSet& tset, const ZVector& z) {
  if (static_cast<std::size_t>(z.size()) != tset.mats.size()) {
    throw DomainError("Z vector length does not match number of T matrices");
  }
  const Eigen::Index r = tset.rank();
  CMatrix tcal = CMatrix::Zero(r, r);
  for (std::size_t a = 0; a < tset.mats.size(); ++a) {
    tcal += z.values()(static_cast<Eigen::Index>(a)) * tset.mats[a];
  }
  return {bound_of(tcal), Estimator::LowerFixedZ, 0, true, true};
}

namespace {

struct SearchOutcome {
  double value = 0.0;
  CVector w;
  int sweeps = 0;
  bool converged = false;
};

SearchOutcome refine_z(const TMatrixSet& tset, CVector w, const LowerBoundConfig& cfg) {
  w.normalize();
  const Eigen::Index r = tset.rank();
  const auto count = static_cast<Eigen::Index>(tset.mats.size());
  CMatrix tcal = CMatrix::Zero(r, r);
  for (Eigen::Index a = 0; a < count; ++a) tcal += w(a) * tset.mats[a];
  double f = bound_of(tcal);

  static const std::array<Complex, 4> kDirections = {
      Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)};
  SearchOutcome out;
  double step = cfg.initial_step;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    out.sweeps = sweep + 1;
    double gain = 0.0;
    for (Eigen::Index a = 0; a < count; ++a) {
      double best = f;
      Complex best_delta = 0.0;
      double best_norm = 1.0;
      for (const Complex dir : kDirections) {
        const Complex delta = step * dir;
        const double norm2 =
            1.0 + 2.0 * std::real(std::conj(w(a)) * delta) + std::norm(delta);
        if (norm2 <= 1e-24) continue;
        const double norm = std::sqrt(norm2);
        const double value = bound_of(tcal + delta * tset.mats[a]) / norm;
        if (value > best) {
          best = value;
          best_delta = delta;
          best_norm = norm;
        }
      }
      if (best > f) {
        w(a) += best_delta;
        w /= best_norm;
        tcal = (tcal + best_delta * tset.mats[a]) / best_norm;
        gain += best - f;
        f = best;
      }
    }
    if (gain < cfg.tol) {
      if (step <= cfg.min_step) {
        out.converged = true;
        break;
      }
      step *= 0.5;
    }
  }
  // Re-evaluate from scratch to shed accumulated round-off in tcal.
  w.normalize();
  tcal.setZero();
  for (Eigen::Index a = 0; a < count; ++a) tcal += w(a) * tset.mats[a];
  out.value = bound_of(tcal);
  out.w = std::move(w);
  return out;
}

}  // namespace

LowerBoundResult optimize_lower_bound(const TMatrixSet& tset, const LowerBoundConfig& cfg,
                                      std::span<const ZVector> warm_starts) {
  const auto count = static_cast<Eigen::Index>(tset.mats.size());
  if (count == 0) throw DomainError("empty T-matrix set");

  // Every single T^alpha is already a bound; the best one seeds the search.
  Eigen::Index best_alpha = 0;
  double best_single = -1.0;
  for (Eigen::Index a = 0; a < count; ++a) {
    const double v = bound_of(tset.mats[a]);
    if (v > best_single) {
      best_single = v;
      best_alpha = a;
    }
  }

  std::vector<CVector> starts;
  starts.push_back(ZVector::unit(best_alpha, count).values());
  for (const auto& z : warm_starts) {
    if (z.size() == count) starts.push_back(z.values());
  }
  const std::size_t fixed_starts = starts.size();
  starts.resize(fixed_starts + static_cast<std::size_t>(std::max(cfg.restarts, 0)));
  for (std::size_t i = fixed_starts; i < starts.size(); ++i) {
    Rng rng = make_rng(cfg.seed, i);
    starts[i] = random_complex_gaussian(count, rng);
    starts[i].normalize();
  }

  std::vector<SearchOutcome> outcomes(starts.size());
  const auto n_starts = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n_starts; ++i) {
    outcomes[i] = refine_z(tset, starts[i], cfg);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    if (outcomes[i].value > outcomes[best].value) best = i;
  }
  ConcurrenceEstimate est{outcomes[best].value, Estimator::LowerOptimized,
                          outcomes[best].sweeps, outcomes[best].converged, true};
  if (est.value < best_single) {
    // Never report less than the algebraic single-alpha bound.
    est.value = best_single;
    return {est, ZVector::unit(best_alpha, count)};
  }
  return {est, ZVector::normalized(outcomes[best].w)};
}

CMatrix quasipure_T(const SpectralDecomposition& spec, const HilbertDims& dims,
                    double degenerate_tol) {
  if (spec.subnormalized.empty()) throw QuasiPureDegenerate("empty spectral decomposition");
  const TMatrixSet tset = build_T(spec.subnormalized, dims);
  const Eigen::Index r = tset.rank();
  CMatrix a11 = CMatrix::Zero(r, r);
  for (const auto& t : tset.mats) a11 += std::conj(t(0, 0)) * t;
  const double lead = a11(0, 0).real();
  if (!(lead > degenerate_tol)) {
    throw QuasiPureDegenerate("quasi-pure: A^11_11 = " + std::to_string(lead) +
                              " (leading eigenvector nearly separable)");
  }
  return a11 / std::sqrt(lead);
}

CMatrix quasipure_T(const DensityMatrix& rho) {
  return quasipure_T(spectral(rho), rho.dims());
}

ConcurrenceEstimate quasipure_concurrence(const SpectralDecomposition& spec,
                                          const HilbertDims& dims,
                                          const QuasiPureConfig& cfg) {
  const CMatrix tqp = quasipure_T(spec, dims, cfg.degenerate_tol);
  ConcurrenceEstimate est{bound_of(tqp), Estimator::QuasiPure, 0, true, true};
  const double mu1 = spec.eigenvalues(0);
  const double mu2 = spec.eigenvalues.size() > 1 ? spec.eigenvalues(1) : 0.0;
  est.valid = (mu1 - mu2 >= cfg.min_gap) && (mu1 >= cfg.min_leading);
  return est;
}

ConcurrenceEstimate quasipure_concurrence(const DensityMatrix& rho,
                                          const QuasiPureConfig& cfg) {
  return quasipure_concurrence(spectral(rho), rho.dims(), cfg);
}

double ensemble_concurrence(const CMatrix& ensemble, const HilbertDims& dims) {
  if (ensemble.rows() != dims.total()) throw DomainError("ensemble row count != N");
  const MinorTable table(dims);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < ensemble.cols(); ++j) {
    sum += table.concurrence(ensemble.col(j).data());
  }
  return sum;
}

namespace {

struct RoofOutcome {
  double value = 0.0;
  CMatrix ensemble;
  int sweeps = 0;
  bool converged = false;
};

// Closest isometry (polar factor) to w.
CMatrix polar_isometry(const CMatrix& w) {
  Eigen::JacobiSVD<CMatrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

RoofOutcome refine_roof(const CMatrix& basis, const CMatrix& isometry,
                        const MinorTable& table, const UpperBoundConfig& cfg) {
  CMatrix phi = basis * isometry.transpose();  // N x K
  const Eigen::Index members = phi.cols();
  std::vector<double> conc(static_cast<std::size_t>(members));
  for (Eigen::Index j = 0; j < members; ++j) conc[j] = table.concurrence(phi.col(j).data());

  RoofOutcome out;
  double step = cfg.initial_step;
  CVector va(phi.rows());
  CVector vb(phi.rows());
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    out.sweeps = sweep + 1;
    double gain = 0.0;
    for (Eigen::Index a = 0; a < members; ++a) {
      for (Eigen::Index b = a + 1; b < members; ++b) {
        const double current = conc[a] + conc[b];
        double best = current;
        Complex best_phase = 0.0;
        double best_ca = 0.0;
        double best_cb = 0.0;
        const double cs = std::cos(step);
        const double sn = std::sin(step);
        for (int q = 0; q < 4; ++q) {
          const Complex phase = std::polar(1.0, q * std::numbers::pi / 2.0);
          va = cs * phi.col(a) - (phase * sn) * phi.col(b);
          vb = (std::conj(phase) * sn) * phi.col(a) + cs * phi.col(b);
          const double ca = table.concurrence(va.data());
          const double cb = table.concurrence(vb.data());
          if (ca + cb < best) {
            best = ca + cb;
            best_phase = phase;
            best_ca = ca;
            best_cb = cb;
          }
        }
        if (best >= current) continue;
        // Keep rotating along the accepted direction while it pays off.
        for (int rep = 0; rep < 32; ++rep) {
          va = cs * phi.col(a) - (best_phase * sn) * phi.col(b);
          vb = (std::conj(best_phase) * sn) * phi.col(a) + cs * phi.col(b);
          phi.col(a) = va;
          phi.col(b) = vb;
          gain += conc[a] + conc[b] - (best_ca + best_cb);
          conc[a] = best_ca;
          conc[b] = best_cb;
          va = cs * phi.col(a) - (best_phase * sn) * phi.col(b);
          vb = (std::conj(best_phase) * sn) * phi.col(a) + cs * phi.col(b);
          best_ca = table.concurrence(va.data());
          best_cb = table.concurrence(vb.data());
          if (best_ca + best_cb >= conc[a] + conc[b]) break;
        }
      }
    }
    if (gain < cfg.tol) {
      if (step <= cfg.min_step) {
        out.converged = true;
        break;
      }
      step *= 0.5;
    }
  }
  out.value = 0.0;
  for (Eigen::Index j = 0; j < members; ++j) out.value += table.concurrence(phi.col(j).data());
  out.ensemble = std::move(phi);
  return out;
}

}  // namespace

UpperBoundResult upper_convex_roof(const DensityMatrix& rho, const UpperBoundConfig& cfg,
                                   const CMatrix* warm_ensemble) {
  const HilbertDims& dims = rho.dims();
  const SpectralDecomposition spec = spectral(rho);
  const auto rank = static_cast<Eigen::Index>(spec.subnormalized.size());
  if (rank == 0) throw NumericError("upper bound: density matrix has no spectrum above cutoff");
  const Eigen::Index members = rank + std::max(cfg.extra_members, 0);

  CMatrix basis(dims.total(), rank);
  for (Eigen::Index i = 0; i < rank; ++i) basis.col(i) = spec.subnormalized[i];

  std::vector<CMatrix> starts;
  starts.push_back(CMatrix::Identity(members, rank));
  if (warm_ensemble != nullptr && warm_ensemble->rows() == dims.total()) {
    // Coefficients of the guess in the eigenbasis, then the nearest isometry.
    RVector inv_mu = spec.eigenvalues.cwiseInverse();
    CMatrix coeff = (inv_mu.asDiagonal() * (basis.adjoint() * *warm_ensemble)).transpose();
    CMatrix w = CMatrix::Zero(members, rank);
    const Eigen::Index rows = std::min<Eigen::Index>(members, coeff.rows());
    // Keep the heaviest members when the guess has more than we need.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(coeff.rows()));
    for (Eigen::Index i = 0; i < coeff.rows(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return coeff.row(x).squaredNorm() > coeff.row(y).squaredNorm();
    });
    for (Eigen::Index i = 0; i < rows; ++i) w.row(i) = coeff.row(order[i]);
    if (w.norm() > 0.0) starts.push_back(polar_isometry(w));
  }
  const int random_starts = std::max(cfg.restarts - 1, 0);
  for (int i = 0; i < random_starts; ++i) {
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(i));
    starts.push_back(random_unitary(members, rng).leftCols(rank));
  }

  const MinorTable table(dims);
  std::vector<RoofOutcome> outcomes(starts.size());
  const auto n_starts = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n_starts; ++i) {
    outcomes[i] = refine_roof(basis, starts[i], table, cfg);
  }

  std::size_t best = 0;
  int converged = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].converged) ++converged;
    if (outcomes[i].value < outcomes[best].value) best = i;
  }
  UpperBoundResult res;
  res.estimate = {outcomes[best].value, Estimator::UpperConvexRoof, outcomes[best].sweeps,
                  outcomes[best].converged, true};
  res.ensemble = std::move(outcomes[best].ensemble);
  res.restarts_run = static_cast<int>(outcomes.size());
  res.restarts_converged = converged;
  return res;
}

CMatrix two_qubit_block(const DensityMatrix& rho, int m) {
  const HilbertDims& dims = rho.dims();
  if (m < 1 || m >= dims.min_local()) {
    throw DomainError("two-qubit block level m = " + std::to_string(m) + " out of range");
  }
  const std::array<int, 2> levels = {0, m};
  std::array<int, 4> idx{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) idx[2 * i + j] = flat_index(levels[i], levels[j], dims);
  }
  CMatrix xi(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) xi(r, c) = rho(idx[r], idx[c]);
  }
  return xi;
}

}  // namespace qent
