#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qent/antisymmetric.hpp"
#include "qent/errors.hpp"
#include "qent/hilbert.hpp"

namespace qent {

enum class Estimator {
  ExactWootters,
  PureExact,
  LowerFixedZ,
  LowerOptimized,
  QuasiPure,
  UpperConvexRoof,
};

std::string to_string(Estimator e);

struct ConcurrenceEstimate {
  double value = 0.0;
  Estimator estimator = Estimator::PureExact;
  int iterations = 0;
  bool converged = true;
  // Quasi-pure only: false once the leading eigenvalue stops dominating.
  bool valid = true;
};

/// sqrt(2(d-1)/d), d = min(d1, d2): concurrence of a maximally entangled state.
double max_concurrence(const HilbertDims& dims);

/// max{s_1 - sum_{i>1} s_i, 0} over singular values sorted decreasing.
/// Values below 1e-13 count as zero.
double singular_value_bound(const RVector& singular_values);

/// Wootters' closed form for a 4x4 matrix, which may be subnormalized.
/// The lambda_i are obtained as singular values of X^T (sy (x) sy) X with
/// rho = X X^+, which equal the square roots of the eigenvalues of
/// rho (sy (x) sy) rho^* (sy (x) sy).
double wootters_functional(const CMatrix& rho4);
ConcurrenceEstimate wootters(const DensityMatrix& rho);

/// c = 2 sqrt(sum_{k<l,m<n} |phi_km phi_ln - phi_kn phi_lm|^2); accepts
/// subnormalized vectors (then returns p * c(Psi)).
double pure_concurrence_value(const CVector& phi, const HilbertDims& dims);
ConcurrenceEstimate pure_concurrence(const PureState& psi);

/// The family {T^alpha} for a decomposition rho = sum_j |phi_j><phi_j|.
struct TMatrixSet {
  HilbertDims dims;
  std::vector<ChiIndex> chis;
  std::vector<CMatrix> mats;

  Eigen::Index rank() const { return mats.empty() ? 0 : mats.front().rows(); }
  /// A^{lm}_{jk} = sum_alpha conj(T^alpha_lm) T^alpha_jk.
  Complex tensor_a(int l, int m, int j, int k) const;
};

TMatrixSet build_T(std::span<const CVector> decomposition, const HilbertDims& dims);

/// Complex unit vector over the chi indices.
class ZVector {
 public:
  explicit ZVector(CVector z);
  static ZVector normalized(const CVector& w);
  static ZVector unit(Eigen::Index alpha, Eigen::Index count);

  const CVector& values() const { return z_; }
  Eigen::Index size() const { return z_.size(); }

 private:
  CVector z_;
};

/// Singular-value bound of sum_alpha Z_alpha T^alpha.
ConcurrenceEstimate lower_bound_fixed_z(const TMatrixSet& tset, const ZVector& z);

struct LowerBoundConfig {
  int restarts = 50;
  int max_sweeps = 400;
  double tol = 1e-10;
  double initial_step = 0.5;
  double min_step = 1e-6;
  std::uint64_t seed = 20061;
};

struct LowerBoundResult {
  ConcurrenceEstimate estimate;
  ZVector z;
};

/// Multi-start coordinate search over the unit sphere. Starts: the best single
/// T^alpha, any warm starts, then `restarts` random complex-Gaussian points.
LowerBoundResult optimize_lower_bound(const TMatrixSet& tset,
                                      const LowerBoundConfig& cfg = {},
                                      std::span<const ZVector> warm_starts = {});

/// Raised when A^{11}_{11} vanishes (leading eigenvector nearly separable).
class QuasiPureDegenerate : public NumericError {
 public:
  using NumericError::NumericError;
};

struct QuasiPureConfig {
  double min_gap = 1e-9;       // mu_1 - mu_2 below this: invalid
  double min_leading = 0.5;    // mu_1 below this: invalid
  double degenerate_tol = 1e-14;
};

/// T^qp_{jk} = A^{11}_{jk} / sqrt(A^{11}_{11}) from the spectral decomposition.
CMatrix quasipure_T(const DensityMatrix& rho);
CMatrix quasipure_T(const SpectralDecomposition& spec, const HilbertDims& dims,
                    double degenerate_tol = 1e-14);

ConcurrenceEstimate quasipure_concurrence(const DensityMatrix& rho,
                                          const QuasiPureConfig& cfg = {});
ConcurrenceEstimate quasipure_concurrence(const SpectralDecomposition& spec,
                                          const HilbertDims& dims,
                                          const QuasiPureConfig& cfg = {});

struct UpperBoundConfig {
  int extra_members = 2;   // ensemble size = rank + extra_members
  int restarts = 20;
  int max_sweeps = 2000;
  double tol = 1e-10;
  double initial_step = 0.3;
  double min_step = 1e-7;
  std::uint64_t seed = 7919;
};

struct UpperBoundResult {
  ConcurrenceEstimate estimate;
  /// Optimal ensemble as columns phi_j (subnormalized), usable as a warm start.
  CMatrix ensemble;
  int restarts_run = 0;
  int restarts_converged = 0;
};

/// Average concurrence of the best decomposition found. Decompositions are
/// phi_j = sum_i V_ji psi_i over an isometry V, refined by pairwise unitary
/// rotations of ensemble members, so every iterate decomposes rho exactly.
UpperBoundResult upper_convex_roof(const DensityMatrix& rho,
                                   const UpperBoundConfig& cfg = {},
                                   const CMatrix* warm_ensemble = nullptr);

/// Average concurrence of an explicit ensemble (columns).
double ensemble_concurrence(const CMatrix& ensemble, const HilbertDims& dims);

/// xi restricted to levels {0, m} on both sides, as a (subnormalized) 4x4
/// matrix in the order |00>, |0m>, |m0>, |mm>.
CMatrix two_qubit_block(const DensityMatrix& rho, int m);

}  // namespace qent
