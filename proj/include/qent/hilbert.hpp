#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qent {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Local dimensions of a bipartite space H1 (x) H2.
class HilbertDims {
 public:
  HilbertDims(int d1, int d2);

  int d1() const { return d1_; }
  int d2() const { return d2_; }
  int total() const { return d1_ * d2_; }
  int min_local() const { return d1_ < d2_ ? d1_ : d2_; }

  friend bool operator==(const HilbertDims&, const HilbertDims&) = default;

 private:
  int d1_;
  int d2_;
};

/// Row-major position of |n m> in H1 (x) H2. Every consumer goes through here.
int flat_index(int n, int m, const HilbertDims& dims);

/// Maps |i_k i_l> (x) |j_m j_n> in H1 H1 H2 H2 onto the pair of flat indices
/// (k m), (l n) of |phi> (x) |phi'> in (H1 H2) (H1 H2).
std::pair<int, int> copy_space_map(int k, int l, int m, int n,
                                   const HilbertDims& dims);

/// Normalized amplitude vector psi_{nm}.
class PureState {
 public:
  PureState(HilbertDims dims, CVector amp);

  const HilbertDims& dims() const { return dims_; }
  const CVector& amplitudes() const { return amp_; }
  Complex operator()(int n, int m) const { return amp_(flat_index(n, m, dims_)); }

 private:
  HilbertDims dims_;
  CVector amp_;
};

/// Hermitian, unit-trace, numerically positive matrix on H1 (x) H2.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-8;

  /// Validates all invariants; throws ValidationError otherwise.
  DensityMatrix(HilbertDims dims, CMatrix mat);

  static DensityMatrix from_pure(const PureState& psi);
  /// Sum_i |phi_i><phi_i| over subnormalized vectors.
  static DensityMatrix from_decomposition(HilbertDims dims,
                                          const std::vector<CVector>& phis);
  static DensityMatrix maximally_mixed(HilbertDims dims);

  /// Symmetrizes `mat` and checks trace and positivity against `tol` instead
  /// of the default tolerances. Used for integrator output; a violation
  /// throws IntegrityError.
  static DensityMatrix from_integrator(HilbertDims dims, const CMatrix& mat,
                                       double tol);

  const HilbertDims& dims() const { return dims_; }
  const CMatrix& matrix() const { return mat_; }
  Complex operator()(int row, int col) const { return mat_(row, col); }

 private:
  struct Unchecked {};
  DensityMatrix(HilbertDims dims, CMatrix mat, Unchecked)
      : dims_(dims), mat_(std::move(mat)) {}

  HilbertDims dims_;
  CMatrix mat_;
};

struct SpectralDecomposition {
  RVector eigenvalues;                // decreasing
  std::vector<PureState> eigenstates;
  std::vector<CVector> subnormalized;  // sqrt(mu_i) * Psi_i
};

inline constexpr double kDefaultSpectralCutoff = 1e-12;

/// Eigenpairs of rho with eigenvalue above `cutoff`, sorted decreasing.
/// The input is symmetrized first; a warning is logged when the anti-Hermitian
/// part exceeds 1e-10.
SpectralDecomposition spectral(const DensityMatrix& rho,
                               double cutoff = kDefaultSpectralCutoff);

/// All eigenvalues (decreasing) of the symmetrized matrix, no cutoff.
RVector eigenvalues_desc(const CMatrix& mat);

/// a|m1 m2> + b|n1 n2>.
PureState two_term_state(Complex a, Complex b, int m1, int m2, int n1, int n2,
                         const HilbertDims& dims);

enum class BellKind { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

/// Bell state on two qubits, or on levels {0,1} of larger local spaces.
PureState bell_state(BellKind kind, const HilbertDims& dims = HilbertDims(2, 2));

/// Partial trace over H2.
CMatrix reduced_first(const PureState& psi);

/// (rho + rho^dagger) / 2.
CMatrix hermitian_part(const CMatrix& mat);

}  // namespace qent
