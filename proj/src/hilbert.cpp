#include "qent/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "qent/errors.hpp"

namespace qent {

namespace {

constexpr double kNormTol = 1e-12;

void check_range(int value, int bound, const char* what) {
  if (value < 0 || value >= bound) {
    throw DomainError(std::string(what) + " index " + std::to_string(value) +
                      " outside [0, " + std::to_string(bound) + ")");
  }
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

HilbertDims::HilbertDims(int d1, int d2) : d1_(d1), d2_(d2) {
  if (d1 < 2 || d2 < 2) {
    throw DomainError("local dimensions must be >= 2, got " +
                      std::to_string(d1) + "x" + std::to_string(d2));
  }
}

int flat_index(int n, int m, const HilbertDims& dims) {
  check_range(n, dims.d1(), "H1");
  check_range(m, dims.d2(), "H2");
  return n * dims.d2() + m;
}

std::pair<int, int> copy_space_map(int k, int l, int m, int n,
                                   const HilbertDims& dims) {
  return {flat_index(k, m, dims), flat_index(l, n, dims)};
}

PureState::PureState(HilbertDims dims, CVector amp)
    : dims_(dims), amp_(std::move(amp)) {
  if (amp_.size() != dims_.total()) {
    throw DomainError("amplitude vector length " + std::to_string(amp_.size()) +
                      " does not match N = " + std::to_string(dims_.total()));
  }
  const double norm2 = amp_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTol) {
    throw ValidationError("pure state not normalized: |psi|^2 = " +
                          std::to_string(norm2));
  }
}

DensityMatrix::DensityMatrix(HilbertDims dims, CMatrix mat)
    : dims_(dims), mat_(std::move(mat)) {
  const int n = dims_.total();
  if (mat_.rows() != n || mat_.cols() != n) {
    throw DomainError("density matrix shape does not match N = " +
                      std::to_string(n));
  }
  const double asym = max_abs(mat_ - mat_.adjoint());
  if (asym > kHermitianTol) {
    throw ValidationError("density matrix not Hermitian (max |rho - rho^+| = " +
                          std::to_string(asym) + ")");
  }
  const Complex tr = mat_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw ValidationError("density matrix trace " + std::to_string(tr.real()) +
                          " != 1");
  }
  const RVector ev = eigenvalues_desc(mat_);
  if (ev(ev.size() - 1) < -kPositivityTol) {
    throw ValidationError("density matrix has negative eigenvalue " +
                          std::to_string(ev(ev.size() - 1)));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const CVector& v = psi.amplitudes();
  return DensityMatrix(psi.dims(), v * v.adjoint());
}

DensityMatrix DensityMatrix::from_decomposition(HilbertDims dims,
                                                const std::vector<CVector>& phis) {
  CMatrix rho = CMatrix::Zero(dims.total(), dims.total());
  for (const auto& phi : phis) {
    if (phi.size() != dims.total()) throw DomainError("decomposition vector length");
    rho.noalias() += phi * phi.adjoint();
  }
  return DensityMatrix(dims, rho);
}

DensityMatrix DensityMatrix::maximally_mixed(HilbertDims dims) {
  const int n = dims.total();
  return DensityMatrix(dims, CMatrix::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix DensityMatrix::from_integrator(HilbertDims dims, const CMatrix& mat,
                                             double tol) {
  CMatrix sym = hermitian_part(mat);
  const double tr = sym.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    throw IntegrityError("propagated state lost normalization: trace = " +
                         std::to_string(tr));
  }
  const RVector ev = eigenvalues_desc(sym);
  const double lowest = ev(ev.size() - 1);
  if (lowest < -tol) {
    throw IntegrityError("propagated state lost positivity: eigenvalue " +
                         std::to_string(lowest));
  }
  if (lowest < -kPositivityTol) {
    spdlog::warn("propagated state has eigenvalue {:.3e} below -1e-8", lowest);
  }
  return DensityMatrix(dims, std::move(sym), Unchecked{});
}

CMatrix hermitian_part(const CMatrix& mat) {
  return 0.5 * (mat + mat.adjoint());
}

RVector eigenvalues_desc(const CMatrix& mat) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(mat),
                                                Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Hermitian eigensolver failed (N = " +
                       std::to_string(mat.rows()) + ")");
  }
  return solver.eigenvalues().reverse();
}

SpectralDecomposition spectral(const DensityMatrix& rho, double cutoff) {
  const CMatrix& raw = rho.matrix();
  const double asym = max_abs(raw - raw.adjoint());
  if (asym > 1e-10) {
    spdlog::warn("spectral: symmetrizing matrix with anti-Hermitian part {:.3e}",
                 asym);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(raw));
  if (solver.info() != Eigen::Success) {
    throw NumericError("spectral: eigensolver failed for N = " +
                       std::to_string(raw.rows()) +
                       ", trace = " + std::to_string(raw.trace().real()));
  }
  const RVector& values = solver.eigenvalues();  // ascending
  const CMatrix& vectors = solver.eigenvectors();

  SpectralDecomposition out;
  std::vector<double> kept;
  for (Eigen::Index i = values.size() - 1; i >= 0; --i) {
    const double mu = values(i);
    if (mu <= cutoff) continue;
    CVector v = vectors.col(i);
    v.normalize();
    kept.push_back(mu);
    out.subnormalized.emplace_back(std::sqrt(mu) * v);
    out.eigenstates.emplace_back(rho.dims(), std::move(v));
  }
  out.eigenvalues = Eigen::Map<RVector>(kept.data(), static_cast<Eigen::Index>(kept.size()));
  return out;
}

PureState two_term_state(Complex a, Complex b, int m1, int m2, int n1, int n2,
                         const HilbertDims& dims) {
  const double norm2 = std::norm(a) + std::norm(b);
  if (std::abs(norm2 - 1.0) > kNormTol) {
    throw ValidationError("two-term state: |a|^2 + |b|^2 = " +
                          std::to_string(norm2) + " != 1");
  }
  if (m1 == n1 && m2 == n2) {
    throw ValidationError("two-term state: both terms address the same basis ket");
  }
  CVector amp = CVector::Zero(dims.total());
  amp(flat_index(m1, m2, dims)) += a;
  amp(flat_index(n1, n2, dims)) += b;
  return PureState(dims, std::move(amp));
}

PureState bell_state(BellKind kind, const HilbertDims& dims) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case BellKind::PsiPlus:
      return two_term_state(h, h, 0, 1, 1, 0, dims);
    case BellKind::PsiMinus:
      return two_term_state(h, -h, 0, 1, 1, 0, dims);
    case BellKind::PhiPlus:
      return two_term_state(h, h, 0, 0, 1, 1, dims);
    case BellKind::PhiMinus:
      return two_term_state(h, -h, 0, 0, 1, 1, dims);
  }
  throw DomainError("unknown Bell kind");
}

CMatrix reduced_first(const PureState& psi) {
  const int d1 = psi.dims().d1();
  const int d2 = psi.dims().d2();
  CMatrix red = CMatrix::Zero(d1, d1);
  for (int n = 0; n < d1; ++n) {
    for (int np = 0; np < d1; ++np) {
      Complex acc = 0.0;
      for (int m = 0; m < d2; ++m) acc += psi(n, m) * std::conj(psi(np, m));
      red(n, np) = acc;
    }
  }
  return red;
}

}  // namespace qent
