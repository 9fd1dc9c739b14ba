#include "qent/kernels.hpp"

#include "qent/errors.hpp"

namespace qent::kernels {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int local_dim(Site site, const HilbertDims& dims) {
  return site == Site::First ? dims.d1() : dims.d2();
}

void check_jump(const LocalJump& jump, const HilbertDims& dims) {
  const int d = local_dim(jump.site, dims);
  if (jump.op.rows() != d || jump.op.cols() != d) {
    throw DomainError("jump operator shape does not match local dimension");
  }
}

// out = (A lifted) * in. Each column of `in` is a d1 x d2 row-major block.
CMatrix left_local(Site site, const CMatrix& a, const CMatrix& in,
                   const HilbertDims& dims) {
  const int n = dims.total();
  const int d1 = dims.d1();
  const int d2 = dims.d2();
  CMatrix out(n, n);
  const CMatrix a_t = a.transpose();
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n; ++c) {
    Eigen::Map<const RowMajorMatrix> block(in.col(c).data(), d1, d2);
    Eigen::Map<RowMajorMatrix> dst(out.col(c).data(), d1, d2);
    if (site == Site::First) {
      dst.noalias() = a * block;
    } else {
      dst.noalias() = block * a_t;
    }
  }
  return out;
}

// out = in * (B lifted), computed as (B^T lifted * in^T)^T.
CMatrix right_local(Site site, const CMatrix& b, const CMatrix& in,
                    const HilbertDims& dims) {
  const CMatrix in_t = in.transpose();
  return left_local(site, b.transpose(), in_t, dims).transpose();
}

}  // namespace

CMatrix lift(Site site, const CMatrix& local, const HilbertDims& dims) {
  const int d1 = dims.d1();
  const int d2 = dims.d2();
  const int n = dims.total();
  CMatrix out = CMatrix::Zero(n, n);
  for (int a = 0; a < d1; ++a) {
    for (int b = 0; b < d2; ++b) {
      for (int ap = 0; ap < d1; ++ap) {
        for (int bp = 0; bp < d2; ++bp) {
          Complex v;
          if (site == Site::First) {
            v = b == bp ? local(a, ap) : Complex(0.0);
          } else {
            v = a == ap ? local(b, bp) : Complex(0.0);
          }
          out(flat_index(a, b, dims), flat_index(ap, bp, dims)) = v;
        }
      }
    }
  }
  return out;
}

void lindblad_apply_serial(const HilbertDims& dims, std::span<const LocalJump> jumps,
                           const CMatrix& rho, CMatrix& out) {
  const int n = dims.total();
  if (rho.rows() != n || rho.cols() != n) throw DomainError("rho shape mismatch");
  out = CMatrix::Zero(n, n);
  for (const auto& jump : jumps) {
    check_jump(jump, dims);
    if (jump.rate == 0.0) continue;
    const CMatrix l = lift(jump.site, jump.op, dims);
    const CMatrix ldl = l.adjoint() * l;
    out += jump.rate * (l * rho * l.adjoint());
    out -= 0.5 * jump.rate * (ldl * rho + rho * ldl);
  }
}

void lindblad_apply_parallel(const HilbertDims& dims,
                             std::span<const LocalJump> jumps, const CMatrix& rho,
                             CMatrix& out) {
  const int n = dims.total();
  if (rho.rows() != n || rho.cols() != n) throw DomainError("rho shape mismatch");
  out = CMatrix::Zero(n, n);
  CMatrix damping1 = CMatrix::Zero(dims.d1(), dims.d1());
  CMatrix damping2 = CMatrix::Zero(dims.d2(), dims.d2());
  for (const auto& jump : jumps) {
    check_jump(jump, dims);
    if (jump.rate == 0.0) continue;
    const CMatrix sandwich =
        right_local(jump.site, jump.op.adjoint(),
                    left_local(jump.site, jump.op, rho, dims), dims);
    out += jump.rate * sandwich;
    CMatrix& k = jump.site == Site::First ? damping1 : damping2;
    k += 0.5 * jump.rate * (jump.op.adjoint() * jump.op);
  }
  if (!damping1.isZero(0.0)) {
    out -= left_local(Site::First, damping1, rho, dims);
    out -= right_local(Site::First, damping1, rho, dims);
  }
  if (!damping2.isZero(0.0)) {
    out -= left_local(Site::Second, damping2, rho, dims);
    out -= right_local(Site::Second, damping2, rho, dims);
  }
}

std::vector<CMatrix> build_T_serial(const HilbertDims& dims,
                                    std::span<const ChiIndex> chis,
                                    std::span<const CVector> phis) {
  const auto r = static_cast<Eigen::Index>(phis.size());
  for (const auto& phi : phis) {
    if (phi.size() != dims.total()) throw DomainError("decomposition vector length");
  }
  std::vector<CMatrix> mats;
  mats.reserve(chis.size());
  for (const auto& chi : chis) {
    CMatrix t(r, r);
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index k = 0; k < r; ++k) {
        t(j, k) = chi_overlap(chi, phis[j], phis[k], dims);
      }
    }
    mats.push_back(std::move(t));
  }
  return mats;
}

std::vector<CMatrix> build_T_parallel(const HilbertDims& dims,
                                      std::span<const ChiIndex> chis,
                                      std::span<const CVector> phis) {
  const auto r = static_cast<Eigen::Index>(phis.size());
  for (const auto& phi : phis) {
    if (phi.size() != dims.total()) throw DomainError("decomposition vector length");
  }
  std::vector<CMatrix> mats(chis.size(), CMatrix(r, r));
  const auto count = static_cast<long>(chis.size());
#pragma omp parallel for schedule(static)
  for (long a = 0; a < count; ++a) {
    CMatrix& t = mats[a];
    const ChiIndex& chi = chis[a];
    // Symmetric in (j, k): fill the upper triangle and mirror.
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index k = j; k < r; ++k) {
        const Complex v = chi_overlap(chi, phis[j], phis[k], dims);
        t(j, k) = v;
        t(k, j) = v;
      }
    }
  }
  return mats;
}

}  // namespace qent::kernels
