#pragma once

#include <complex>
#include <limits>

#include "qent/hilbert.hpp"

// Closed-form concurrence dynamics for Bell states and two-term qudit states
// under local decoherence. All public oracles return max{c_T, 0}; the
// unclamped c_T is available separately where it has a meaningful limit.
namespace qent::analytic {

struct ThermalParams {
  double gamma;  // > 0
  double nbar;   // >= 0

  /// beta(t) = exp(-Gamma (2 nbar + 1) t)
  double beta(double t) const;
};

/// Pairs share formulas: Psi+- behave alike, Phi+- behave alike.
inline bool is_psi(BellKind k) { return k == BellKind::PsiPlus || k == BellKind::PsiMinus; }

double bell_dephasing(double t, double gamma);
double bell_zero_temperature(BellKind kind, double t, double gamma);

/// Unclamped c_T(beta) for the thermal bath.
double bell_thermal_raw_beta(BellKind kind, double beta, double nbar);
double bell_thermal_raw(BellKind kind, double t, const ThermalParams& p);
double bell_thermal(BellKind kind, double t, const ThermalParams& p);
/// lim_{t->inf} c_T = -2 nbar (nbar + 1) / (2 nbar + 1)^2.
double bell_thermal_long_time_limit(double nbar);

double bell_infinite_temperature_raw(double t, double gamma_tilde);
double bell_infinite_temperature(double t, double gamma_tilde);

/// Initial decay rate -dc/dt at t = 0 (units 1/time).
double short_time_rate(BellKind kind, const ThermalParams& p);

inline constexpr double kNeverSeparable = std::numeric_limits<double>::infinity();

/// Positive root of c_T(t) = 0 by bisection on beta in (0, 1). Returns
/// +infinity for nbar = 0, where separability is only asymptotic.
double separability_time(BellKind kind, const ThermalParams& p);
double separability_time_infinite_temperature(double gamma_tilde);

/// 2|ab| exp(-(Gamma t / 2) [(m1-n1)^2 + (m2-n2)^2])
double two_term_dephasing(std::complex<double> a, std::complex<double> b, int m1, int m2,
                          int n1, int n2, double t, double gamma);

/// a|0m> + b|m0> at zero temperature: 2|ab| exp(-m Gamma t).
double zero_t_0m_m0(std::complex<double> a, std::complex<double> b, int m, double t,
                    double gamma);

/// a|00> + b|mm> at zero temperature:
/// max{0, 2 exp(-m Gamma t)(|ab| - (1 - exp(-Gamma t))^m |b|^2)}.
double zero_t_00mm_raw(std::complex<double> a, std::complex<double> b, int m, double t,
                       double gamma);
double zero_t_00mm(std::complex<double> a, std::complex<double> b, int m, double t,
                   double gamma);
/// Finite separability time of the a|00> + b|mm> family (infinity if |ab| >= |b|^2
/// never fails, i.e. b = 0).
double zero_t_00mm_separability_time(std::complex<double> a, std::complex<double> b, int m,
                                     double gamma);

}  // namespace qent::analytic
