#include "qent/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qent/errors.hpp"

namespace qent::analytic {

namespace {

void check_thermal(const ThermalParams& p) {
  if (!(p.nbar >= 0.0)) throw DomainError("nbar must be >= 0");
  if (!(p.gamma > 0.0)) throw DomainError("Gamma must be > 0");
}

// Root of a function increasing through zero on [lo, hi] (f(lo) < 0 < f(hi)).
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    throw NumericError("bisection bracket has no sign change");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ThermalParams::beta(double t) const {
  return std::exp(-gamma * (2.0 * nbar + 1.0) * t);
}

double bell_dephasing(double t, double gamma) { return std::exp(-gamma * t); }

double bell_zero_temperature(BellKind kind, double t, double gamma) {
  return is_psi(kind) ? std::exp(-gamma * t) : std::exp(-2.0 * gamma * t);
}

double bell_thermal_raw_beta(BellKind kind, double beta, double nbar) {
  if (!(nbar >= 0.0)) throw DomainError("nbar must be >= 0");
  const double x = nbar * nbar + nbar;
  const double denom = (2.0 * nbar + 1.0) * (2.0 * nbar + 1.0);
  if (is_psi(kind)) {
    const double root = std::sqrt(x * x * (beta + 1.0) * (beta + 1.0) + beta * x);
    return beta - 2.0 * (1.0 - beta) * root / denom;
  }
  return beta + ((2.0 * x + 1.0) * beta * beta - beta - 2.0 * x) / denom;
}

double bell_thermal_raw(BellKind kind, double t, const ThermalParams& p) {
  check_thermal(p);
  return bell_thermal_raw_beta(kind, p.beta(t), p.nbar);
}

double bell_thermal(BellKind kind, double t, const ThermalParams& p) {
  return std::max(bell_thermal_raw(kind, t, p), 0.0);
}

double bell_thermal_long_time_limit(double nbar) {
  return -2.0 * nbar * (nbar + 1.0) / ((2.0 * nbar + 1.0) * (2.0 * nbar + 1.0));
}

double bell_infinite_temperature_raw(double t, double gamma_tilde) {
  const double x = std::exp(-2.0 * gamma_tilde * t);
  return 0.5 * x * x + x - 0.5;
}

double bell_infinite_temperature(double t, double gamma_tilde) {
  return std::max(bell_infinite_temperature_raw(t, gamma_tilde), 0.0);
}

double short_time_rate(BellKind kind, const ThermalParams& p) {
  check_thermal(p);
  const double n = p.nbar;
  if (is_psi(kind)) return (2.0 * n + 1.0 + 2.0 * std::sqrt(n * (n + 1.0))) * p.gamma;
  return 2.0 * (2.0 * n + 1.0) * p.gamma;
}

double separability_time(BellKind kind, const ThermalParams& p) {
  check_thermal(p);
  if (p.nbar == 0.0) return kNeverSeparable;
  const double beta = bisect(
      [&](double b) { return bell_thermal_raw_beta(kind, b, p.nbar); }, 0.0, 1.0);
  return -std::log(beta) / (p.gamma * (2.0 * p.nbar + 1.0));
}

double separability_time_infinite_temperature(double gamma_tilde) {
  if (!(gamma_tilde > 0.0)) throw DomainError("Gamma~ must be > 0");
  // c = x^2/2 + x - 1/2 with x = exp(-2 Gamma~ t), increasing in x.
  const double x = bisect([](double v) { return 0.5 * v * v + v - 0.5; }, 0.0, 1.0);
  return -std::log(x) / (2.0 * gamma_tilde);
}

double two_term_dephasing(std::complex<double> a, std::complex<double> b, int m1, int m2,
                          int n1, int n2, double t, double gamma) {
  const double spread = static_cast<double>((m1 - n1) * (m1 - n1) + (m2 - n2) * (m2 - n2));
  return 2.0 * std::abs(a * b) * std::exp(-0.5 * gamma * t * spread);
}

double zero_t_0m_m0(std::complex<double> a, std::complex<double> b, int m, double t,
                    double gamma) {
  if (m < 1) throw DomainError("level m must be >= 1");
  return 2.0 * std::abs(a * b) * std::exp(-m * gamma * t);
}

double zero_t_00mm_raw(std::complex<double> a, std::complex<double> b, int m, double t,
                       double gamma) {
  if (m < 1) throw DomainError("level m must be >= 1");
  const double decay = 1.0 - std::exp(-gamma * t);
  return 2.0 * std::exp(-m * gamma * t) *
         (std::abs(a * b) - std::pow(decay, m) * std::norm(b));
}

double zero_t_00mm(std::complex<double> a, std::complex<double> b, int m, double t,
                   double gamma) {
  return std::max(zero_t_00mm_raw(a, b, m, t, gamma), 0.0);
}

double zero_t_00mm_separability_time(std::complex<double> a, std::complex<double> b, int m,
                                     double gamma) {
  if (m < 1) throw DomainError("level m must be >= 1");
  if (!(gamma > 0.0)) throw DomainError("Gamma must be > 0");
  const double ab = std::abs(a * b);
  const double bb = std::norm(b);
  if (ab == 0.0) return 0.0;
  if (ab >= bb) return kNeverSeparable;
  // g(x) = |ab| - (1 - x)^m |b|^2 with x = exp(-Gamma t), increasing in x.
  const double x = bisect([&](double v) { return ab - std::pow(1.0 - v, m) * bb; }, 0.0, 1.0);
  return -std::log(x) / gamma;
}

}  // namespace qent::analytic
