#pragma once

#include <string>
#include <vector>

#include "qent/hilbert.hpp"
#include "qent/kernels.hpp"

namespace qent {

enum class EnvironmentKind { Dephasing, Thermal, InfiniteTemperature };
enum class Ladder { QubitSigma, BosonicTruncated };

/// Local Markovian channel, identical on both subsystems.
struct EnvironmentModel {
  EnvironmentKind kind = EnvironmentKind::Thermal;
  double gamma = 1.0;  // Gamma, or Gamma~ = Gamma * nbar for InfiniteTemperature
  double nbar = 0.0;   // Thermal only
  Ladder ladder = Ladder::BosonicTruncated;

  static EnvironmentModel dephasing(double gamma, Ladder ladder = Ladder::BosonicTruncated);
  static EnvironmentModel thermal(double gamma, double nbar,
                                  Ladder ladder = Ladder::BosonicTruncated);
  static EnvironmentModel zero_temperature(double gamma,
                                           Ladder ladder = Ladder::BosonicTruncated);
  static EnvironmentModel infinite_temperature(double gamma_tilde,
                                               Ladder ladder = Ladder::BosonicTruncated);

  /// Throws ConfigError on negative rates.
  void validate() const;
  std::string describe() const;
};

struct JumpTerm {
  CMatrix op;
  double rate;
};

/// a|n> = sqrt(n)|n-1>, truncated at level d-1 (a^dagger|d-1> = 0).
CMatrix annihilation(int d);
CMatrix creation(int d);
CMatrix number_operator(int d);

/// Jump operators of one subsystem. Zero-rate terms are omitted.
std::vector<JumpTerm> local_jump_operators(const EnvironmentModel& model, int d);

/// Pure dissipation [(a, Gamma)]: the dedicated zero-temperature path that the
/// thermal model must reproduce at nbar = 0.
std::vector<JumpTerm> zero_temperature_jump_operators(double gamma, int d,
                                                      Ladder ladder = Ladder::BosonicTruncated);

/// (1 (x) L + L (x) 1) built from local jump operators.
class Generator {
 public:
  Generator(HilbertDims dims, const EnvironmentModel& model);
  Generator(HilbertDims dims, std::vector<LocalJump> jumps);

  const HilbertDims& dims() const { return dims_; }
  const std::vector<LocalJump>& jumps() const { return jumps_; }

  /// d rho / dt for an arbitrary N x N matrix (integrator stages need not be
  /// valid density matrices).
  CMatrix apply(const CMatrix& rho) const;

  /// Dense N^2 x N^2 superoperator acting on column-stacked vec(rho).
  CMatrix superoperator() const;

 private:
  HilbertDims dims_;
  std::vector<LocalJump> jumps_;
};

CMatrix apply_generator(const Generator& gen, const DensityMatrix& rho);

enum class IntegratorMethod { Rk4Adaptive, Rk4Fixed, MatrixExponential };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::Rk4Adaptive;
  double abs_tol = 1e-10;       // per-step max-entry error, step doubling
  double initial_step = 1e-3;
  double min_step = 1e-13;
  double fixed_step = 1e-2;     // Rk4Fixed
  long max_steps = 50'000'000;
  double integrity_tol = 1e-6;  // trace / positivity drift that aborts the run
};

inline constexpr int kMaxExponentialDim = 16;

DensityMatrix propagate(const DensityMatrix& rho0, const EnvironmentModel& model,
                        double t, const IntegratorConfig& cfg = {});

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  EnvironmentModel model;
};

/// States at each requested time; integration continues from the previous
/// output instead of restarting from t = 0.
Trajectory evolve_trajectory(const DensityMatrix& rho0, const EnvironmentModel& model,
                             const std::vector<double>& times,
                             const IntegratorConfig& cfg = {});

/// Incremental propagator behind propagate/evolve_trajectory.
class Propagator {
 public:
  Propagator(Generator gen, const DensityMatrix& rho0, IntegratorConfig cfg);

  /// Integrates forward to `t` (>= current time) and returns the state there.
  DensityMatrix advance_to(double t);

  double time() const { return time_; }
  long steps_taken() const { return steps_; }

 private:
  void step_adaptive(double t_end);
  void step_fixed(double t_end);
  void step_exponential(double t_end);
  CMatrix rk4(const CMatrix& y, const CMatrix& k1, double h) const;
  DensityMatrix checked_state() const;

  Generator gen_;
  IntegratorConfig cfg_;
  CMatrix state_;
  double time_ = 0.0;
  double step_;
  long steps_ = 0;
  CMatrix superop_;
};

}  // namespace qent
