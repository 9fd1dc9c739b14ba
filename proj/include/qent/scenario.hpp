#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qent/concurrence.hpp"
#include "qent/config.hpp"
#include "qent/hilbert.hpp"
#include "qent/lindblad.hpp"

namespace qent {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum class StateKind { TwoTerm, Bell, Amplitudes };

/// a|m1 m2> + b|n1 n2>.
struct TwoTermSpec {
  Complex a{1.0 / std::numbers::sqrt2, 0.0};
  Complex b{1.0 / std::numbers::sqrt2, 0.0};
  int m1 = 0, m2 = 1, n1 = 1, n2 = 0;
};

struct StateSpec {
  StateKind kind = StateKind::Bell;
  TwoTermSpec two_term;
  BellKind bell = BellKind::PsiPlus;
  CVector amplitudes;  // row-major psi_{nm}, normalized on build

  PureState build(const HilbertDims& dims) const;
  /// Two-term view of the state (Bell states included), if it has one.
  std::optional<TwoTermSpec> as_two_term() const;
};

// ---------------------------------------------------------------------------
// Closed-form oracles addressable by id

/// Parameters of an oracle id: `kind` (psi/phi or a Bell name), gamma, nbar,
/// gamma_tilde, a, b, m, m1, m2, n1, n2.
struct OracleSpec {
  std::string id;
  BellKind bell = BellKind::PsiPlus;
  double gamma = 1.0;
  double nbar = 0.0;
  TwoTermSpec two_term;
  int m = 1;

  double evaluate(double t) const;
};

const std::vector<std::string>& oracle_ids();
OracleSpec make_oracle(const std::string& id, const std::map<std::string, std::string>& params);

// ---------------------------------------------------------------------------

enum class EstimatorKind { Wootters, LowerOptimized, QuasiPure, Upper, Analytic };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Wootters;
  std::string oracle;  // Analytic only

  /// wootters, lower_optimized, quasipure, upper, or the oracle id.
  std::string column() const;
  /// Parses the same names, or `analytic:<id>`.
  static EstimatorSpec parse(const std::string& name);
};

struct TimeGrid {
  double t_max = 1.0;
  int points = 200;

  /// Linear grid over [0, t_max]; t_max = 0 yields the single point t = 0.
  std::vector<double> times() const;
};

struct Scenario {
  std::string name = "scenario";
  HilbertDims dims{2, 2};
  StateSpec state;
  EnvironmentModel model;
  TimeGrid grid;
  std::vector<EstimatorSpec> estimators;
  IntegratorConfig integrator;
  LowerBoundConfig lower;
  UpperBoundConfig upper;
  QuasiPureConfig qp;
  /// Rows whose boundary population exceeds this are flagged, for bosonic
  /// models with upward jumps and a local dimension above 2.
  double boundary_limit = 1e-3;
  std::uint64_t seed = 1;

  /// Throws ConfigError on any estimator/state/model mismatch.
  void validate() const;

  static Scenario from_config(const KeyValueConfig& cfg);
  /// Flat key-value echo, readable by from_config.
  std::map<std::string, std::string> to_entries() const;
};

/// The oracle parameters implied by a scenario's state and model.
OracleSpec oracle_for(const Scenario& scenario, const std::string& id);

struct TimeSeriesRecord {
  double t = 0.0;
  std::vector<double> values;      // one per estimator
  std::vector<bool> converged;     // one per estimator
  std::vector<bool> valid;         // converged and, for quasipure, gate held
  std::vector<double> mu;          // all eigenvalues of rho(t), decreasing
  double boundary_pop = 0.0;
  bool boundary_ok = true;
};

struct TimeSeries {
  Scenario scenario;
  std::vector<std::string> estimator_columns;
  int mu_count = 0;
  std::vector<TimeSeriesRecord> records;

  /// Position of an estimator column, or -1.
  int column_index(const std::string& name) const;
};

/// Largest diagonal entry of rho whose first or second local index is d - 1.
double boundary_population(const DensityMatrix& rho);

TimeSeries run_scenario(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Canned bundles

struct ExponentFit {
  std::string run;
  int d = 0;
  std::string estimator;
  double rate = 0.0;       // -slope of ln c
  double intercept = 0.0;  // ln c at t = 0
  int points = 0;
  double t_end = 0.0;      // last t used
};

/// OLS fit of ln c over rows with c > 1e-6, the estimator's valid flag set,
/// the boundary gate held, and t <= t_max_fit.
ExponentFit fit_exponent(const TimeSeries& series, const std::string& estimator,
                         double t_max_fit = std::numeric_limits<double>::infinity());

struct Bundle {
  std::string name;
  std::vector<TimeSeries> runs;
  std::vector<ExponentFit> fits;
};

struct Fig1Options {
  int d_min = 3;
  int d_max = 7;
  double t_max = 1.5;
  int points = 200;
  int upper_restarts = 4;
  int lower_restarts = 5;
  std::uint64_t seed = 1;
};

std::vector<Scenario> fig1_scenarios(const Fig1Options& opts = {});
Bundle scenario_fig1(const Fig1Options& opts = {});

struct Fig2Options {
  int d = 8;
  std::vector<double> nbars{0.1, 0.2};
  double t_max = 1.0;
  double t_max_infinite = 0.06;
  int points = 200;
  std::uint64_t seed = 1;
};

std::vector<Scenario> fig2_scenarios(const Fig2Options& opts = {});
Bundle scenario_fig2(const Fig2Options& opts = {});

/// Qudit quasi-pure curve against the two-qubit thermal closed form at the
/// same nbar, over rows with t_lo < t <= t_hi.
struct OverlayComparison {
  std::string run;
  double nbar = 0.0;
  double max_excess = 0.0;  // max of (qp - qubit curve); negative means strictly below
  int rows = 0;
  int invalid_rows = 0;     // rows in the window where qp was flagged invalid
};

std::vector<OverlayComparison> compare_fig2(const Bundle& bundle, double t_lo = 0.05,
                                            double t_hi = 0.5);

/// Runs scenarios concurrently; results keep the input order.
std::vector<TimeSeries> run_bundle(const std::vector<Scenario>& scenarios);

}  // namespace qent
