// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qent/analytic.hpp"
#include "qent/concurrence.hpp"
#include "qent/lindblad.hpp"
#include "qent/scenario.hpp"
#include "qent/validation.hpp"

using namespace qent;

namespace {

constexpr BellKind kBells[] = {BellKind::PsiPlus, BellKind::PsiMinus, BellKind::PhiPlus,
                               BellKind::PhiMinus};

const char* bell_label(BellKind k) {
  switch (k) {
    case BellKind::PsiPlus:
      return "psi+";
    case BellKind::PsiMinus:
      return "psi-";
    case BellKind::PhiPlus:
      return "phi+";
    case BellKind::PhiMinus:
      return "phi-";
  }
  return "?";
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Scenario bell_scenario(BellKind kind, const EnvironmentModel& model, double t_max, int points,
                       std::vector<EstimatorSpec> estimators) {
  Scenario sc;
  sc.name = "acceptance";
  sc.state.kind = StateKind::Bell;
  sc.state.bell = kind;
  sc.model = model;
  sc.grid = {t_max, points};
  sc.estimators = std::move(estimators);
  return sc;
}

double wootters_at(const DensityMatrix& rho0, const EnvironmentModel& model, double t) {
  return wootters(propagate(rho0, model, t)).value;
}

// 1. Two-qubit oracle agreement.
Outcome criterion1() {
  struct Case {
    std::string label;
    EnvironmentModel model;
    std::string oracle;
    double t_max;
  };
  const std::vector<Case> cases{
      {"dephasing", EnvironmentModel::dephasing(1.0), "bell_dephasing", 3.0},
      {"zero-T", EnvironmentModel::zero_temperature(1.0), "bell_zero_temperature", 3.0},
      {"nbar=0.1", EnvironmentModel::thermal(1.0, 0.1), "bell_thermal", 3.0},
      {"nbar=0.2", EnvironmentModel::thermal(1.0, 0.2), "bell_thermal", 3.0},
      {"nbar=1", EnvironmentModel::thermal(1.0, 1.0), "bell_thermal", 3.0},
      {"infinite-T", EnvironmentModel::infinite_temperature(1.0), "bell_infinite_temperature",
       1.0},
  };
  Outcome out;
  double worst = 0.0;
  for (const auto& c : cases) {
    for (const BellKind k : kBells) {
      const TimeSeries s = run_scenario(bell_scenario(
          k, c.model, c.t_max, 200,
          {EstimatorSpec::parse("wootters"), EstimatorSpec::parse(c.oracle)}));
      double err = 0.0;
      for (const auto& rec : s.records) err = std::max(err, std::abs(rec.values[0] - rec.values[1]));
      worst = std::max(worst, err);
      out.require(s.records.size() == 200, c.label + " grid size");
      out.require(err <= 1e-6, c.label + "/" + bell_label(k) + " error " + fmt("%.2e", err));
    }
  }
  out.detail = "24 runs x 200 points, max |wootters - oracle| = " + fmt("%.2e", worst) +
               (out.detail.empty() ? "" : "; " + out.detail);
  return out;
}

// 2. Short-time rates.
Outcome criterion2() {
  Outcome out;
  double worst = 0.0;
  const double h = 1e-3;
  for (const double nbar : {0.1, 0.5, 1.0}) {
    const auto model = EnvironmentModel::thermal(1.0, nbar);
    for (const BellKind k : kBells) {
      const DensityMatrix rho0 = DensityMatrix::from_pure(bell_state(k));
      const double c0 = wootters_at(rho0, model, 0.0);
      const double c1 = wootters_at(rho0, model, h);
      const double c2 = wootters_at(rho0, model, 2.0 * h);
      const double slope = (-3.0 * c0 + 4.0 * c1 - c2) / (2.0 * h);
      const double expected = analytic::short_time_rate(k, {1.0, nbar});
      const double rel = std::abs(-slope - expected) / expected;
      worst = std::max(worst, rel);
      out.require(rel <= 0.01, "nbar=" + fmt("%g", nbar) + "/" + bell_label(k) +
                                   " relative error " + fmt("%.2e", rel));
    }
  }
  out.detail = "12 slopes, max relative error " + fmt("%.2e", worst) +
               (out.detail.empty() ? "" : "; " + out.detail);
  return out;
}

// 3. Separability.
Outcome criterion3() {
  Outcome out;
  const double nbar = 0.5;
  const auto model = EnvironmentModel::thermal(1.0, nbar);
  const double ts = analytic::separability_time(BellKind::PsiPlus, {1.0, nbar});
  const DensityMatrix rho0 = DensityMatrix::from_pure(bell_state(BellKind::PsiPlus));

  std::vector<double> times{0.0, 0.99 * ts};
  for (int i = 0; i <= 100; ++i) times.push_back(ts * (1.0 + 2.0 * i / 100.0));
  const Trajectory traj = evolve_trajectory(rho0, model, times);
  const double before = wootters(traj.states[1]).value;
  double after = 0.0;
  for (std::size_t i = 2; i < traj.states.size(); ++i) {
    after = std::max(after, wootters(traj.states[i]).value);
  }
  out.require(after <= 1e-8, "c after t_sep up to " + fmt("%.2e", after));
  out.require(before > 0.0, "c at 0.99 t_sep not positive");

  const double inf_ts = analytic::separability_time_infinite_temperature(1.0);
  const double expected = std::log(1.0 + std::sqrt(2.0)) / 2.0;
  out.require(std::abs(inf_ts - expected) <= 1e-6, "infinite-T t_sep " + fmt("%.10f", inf_ts));
  const std::string d = "t_sep = " + fmt("%.6f", ts) + ", max c(t >= t_sep) = " +
                        fmt("%.2e", after) + ", c(0.99 t_sep) = " + fmt("%.2e", before) +
                        ", infinite-T t_sep error " + fmt("%.1e", std::abs(inf_ts - expected));
  out.detail = d + (out.detail.empty() ? "" : "; " + out.detail);
  return out;
}

// 4. Qudit dephasing exactness.
Outcome criterion4() {
  Outcome out;
  double worst = 0.0;
  for (const auto& [a, b] : {std::pair{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)},
                             std::pair{0.5, std::sqrt(3.0) / 2.0}}) {
    Scenario sc;
    sc.name = "qudit_dephasing";
    sc.dims = HilbertDims(3, 3);
    sc.state.kind = StateKind::TwoTerm;
    sc.state.two_term = {a, b, 0, 2, 2, 0};
    sc.model = EnvironmentModel::dephasing(1.0);
    sc.grid = {1.0, 101};
    sc.estimators = {EstimatorSpec::parse("quasipure"), EstimatorSpec::parse("lower_optimized"),
                     EstimatorSpec::parse("analytic:two_term_dephasing")};
    sc.lower.restarts = 10;
    const TimeSeries s = run_scenario(sc);
    for (const auto& rec : s.records) {
      const double e = std::max(std::abs(rec.values[0] - rec.values[2]),
                                std::abs(rec.values[1] - rec.values[2]));
      worst = std::max(worst, e);
      out.require(rec.valid[0], "quasi-pure gate failed at t = " + fmt("%.3f", rec.t));
    }
  }
  out.require(worst <= 1e-6, "error " + fmt("%.2e", worst));
  out.detail = "2 states x 101 points, max error " + fmt("%.2e", worst) +
               (out.detail.empty() ? "" : "; " + out.detail);
  return out;
}

// 5. Zero-temperature exact families.
Outcome criterion5() {
  Outcome out;
  // (i)
  Scenario sc;
  sc.name = "zero_t_0m_m0";
  sc.dims = HilbertDims(3, 3);
  sc.state.kind = StateKind::TwoTerm;
  const double h = 1.0 / std::sqrt(2.0);
  sc.state.two_term = {h, h, 0, 2, 2, 0};
  sc.model = EnvironmentModel::zero_temperature(1.0);
  sc.grid = {1.5, 200};
  sc.estimators = {EstimatorSpec::parse("quasipure")};
  const TimeSeries s = run_scenario(sc);
  double err_i = 0.0;
  int valid_rows = 0;
  for (const auto& rec : s.records) {
    if (!rec.valid[0]) continue;
    ++valid_rows;
    err_i = std::max(err_i, std::abs(rec.values[0] - std::exp(-2.0 * rec.t)));
  }
  out.require(valid_rows >= 10, "only " + std::to_string(valid_rows) + " gated rows");
  out.require(err_i <= 1e-6, "(i) error " + fmt("%.2e", err_i));

  // (ii)
  const HilbertDims dims(3, 3);
  const Complex a = 0.5;
  const Complex b = std::sqrt(3.0) / 2.0;
  const DensityMatrix rho0 = DensityMatrix::from_pure(two_term_state(a, b, 0, 0, 2, 2, dims));
  std::vector<double> times;
  for (int i = 0; i < 200; ++i) times.push_back(1.5 * i / 199.0);
  const Trajectory traj = evolve_trajectory(rho0, EnvironmentModel::zero_temperature(1.0), times);
  double err_ii = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double c = wootters_functional(two_qubit_block(traj.states[i], 2));
    err_ii = std::max(err_ii, std::abs(c - analytic::zero_t_00mm(a, b, 2, times[i], 1.0)));
  }
  out.require(err_ii <= 1e-6, "(ii) error " + fmt("%.2e", err_ii));
  out.detail = "(i) " + std::to_string(valid_rows) + " gated rows, max error " +
               fmt("%.2e", err_i) + "; (ii) 200 points, max error " + fmt("%.2e", err_ii) +
               (out.detail.empty() ? "" : "; " + out.detail);
  return out;
}

// 6. Zero-temperature qudit bundle: rates and the quasi-pure stop.
Outcome criterion6() {
  Outcome out;
  const Bundle b = scenario_fig1();
  std::string rates;
  for (const auto& f : b.fits) {
    if (f.estimator == "quasipure") {
      const double rel = std::abs(f.rate - f.d) / f.d;
      rates += "d=" + std::to_string(f.d) + ":" + fmt("%.4f", f.rate) + " ";
      out.require(rel <= 0.05, "qp rate d=" + std::to_string(f.d) + " off by " + fmt("%.3f", rel));
    } else if (f.estimator == "upper") {
      const double rel = std::abs(f.rate - 2.0) / 2.0;
      rates += "upper:" + fmt("%.4f", f.rate) + " ";
      out.require(rel <= 0.10, "upper rate " + fmt("%.4f", f.rate));
    } else if (f.estimator == "lower_optimized") {
      rates += "lower:" + fmt("%.4f", f.rate) + " ";
    }
  }

  // The qp column must stop exactly where e^{-d t} stops being the largest
  // eigenvalue in the exported spectrum.
  for (const auto& run : b.runs) {
    const int d = run.scenario.dims.d1();
    const int qp = run.column_index("quasipure");
    std::size_t first_invalid = run.records.size();
    std::size_t first_overtaken = run.records.size();
    bool monotone = true;
    for (std::size_t i = 0; i < run.records.size(); ++i) {
      const auto& rec = run.records[i];
      const bool valid = rec.valid[static_cast<std::size_t>(qp)];
      if (!valid && first_invalid == run.records.size()) first_invalid = i;
      if (valid && first_invalid < i) monotone = false;
      const bool on_top = std::abs(rec.mu[0] - std::exp(-d * rec.t)) <= 1e-8;
      if (!on_top && first_overtaken == run.records.size()) first_overtaken = i;
    }
    const std::string tag = "d=" + std::to_string(d);
    out.require(monotone, tag + " qp validity not monotone");
    out.require(first_invalid < run.records.size(), tag + " qp column never terminates");
    out.require(first_overtaken < run.records.size(), tag + " no crossing in the spectrum");
    const long gap = static_cast<long>(first_invalid) - static_cast<long>(first_overtaken);
    out.require(gap >= -1 && gap <= 1,
                tag + " qp stops at row " + std::to_string(first_invalid) +
                    " but the crossing is at row " + std::to_string(first_overtaken));
    if (first_invalid < run.records.size()) {
      rates += tag + " stop t=" + fmt("%.3f", run.records[first_invalid].t) + " ";
    }
  }
  out.detail = rates + (out.detail.empty() ? "" : "| " + out.detail);
  return out;
}

// 7. Finite-temperature bundle: qudit below qubit, boundary gate.
Outcome criterion7() {
  Outcome out;
  const Bundle b = scenario_fig2();
  std::string info;
  int compared = 0;
  for (const auto& c : compare_fig2(b)) {
    ++compared;
    info += "nbar=" + fmt("%g", c.nbar) + " max(qp - qubit) = " + fmt("%.4f", c.max_excess) +
            " over " + std::to_string(c.rows) + " rows; ";
    out.require(c.rows > 0 && c.max_excess < 0.0,
                "nbar=" + fmt("%g", c.nbar) + " qudit curve not strictly below");
    out.require(c.invalid_rows == 0,
                "nbar=" + fmt("%g", c.nbar) + " has " + std::to_string(c.invalid_rows) +
                    " gated-out rows in the window");
  }
  out.require(compared == 2, "expected two finite-temperature qudit runs");

  for (const auto& run : b.runs) {
    const auto& sc = run.scenario;
    if (sc.model.kind == EnvironmentKind::InfiniteTemperature && sc.dims.d1() > 2) {
      double worst = 0.0;
      bool all_ok = true;
      for (const auto& rec : run.records) {
        worst = std::max(worst, rec.boundary_pop);
        all_ok = all_ok && rec.boundary_ok;
      }
      info += "infinite-T max boundary population " + fmt("%.2e", worst) + " up to t = " +
              fmt("%.3f", run.records.back().t);
      out.require(all_ok && worst <= 1e-3, "boundary gate violated");
    }
    // Qubit overlays: numerics against their closed forms.
    const int w = run.column_index("wootters");
    if (w >= 0) {
      for (const auto& rec : run.records) {
        const double oracle = rec.values.back();
        if (std::abs(rec.values[static_cast<std::size_t>(w)] - oracle) > 1e-6) {
          out.require(false, sc.name + " overlay mismatch at t = " + fmt("%.3f", rec.t));
          break;
        }
      }
    }
  }
  out.detail = info + (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// 8. Property suites.
Outcome criterion8() {
  Outcome out;
  PropertySuiteConfig cfg;
  cfg.samples = 500;
  for (const auto& r : run_property_suites(cfg)) {
    out.detail += r.name + " worst " + fmt("%.1e", r.worst) + (r.passed() ? "" : " FAILED") + "; ";
    out.require(r.passed(), r.name + " " + std::to_string(r.failures) + " failures");
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"two-qubit oracle agreement", criterion1},
      {"short-time decay rates", criterion2},
      {"finite-time separability", criterion3},
      {"qudit dephasing exactness", criterion4},
      {"zero-temperature exact families", criterion5},
      {"fig1 reproduction", criterion6},
      {"fig2 reproduction", criterion7},
      {"randomized property suites", criterion8},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s  %s (%.1f s)  %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
