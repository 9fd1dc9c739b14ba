#include "qent/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "qent/analytic.hpp"
#include "qent/errors.hpp"

namespace qent {

namespace {

constexpr double kAmplitudeTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

std::string lower_copy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "': '" + text + "' is not a number");
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError("'" + key + "': '" + text + "' is not an integer");
  }
  return static_cast<int>(v);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

BellKind parse_bell(const std::string& text) {
  const std::string s = lower_copy(text);
  if (s == "psi_plus" || s == "psi+" || s == "psi") return BellKind::PsiPlus;
  if (s == "psi_minus" || s == "psi-") return BellKind::PsiMinus;
  if (s == "phi_plus" || s == "phi+" || s == "phi") return BellKind::PhiPlus;
  if (s == "phi_minus" || s == "phi-") return BellKind::PhiMinus;
  throw ConfigError("unknown Bell state '" + text + "'");
}

std::string bell_name(BellKind kind) {
  switch (kind) {
    case BellKind::PsiPlus:
      return "psi_plus";
    case BellKind::PsiMinus:
      return "psi_minus";
    case BellKind::PhiPlus:
      return "phi_plus";
    case BellKind::PhiMinus:
      return "phi_minus";
  }
  return "psi_plus";
}

std::string method_name(IntegratorMethod m) {
  switch (m) {
    case IntegratorMethod::Rk4Adaptive:
      return "rk4_adaptive";
    case IntegratorMethod::Rk4Fixed:
      return "rk4_fixed";
    case IntegratorMethod::MatrixExponential:
      return "expm";
  }
  return "rk4_adaptive";
}

IntegratorMethod parse_method(const std::string& text) {
  const std::string s = lower_copy(text);
  if (s == "rk4_adaptive" || s == "rk4") return IntegratorMethod::Rk4Adaptive;
  if (s == "rk4_fixed") return IntegratorMethod::Rk4Fixed;
  if (s == "expm" || s == "matrix_exponential") return IntegratorMethod::MatrixExponential;
  throw ConfigError("unknown integrator method '" + text + "'");
}

std::string model_kind_name(const EnvironmentModel& m) {
  switch (m.kind) {
    case EnvironmentKind::Dephasing:
      return "dephasing";
    case EnvironmentKind::Thermal:
      return "thermal";
    case EnvironmentKind::InfiniteTemperature:
      return "infinite_temperature";
  }
  return "thermal";
}

/// Bell kind of a two-term state living on levels {0, 1}, if it is one.
std::optional<BellKind> bell_kind_of(const TwoTermSpec& s) {
  if (std::abs(std::abs(s.a) - kInvSqrt2) > kAmplitudeTol ||
      std::abs(std::abs(s.b) - kInvSqrt2) > kAmplitudeTol) {
    return std::nullopt;
  }
  const Complex ratio = s.b / s.a;
  bool plus;
  if (std::abs(ratio - 1.0) <= kAmplitudeTol) {
    plus = true;
  } else if (std::abs(ratio + 1.0) <= kAmplitudeTol) {
    plus = false;
  } else {
    return std::nullopt;
  }
  const std::set<std::pair<int, int>> kets{{s.m1, s.m2}, {s.n1, s.n2}};
  if (kets == std::set<std::pair<int, int>>{{0, 1}, {1, 0}}) {
    return plus ? BellKind::PsiPlus : BellKind::PsiMinus;
  }
  if (kets == std::set<std::pair<int, int>>{{0, 0}, {1, 1}}) {
    return plus ? BellKind::PhiPlus : BellKind::PhiMinus;
  }
  return std::nullopt;
}

bool is_zero_temperature(const EnvironmentModel& m) {
  return m.kind == EnvironmentKind::Thermal && m.nbar == 0.0;
}

[[noreturn]] void family_mismatch(const std::string& id, const std::string& why) {
  throw ConfigError("oracle '" + id + "' does not apply: " + why);
}

}  // namespace

// ---------------------------------------------------------------------------

PureState StateSpec::build(const HilbertDims& dims) const {
  switch (kind) {
    case StateKind::Bell:
      return bell_state(bell, dims);
    case StateKind::TwoTerm:
      return two_term_state(two_term.a, two_term.b, two_term.m1, two_term.m2, two_term.n1,
                            two_term.n2, dims);
    case StateKind::Amplitudes: {
      if (amplitudes.size() != dims.total()) {
        throw ConfigError("state has " + std::to_string(amplitudes.size()) +
                          " amplitudes, expected " + std::to_string(dims.total()));
      }
      const double norm = amplitudes.norm();
      if (!(norm > 0.0)) throw ConfigError("state amplitudes are all zero");
      return PureState(dims, amplitudes / norm);
    }
  }
  throw ConfigError("unknown state kind");
}

std::optional<TwoTermSpec> StateSpec::as_two_term() const {
  if (kind == StateKind::TwoTerm) return two_term;
  if (kind != StateKind::Bell) return std::nullopt;
  TwoTermSpec s;
  const double sign =
      (bell == BellKind::PsiMinus || bell == BellKind::PhiMinus) ? -1.0 : 1.0;
  s.a = kInvSqrt2;
  s.b = sign * kInvSqrt2;
  if (analytic::is_psi(bell)) {
    s.m1 = 0, s.m2 = 1, s.n1 = 1, s.n2 = 0;
  } else {
    s.m1 = 0, s.m2 = 0, s.n1 = 1, s.n2 = 1;
  }
  return s;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& oracle_ids() {
  static const std::vector<std::string> ids{
      "bell_dephasing",     "bell_zero_temperature", "bell_thermal",
      "bell_infinite_temperature", "two_term_dephasing", "zero_t_0m_m0",
      "zero_t_00mm"};
  return ids;
}

double OracleSpec::evaluate(double t) const {
  const TwoTermSpec& s = two_term;
  if (id == "bell_dephasing") return analytic::bell_dephasing(t, gamma);
  if (id == "bell_zero_temperature") return analytic::bell_zero_temperature(bell, t, gamma);
  if (id == "bell_thermal") return analytic::bell_thermal(bell, t, {gamma, nbar});
  if (id == "bell_infinite_temperature") return analytic::bell_infinite_temperature(t, gamma);
  if (id == "two_term_dephasing") {
    return analytic::two_term_dephasing(s.a, s.b, s.m1, s.m2, s.n1, s.n2, t, gamma);
  }
  if (id == "zero_t_0m_m0") return analytic::zero_t_0m_m0(s.a, s.b, m, t, gamma);
  if (id == "zero_t_00mm") return analytic::zero_t_00mm(s.a, s.b, m, t, gamma);
  throw ConfigError("unknown oracle '" + id + "'");
}

OracleSpec make_oracle(const std::string& id,
                       const std::map<std::string, std::string>& params) {
  const auto& ids = oracle_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    throw ConfigError("unknown oracle '" + id + "'");
  }
  OracleSpec o;
  o.id = id;
  double a_re = kInvSqrt2, a_im = 0.0, b_re = kInvSqrt2, b_im = 0.0;
  bool explicit_indices = false;
  for (const auto& [key, value] : params) {
    if (key == "kind" || key == "bell") {
      o.bell = parse_bell(value);
    } else if (key == "gamma" || key == "gamma_tilde") {
      o.gamma = parse_double(key, value);
    } else if (key == "nbar") {
      o.nbar = parse_double(key, value);
    } else if (key == "a") {
      a_re = parse_double(key, value);
    } else if (key == "a_im") {
      a_im = parse_double(key, value);
    } else if (key == "b") {
      b_re = parse_double(key, value);
    } else if (key == "b_im") {
      b_im = parse_double(key, value);
    } else if (key == "m") {
      o.m = parse_int(key, value);
    } else if (key == "m1" || key == "m2" || key == "n1" || key == "n2") {
      explicit_indices = true;
      const int v = parse_int(key, value);
      (key == "m1" ? o.two_term.m1
                   : key == "m2" ? o.two_term.m2
                                 : key == "n1" ? o.two_term.n1 : o.two_term.n2) = v;
    } else {
      throw ConfigError("unknown oracle parameter '" + key + "'");
    }
  }
  if (!(o.gamma >= 0.0) || !(o.nbar >= 0.0)) {
    throw ConfigError("oracle rates must be >= 0");
  }
  if (o.m < 1) throw ConfigError("oracle level m must be >= 1");
  o.two_term.a = Complex(a_re, a_im);
  o.two_term.b = Complex(b_re, b_im);
  if (!explicit_indices) {
    if (id == "zero_t_0m_m0") {
      o.two_term.m1 = 0, o.two_term.m2 = o.m, o.two_term.n1 = o.m, o.two_term.n2 = 0;
    } else if (id == "zero_t_00mm") {
      o.two_term.m1 = 0, o.two_term.m2 = 0, o.two_term.n1 = o.m, o.two_term.n2 = o.m;
    }
  }
  return o;
}

OracleSpec oracle_for(const Scenario& sc, const std::string& id) {
  const auto& ids = oracle_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    throw ConfigError("unknown oracle '" + id + "'");
  }
  const auto tt = sc.state.as_two_term();
  if (!tt) family_mismatch(id, "the initial state is not a two-term state");
  const EnvironmentModel& model = sc.model;
  const bool qubits = sc.dims.d1() == 2 && sc.dims.d2() == 2;

  OracleSpec o;
  o.id = id;
  o.gamma = model.gamma;
  o.nbar = model.nbar;
  o.two_term = *tt;

  if (id.rfind("bell_", 0) == 0) {
    const auto bell = bell_kind_of(*tt);
    if (!bell) family_mismatch(id, "the initial state is not a Bell state on levels {0,1}");
    o.bell = *bell;
    if (id == "bell_dephasing") {
      if (model.kind != EnvironmentKind::Dephasing) family_mismatch(id, "model is not dephasing");
    } else if (id == "bell_zero_temperature") {
      if (!is_zero_temperature(model)) family_mismatch(id, "model is not zero temperature");
    } else if (id == "bell_thermal") {
      if (model.kind != EnvironmentKind::Thermal) family_mismatch(id, "model is not thermal");
      if (!qubits) family_mismatch(id, "thermal Bell dynamics are closed only for two qubits");
    } else {
      if (model.kind != EnvironmentKind::InfiniteTemperature) {
        family_mismatch(id, "model is not infinite temperature");
      }
      if (!qubits) {
        family_mismatch(id, "infinite-temperature Bell dynamics are closed only for two qubits");
      }
    }
    return o;
  }
  if (id == "two_term_dephasing") {
    if (model.kind != EnvironmentKind::Dephasing) family_mismatch(id, "model is not dephasing");
    return o;
  }
  if (!is_zero_temperature(model)) family_mismatch(id, "model is not zero temperature");
  const std::pair<int, int> k1{tt->m1, tt->m2};
  const std::pair<int, int> k2{tt->n1, tt->n2};
  if (id == "zero_t_0m_m0") {
    // Either ordering of a|0m> + b|m0>; a stays attached to |0m>.
    if (k1.first == 0 && k1.second >= 1 && k2 == std::pair{k1.second, 0}) {
      o.m = k1.second;
    } else if (k2.first == 0 && k2.second >= 1 && k1 == std::pair{k2.second, 0}) {
      o.m = k2.second;
      std::swap(o.two_term.a, o.two_term.b);
    } else {
      family_mismatch(id, "the initial state is not of the form a|0m> + b|m0>");
    }
    return o;
  }
  // zero_t_00mm
  if (k1 == std::pair{0, 0} && k2.first == k2.second && k2.first >= 1) {
    o.m = k2.first;
  } else if (k2 == std::pair{0, 0} && k1.first == k1.second && k1.first >= 1) {
    o.m = k1.first;
    std::swap(o.two_term.a, o.two_term.b);
  } else {
    family_mismatch(id, "the initial state is not of the form a|00> + b|mm>");
  }
  return o;
}

// ---------------------------------------------------------------------------

std::string EstimatorSpec::column() const {
  switch (kind) {
    case EstimatorKind::Wootters:
      return "wootters";
    case EstimatorKind::LowerOptimized:
      return "lower_optimized";
    case EstimatorKind::QuasiPure:
      return "quasipure";
    case EstimatorKind::Upper:
      return "upper";
    case EstimatorKind::Analytic:
      return oracle;
  }
  return oracle;
}

EstimatorSpec EstimatorSpec::parse(const std::string& name) {
  const std::string s = lower_copy(name);
  if (s == "wootters") return {EstimatorKind::Wootters, {}};
  if (s == "lower_optimized" || s == "lower") return {EstimatorKind::LowerOptimized, {}};
  if (s == "quasipure" || s == "qp") return {EstimatorKind::QuasiPure, {}};
  if (s == "upper") return {EstimatorKind::Upper, {}};
  const std::string prefix = "analytic:";
  std::string id = s.rfind(prefix, 0) == 0 ? s.substr(prefix.size()) : s;
  const auto& ids = oracle_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    throw ConfigError("unknown estimator '" + name + "'");
  }
  return {EstimatorKind::Analytic, id};
}

std::vector<double> TimeGrid::times() const {
  if (t_max == 0.0) return {0.0};
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = t_max * static_cast<double>(i) / (points - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------

void Scenario::validate() const {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("scenario name must be non-empty and contain no path separators");
  }
  if (!std::isfinite(grid.t_max) || grid.t_max < 0.0) {
    throw ConfigError("grid.t_max must be finite and >= 0");
  }
  if (grid.t_max > 0.0 && grid.points < 2) {
    throw ConfigError("grid.points must be >= 2 when grid.t_max > 0");
  }
  model.validate();
  if (model.ladder == Ladder::QubitSigma && !(dims.d1() == 2 && dims.d2() == 2)) {
    throw ConfigError("qubit ladder operators require d1 = d2 = 2");
  }
  if (integrator.method == IntegratorMethod::MatrixExponential &&
      dims.total() > kMaxExponentialDim) {
    throw ConfigError("matrix exponential propagation is limited to total dimension " +
                      std::to_string(kMaxExponentialDim));
  }
  try {
    (void)state.build(dims);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("invalid initial state: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid initial state: ") + e.what());
  }
  if (estimators.empty()) throw ConfigError("no estimators requested");
  std::set<std::string> seen;
  for (const auto& est : estimators) {
    if (!seen.insert(est.column()).second) {
      throw ConfigError("estimator '" + est.column() + "' requested twice");
    }
    if (est.kind == EstimatorKind::Wootters && !(dims.d1() == 2 && dims.d2() == 2)) {
      throw ConfigError("wootters requires d1 = d2 = 2, got " + std::to_string(dims.d1()) +
                        "x" + std::to_string(dims.d2()));
    }
    if (est.kind == EstimatorKind::Analytic) (void)oracle_for(*this, est.oracle);
  }
  if (lower.restarts < 0 || upper.restarts < 1 || upper.extra_members < 0) {
    throw ConfigError("optimizer restart counts out of range");
  }
}

Scenario Scenario::from_config(const KeyValueConfig& cfg) {
  Scenario sc;
  sc.name = cfg.get_string("name", sc.name);

  int d1 = cfg.get_int("dims.d", 2);
  int d2 = d1;
  d1 = cfg.get_int("dims.d1", d1);
  d2 = cfg.get_int("dims.d2", d2);
  if (d1 < 2 || d2 < 2) throw ConfigError("local dimensions must be >= 2");
  sc.dims = HilbertDims(d1, d2);

  const std::string kind = lower_copy(cfg.get_string("state.kind", "bell"));
  if (kind == "bell") {
    sc.state.kind = StateKind::Bell;
    sc.state.bell = parse_bell(cfg.get_string("state.bell", "psi_plus"));
  } else if (kind == "two_term") {
    sc.state.kind = StateKind::TwoTerm;
    TwoTermSpec& t = sc.state.two_term;
    t.a = Complex(cfg.get_double("state.a", t.a.real()), cfg.get_double("state.a_im", 0.0));
    t.b = Complex(cfg.get_double("state.b", t.b.real()), cfg.get_double("state.b_im", 0.0));
    t.m1 = cfg.get_int("state.m1", t.m1);
    t.m2 = cfg.get_int("state.m2", t.m2);
    t.n1 = cfg.get_int("state.n1", t.n1);
    t.n2 = cfg.get_int("state.n2", t.n2);
  } else if (kind == "amplitudes") {
    sc.state.kind = StateKind::Amplitudes;
    const auto re = split(cfg.require_string("state.amplitudes"), ',');
    const auto im_text = cfg.find("state.amplitudes_im");
    const auto im = im_text ? split(*im_text, ',') : std::vector<std::string>{};
    if (!im.empty() && im.size() != re.size()) {
      throw ConfigError("state.amplitudes_im must match state.amplitudes in length");
    }
    sc.state.amplitudes.resize(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) {
      const double imag = im.empty() ? 0.0 : parse_double("state.amplitudes_im", im[i]);
      sc.state.amplitudes(static_cast<Eigen::Index>(i)) =
          Complex(parse_double("state.amplitudes", re[i]), imag);
    }
  } else {
    throw ConfigError("unknown state.kind '" + kind + "'");
  }

  const std::string mkind = lower_copy(cfg.get_string("model.kind", "thermal"));
  const double gamma = cfg.get_double("model.gamma", 1.0);
  const std::string ladder_text = lower_copy(cfg.get_string("model.ladder", "bosonic"));
  Ladder ladder;
  if (ladder_text == "bosonic") {
    ladder = Ladder::BosonicTruncated;
  } else if (ladder_text == "qubit") {
    ladder = Ladder::QubitSigma;
  } else {
    throw ConfigError("unknown model.ladder '" + ladder_text + "'");
  }
  if (mkind == "dephasing") {
    sc.model = EnvironmentModel::dephasing(gamma, ladder);
  } else if (mkind == "thermal") {
    sc.model = EnvironmentModel::thermal(gamma, cfg.get_double("model.nbar", 0.0), ladder);
  } else if (mkind == "zero_temperature") {
    sc.model = EnvironmentModel::zero_temperature(gamma, ladder);
  } else if (mkind == "infinite_temperature") {
    sc.model = EnvironmentModel::infinite_temperature(gamma, ladder);
  } else {
    throw ConfigError("unknown model.kind '" + mkind + "'");
  }

  sc.grid.t_max = cfg.get_double("grid.t_max", sc.grid.t_max);
  sc.grid.points = cfg.get_int("grid.points", sc.grid.points);

  for (const auto& name : split(cfg.get_string("estimators", "quasipure"), ',')) {
    sc.estimators.push_back(EstimatorSpec::parse(name));
  }

  sc.integrator.method = parse_method(cfg.get_string("integrator.method", "rk4_adaptive"));
  sc.integrator.abs_tol = cfg.get_double("integrator.tol", sc.integrator.abs_tol);
  sc.integrator.fixed_step = cfg.get_double("integrator.step", sc.integrator.fixed_step);

  sc.lower.restarts = cfg.get_int("lower.restarts", sc.lower.restarts);
  sc.lower.max_sweeps = cfg.get_int("lower.max_sweeps", sc.lower.max_sweeps);
  sc.lower.tol = cfg.get_double("lower.tol", sc.lower.tol);
  sc.upper.restarts = cfg.get_int("upper.restarts", sc.upper.restarts);
  sc.upper.extra_members = cfg.get_int("upper.extra_members", sc.upper.extra_members);
  sc.upper.max_sweeps = cfg.get_int("upper.max_sweeps", sc.upper.max_sweeps);
  sc.upper.tol = cfg.get_double("upper.tol", sc.upper.tol);
  sc.qp.min_leading = cfg.get_double("qp.min_leading", sc.qp.min_leading);
  sc.qp.min_gap = cfg.get_double("qp.min_gap", sc.qp.min_gap);
  sc.boundary_limit = cfg.get_double("boundary.limit", sc.boundary_limit);

  const auto seed_text = cfg.find("seed");
  if (seed_text) {
    try {
      std::size_t pos = 0;
      sc.seed = std::stoull(*seed_text, &pos);
      if (pos != seed_text->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("seed '" + *seed_text + "' is not a non-negative integer");
    }
  }

  const auto unused = cfg.unused_keys();
  if (!unused.empty()) throw ConfigError("unknown config key '" + *unused.begin() + "'");
  sc.validate();
  return sc;
}

std::map<std::string, std::string> Scenario::to_entries() const {
  std::map<std::string, std::string> e;
  e["name"] = name;
  e["dims.d1"] = std::to_string(dims.d1());
  e["dims.d2"] = std::to_string(dims.d2());
  switch (state.kind) {
    case StateKind::Bell:
      e["state.kind"] = "bell";
      e["state.bell"] = bell_name(state.bell);
      break;
    case StateKind::TwoTerm: {
      const TwoTermSpec& t = state.two_term;
      e["state.kind"] = "two_term";
      e["state.a"] = format_double(t.a.real());
      e["state.a_im"] = format_double(t.a.imag());
      e["state.b"] = format_double(t.b.real());
      e["state.b_im"] = format_double(t.b.imag());
      e["state.m1"] = std::to_string(t.m1);
      e["state.m2"] = std::to_string(t.m2);
      e["state.n1"] = std::to_string(t.n1);
      e["state.n2"] = std::to_string(t.n2);
      break;
    }
    case StateKind::Amplitudes: {
      e["state.kind"] = "amplitudes";
      std::string re, im;
      for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i) {
        re += (i ? "," : "") + format_double(state.amplitudes(i).real());
        im += (i ? "," : "") + format_double(state.amplitudes(i).imag());
      }
      e["state.amplitudes"] = re;
      e["state.amplitudes_im"] = im;
      break;
    }
  }
  e["model.kind"] = model_kind_name(model);
  e["model.gamma"] = format_double(model.gamma);
  if (model.kind == EnvironmentKind::Thermal) e["model.nbar"] = format_double(model.nbar);
  e["model.ladder"] = model.ladder == Ladder::QubitSigma ? "qubit" : "bosonic";
  e["grid.t_max"] = format_double(grid.t_max);
  e["grid.points"] = std::to_string(grid.points);
  std::string names;
  for (const auto& est : estimators) {
    if (!names.empty()) names += ",";
    names += est.kind == EstimatorKind::Analytic ? "analytic:" + est.oracle : est.column();
  }
  e["estimators"] = names;
  e["integrator.method"] = method_name(integrator.method);
  e["integrator.tol"] = format_double(integrator.abs_tol);
  e["integrator.step"] = format_double(integrator.fixed_step);
  e["lower.restarts"] = std::to_string(lower.restarts);
  e["lower.max_sweeps"] = std::to_string(lower.max_sweeps);
  e["lower.tol"] = format_double(lower.tol);
  e["upper.restarts"] = std::to_string(upper.restarts);
  e["upper.extra_members"] = std::to_string(upper.extra_members);
  e["upper.max_sweeps"] = std::to_string(upper.max_sweeps);
  e["upper.tol"] = format_double(upper.tol);
  e["qp.min_leading"] = format_double(qp.min_leading);
  e["qp.min_gap"] = format_double(qp.min_gap);
  e["boundary.limit"] = format_double(boundary_limit);
  e["seed"] = std::to_string(seed);
  return e;
}

// ---------------------------------------------------------------------------

int TimeSeries::column_index(const std::string& name) const {
  const auto it = std::find(estimator_columns.begin(), estimator_columns.end(), name);
  return it == estimator_columns.end() ? -1
                                       : static_cast<int>(it - estimator_columns.begin());
}

double boundary_population(const DensityMatrix& rho) {
  const HilbertDims& dims = rho.dims();
  double best = 0.0;
  for (int n = 0; n < dims.d1(); ++n) {
    for (int m = 0; m < dims.d2(); ++m) {
      if (n != dims.d1() - 1 && m != dims.d2() - 1) continue;
      const int i = flat_index(n, m, dims);
      best = std::max(best, rho(i, i).real());
    }
  }
  return best;
}

namespace {

/// Per-run state carried from one time point to the next.
class EstimatorRunner {
 public:
  explicit EstimatorRunner(const Scenario& sc) : sc_(sc) {
    lower_cfg_ = sc.lower;
    lower_cfg_.seed = sc.seed;
    upper_cfg_ = sc.upper;
    upper_cfg_.seed = sc.seed ^ 0x9E3779B97F4A7C15ULL;
    // Only upward jumps can carry population into the truncated level.
    const bool pumps = sc.model.kind == EnvironmentKind::InfiniteTemperature ||
                       (sc.model.kind == EnvironmentKind::Thermal && sc.model.nbar > 0.0);
    truncation_matters_ = pumps && sc.model.ladder == Ladder::BosonicTruncated &&
                          (sc.dims.d1() > 2 || sc.dims.d2() > 2);
    for (const auto& est : sc.estimators) {
      oracles_.push_back(est.kind == EstimatorKind::Analytic ? oracle_for(sc, est.oracle)
                                                             : OracleSpec{});
    }
  }

  TimeSeriesRecord evaluate(double t, const DensityMatrix& rho) {
    TimeSeriesRecord rec;
    rec.t = t;
    const RVector mu = eigenvalues_desc(rho.matrix());
    rec.mu.assign(mu.data(), mu.data() + mu.size());
    rec.boundary_pop = boundary_population(rho);
    rec.boundary_ok = !truncation_matters_ || rec.boundary_pop <= sc_.boundary_limit;

    const SpectralDecomposition spec = spectral(rho);
    std::optional<TMatrixSet> tset;
    for (std::size_t i = 0; i < sc_.estimators.size(); ++i) {
      double value = 0.0;
      bool converged = true;
      bool valid = true;
      switch (sc_.estimators[i].kind) {
        case EstimatorKind::Wootters:
          value = wootters(rho).value;
          break;
        case EstimatorKind::LowerOptimized: {
          if (!tset) tset = build_T(spec.subnormalized, rho.dims());
          std::vector<ZVector> warm;
          if (last_z_) warm.push_back(*last_z_);
          LowerBoundResult res = optimize_lower_bound(*tset, lower_cfg_, warm);
          value = res.estimate.value;
          converged = valid = res.estimate.converged;
          last_z_ = std::move(res.z);
          break;
        }
        case EstimatorKind::QuasiPure:
          std::tie(value, converged, valid) = quasipure(spec, rho.dims());
          break;
        case EstimatorKind::Upper: {
          const CMatrix* warm = last_ensemble_.size() > 0 ? &last_ensemble_ : nullptr;
          UpperBoundResult res = upper_convex_roof(rho, upper_cfg_, warm);
          value = res.estimate.value;
          converged = valid = res.estimate.converged;
          last_ensemble_ = std::move(res.ensemble);
          break;
        }
        case EstimatorKind::Analytic:
          value = oracles_[i].evaluate(t);
          break;
      }
      rec.values.push_back(value);
      rec.converged.push_back(converged);
      rec.valid.push_back(valid);
    }
    return rec;
  }

 private:
  /// Quasi-pure value with the validity gate made sticky: once the leading
  /// eigenvalue loses dominance, or the leading eigenvector is replaced by a
  /// different branch (an eigenvalue crossing between grid points), the
  /// estimator stays invalid for the rest of the run.
  std::tuple<double, bool, bool> quasipure(const SpectralDecomposition& spec,
                                           const HilbertDims& dims) {
    const CVector& lead = spec.eigenstates.front().amplitudes();
    if (last_lead_.size() == lead.size() && std::abs(last_lead_.dot(lead)) < kInvSqrt2) {
      qp_gate_lost_ = true;
    }
    last_lead_ = lead;
    try {
      const ConcurrenceEstimate est = quasipure_concurrence(spec, dims, sc_.qp);
      if (!est.valid) qp_gate_lost_ = true;
      return {est.value, est.converged, !qp_gate_lost_};
    } catch (const QuasiPureDegenerate&) {
      qp_gate_lost_ = true;
      return {std::numeric_limits<double>::quiet_NaN(), false, false};
    }
  }

  const Scenario& sc_;
  LowerBoundConfig lower_cfg_;
  UpperBoundConfig upper_cfg_;
  std::vector<OracleSpec> oracles_;
  std::optional<ZVector> last_z_;
  CMatrix last_ensemble_;
  CVector last_lead_;
  bool qp_gate_lost_ = false;
  bool truncation_matters_ = false;
};

}  // namespace

TimeSeries run_scenario(const Scenario& scenario) {
  scenario.validate();
  TimeSeries series;
  series.scenario = scenario;
  for (const auto& est : scenario.estimators) series.estimator_columns.push_back(est.column());
  series.mu_count = scenario.dims.total();

  const DensityMatrix rho0 = DensityMatrix::from_pure(scenario.state.build(scenario.dims));
  Propagator prop(Generator(scenario.dims, scenario.model), rho0, scenario.integrator);
  EstimatorRunner runner(scenario);
  for (const double t : scenario.grid.times()) {
    try {
      const DensityMatrix rho = t == 0.0 ? rho0 : prop.advance_to(t);
      series.records.push_back(runner.evaluate(t, rho));
    } catch (const NumericError& e) {
      throw NumericError(scenario.name + " at t = " + format_double(t) + ": " + e.what());
    } catch (const IntegrityError& e) {
      throw IntegrityError(scenario.name + " at t = " + format_double(t) + ": " + e.what());
    }
  }
  return series;
}

std::vector<TimeSeries> run_bundle(const std::vector<Scenario>& scenarios) {
  for (const auto& sc : scenarios) sc.validate();
  std::vector<TimeSeries> out(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  const auto n = static_cast<long>(scenarios.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      spdlog::info("running {}", scenarios[i].name);
      out[i] = run_scenario(scenarios[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ExponentFit fit_exponent(const TimeSeries& series, const std::string& estimator,
                         double t_max_fit) {
  const int col = series.column_index(estimator);
  if (col < 0) throw ConfigError("series has no column '" + estimator + "'");
  ExponentFit fit;
  fit.run = series.scenario.name;
  fit.d = series.scenario.dims.d1();
  fit.estimator = estimator;
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& rec : series.records) {
    const double c = rec.values[static_cast<std::size_t>(col)];
    if (!(c > 1e-6) || !rec.valid[static_cast<std::size_t>(col)] || !rec.boundary_ok ||
        rec.t > t_max_fit) {
      continue;
    }
    const double y = std::log(c);
    st += rec.t;
    sy += y;
    stt += rec.t * rec.t;
    sty += rec.t * y;
    ++fit.points;
    fit.t_end = rec.t;
  }
  const double n = fit.points;
  const double denom = n * stt - st * st;
  if (fit.points < 2 || !(denom > 0.0)) {
    throw NumericError("exponent fit for '" + estimator + "' in " + fit.run +
                       " has fewer than two usable points");
  }
  const double slope = (n * sty - st * sy) / denom;
  fit.rate = -slope;
  fit.intercept = (sy - slope * st) / n;
  return fit;
}

// ---------------------------------------------------------------------------

std::vector<Scenario> fig1_scenarios(const Fig1Options& opts) {
  std::vector<Scenario> out;
  for (int d = opts.d_min; d <= opts.d_max; ++d) {
    const int m = d - 1;
    Scenario sc;
    sc.name = "fig1_d" + std::to_string(d);
    sc.dims = HilbertDims(d, d);
    sc.state.kind = StateKind::TwoTerm;
    sc.state.two_term = TwoTermSpec{Complex(kInvSqrt2), Complex(kInvSqrt2), 1, m, m, 1};
    sc.model = EnvironmentModel::zero_temperature(1.0);
    sc.grid = {opts.t_max, opts.points};
    sc.estimators.push_back({EstimatorKind::QuasiPure, {}});
    if (d == 3) {
      sc.estimators.push_back({EstimatorKind::LowerOptimized, {}});
      sc.estimators.push_back({EstimatorKind::Upper, {}});
    }
    sc.lower.restarts = opts.lower_restarts;
    sc.upper.restarts = opts.upper_restarts;
    // The quasi-pure curve is followed up to the eigenvalue crossing.
    sc.qp.min_leading = 0.0;
    sc.seed = opts.seed;
    out.push_back(std::move(sc));
  }
  return out;
}

Bundle scenario_fig1(const Fig1Options& opts) {
  Bundle b;
  b.name = "fig1";
  b.runs = run_bundle(fig1_scenarios(opts));
  for (const auto& run : b.runs) {
    for (const auto& col : run.estimator_columns) b.fits.push_back(fit_exponent(run, col));
  }
  return b;
}

std::vector<Scenario> fig2_scenarios(const Fig2Options& opts) {
  const auto base = [&](const std::string& name, int d, const EnvironmentModel& model,
                        double t_max) {
    Scenario sc;
    sc.name = name;
    sc.dims = HilbertDims(d, d);
    sc.state.kind = StateKind::Bell;
    sc.state.bell = BellKind::PsiPlus;
    sc.model = model;
    sc.grid = {t_max, opts.points};
    sc.qp.min_leading = 0.0;
    sc.seed = opts.seed;
    return sc;
  };
  const auto tag = [](double nbar) {
    std::ostringstream os;
    os << nbar;
    return os.str();
  };
  const EstimatorSpec qp{EstimatorKind::QuasiPure, {}};
  const EstimatorSpec wo{EstimatorKind::Wootters, {}};

  std::vector<Scenario> out;
  for (const double nbar : opts.nbars) {
    Scenario q = base("fig2_qubit_nbar" + tag(nbar), 2, EnvironmentModel::thermal(1.0, nbar),
                      opts.t_max);
    q.estimators = {wo, qp, {EstimatorKind::Analytic, "bell_thermal"}};
    out.push_back(std::move(q));
  }
  Scenario zero = base("fig2_qubit_zero_temperature", 2, EnvironmentModel::zero_temperature(1.0),
                       opts.t_max);
  zero.estimators = {wo, {EstimatorKind::Analytic, "bell_zero_temperature"}};
  out.push_back(std::move(zero));
  Scenario inf = base("fig2_qubit_infinite_temperature", 2,
                      EnvironmentModel::infinite_temperature(1.0), opts.t_max);
  inf.estimators = {wo, {EstimatorKind::Analytic, "bell_infinite_temperature"}};
  out.push_back(std::move(inf));

  const std::string dtag = "fig2_d" + std::to_string(opts.d);
  for (const double nbar : opts.nbars) {
    Scenario q = base(dtag + "_nbar" + tag(nbar), opts.d, EnvironmentModel::thermal(1.0, nbar),
                      opts.t_max);
    q.estimators = {qp};
    out.push_back(std::move(q));
  }
  Scenario qinf = base(dtag + "_infinite_temperature", opts.d,
                       EnvironmentModel::infinite_temperature(1.0), opts.t_max_infinite);
  qinf.estimators = {qp};
  out.push_back(std::move(qinf));
  return out;
}

Bundle scenario_fig2(const Fig2Options& opts) {
  Bundle b;
  b.name = "fig2";
  b.runs = run_bundle(fig2_scenarios(opts));
  for (const auto& run : b.runs) {
    if (run.column_index("quasipure") >= 0) b.fits.push_back(fit_exponent(run, "quasipure"));
  }
  return b;
}

std::vector<OverlayComparison> compare_fig2(const Bundle& bundle, double t_lo, double t_hi) {
  std::vector<OverlayComparison> out;
  for (const auto& run : bundle.runs) {
    const Scenario& sc = run.scenario;
    const int col = run.column_index("quasipure");
    if (col < 0 || sc.dims.d1() == 2 || sc.model.kind != EnvironmentKind::Thermal) continue;
    const OracleSpec oracle = make_oracle(
        "bell_thermal", {{"gamma", format_double(sc.model.gamma)}, {"nbar", format_double(sc.model.nbar)}});
    OverlayComparison cmp;
    cmp.run = sc.name;
    cmp.nbar = sc.model.nbar;
    cmp.max_excess = -std::numeric_limits<double>::infinity();
    for (const auto& rec : run.records) {
      if (!(rec.t > t_lo && rec.t <= t_hi)) continue;
      ++cmp.rows;
      if (!rec.valid[static_cast<std::size_t>(col)]) ++cmp.invalid_rows;
      const double excess = rec.values[static_cast<std::size_t>(col)] - oracle.evaluate(rec.t);
      cmp.max_excess = std::isnan(excess) ? std::numeric_limits<double>::infinity()
                                          : std::max(cmp.max_excess, excess);
    }
    out.push_back(cmp);
  }
  return out;
}

}  // namespace qent
