#include "qent/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qent/errors.hpp"

namespace qent {

EnvironmentModel EnvironmentModel::dephasing(double gamma, Ladder ladder) {
  return {EnvironmentKind::Dephasing, gamma, 0.0, ladder};
}

EnvironmentModel EnvironmentModel::thermal(double gamma, double nbar, Ladder ladder) {
  return {EnvironmentKind::Thermal, gamma, nbar, ladder};
}

EnvironmentModel EnvironmentModel::zero_temperature(double gamma, Ladder ladder) {
  return thermal(gamma, 0.0, ladder);
}

EnvironmentModel EnvironmentModel::infinite_temperature(double gamma_tilde, Ladder ladder) {
  return {EnvironmentKind::InfiniteTemperature, gamma_tilde, 0.0, ladder};
}

void EnvironmentModel::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("environment rate must be finite and >= 0");
  }
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw ConfigError("mean thermal occupation nbar must be finite and >= 0");
  }
}

std::string EnvironmentModel::describe() const {
  std::ostringstream os;
  switch (kind) {
    case EnvironmentKind::Dephasing:
      os << "dephasing(gamma=" << gamma << ")";
      break;
    case EnvironmentKind::Thermal:
      os << "thermal(gamma=" << gamma << ", nbar=" << nbar << ")";
      break;
    case EnvironmentKind::InfiniteTemperature:
      os << "infinite_temperature(gamma_tilde=" << gamma << ")";
      break;
  }
  os << (ladder == Ladder::QubitSigma ? " qubit" : " bosonic");
  return os.str();
}

CMatrix annihilation(int d) {
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix creation(int d) { return annihilation(d).adjoint(); }

CMatrix number_operator(int d) {
  CMatrix num = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) num(n, n) = static_cast<double>(n);
  return num;
}

namespace {

void check_ladder(Ladder ladder, int d) {
  if (d < 2) throw DomainError("local dimension must be >= 2");
  if (ladder == Ladder::QubitSigma && d != 2) {
    throw ConfigError("qubit sigma operators require local dimension 2, got " +
                      std::to_string(d));
  }
}

// For d = 2 the bosonic ladder coincides with sigma_-, so one construction
// serves both variants.
CMatrix lowering(int d) { return annihilation(d); }

}  // namespace

std::vector<JumpTerm> zero_temperature_jump_operators(double gamma, int d, Ladder ladder) {
  check_ladder(ladder, d);
  if (gamma == 0.0) return {};
  return {{lowering(d), gamma}};
}

std::vector<JumpTerm> local_jump_operators(const EnvironmentModel& model, int d) {
  model.validate();
  check_ladder(model.ladder, d);
  std::vector<JumpTerm> out;
  auto push = [&out](CMatrix op, double rate) {
    if (rate > 0.0) out.push_back({std::move(op), rate});
  };
  switch (model.kind) {
    case EnvironmentKind::Dephasing:
      push(number_operator(d), model.gamma);
      break;
    case EnvironmentKind::Thermal:
      push(lowering(d), model.gamma * (model.nbar + 1.0));
      push(lowering(d).adjoint(), model.gamma * model.nbar);
      break;
    case EnvironmentKind::InfiniteTemperature:
      push(lowering(d), model.gamma);
      push(lowering(d).adjoint(), model.gamma);
      break;
  }
  return out;
}

Generator::Generator(HilbertDims dims, const EnvironmentModel& model) : dims_(dims) {
  for (auto& term : local_jump_operators(model, dims.d1())) {
    jumps_.push_back({Site::First, std::move(term.op), term.rate});
  }
  for (auto& term : local_jump_operators(model, dims.d2())) {
    jumps_.push_back({Site::Second, std::move(term.op), term.rate});
  }
}

Generator::Generator(HilbertDims dims, std::vector<LocalJump> jumps)
    : dims_(dims), jumps_(std::move(jumps)) {}

CMatrix Generator::apply(const CMatrix& rho) const {
  CMatrix out;
  kernels::lindblad_apply_parallel(dims_, jumps_, rho, out);
  return out;
}

CMatrix Generator::superoperator() const {
  const int n = dims_.total();
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix sup = CMatrix::Zero(n * n, n * n);
  // vec(A X B) = (B^T (x) A) vec(X)
  for (const auto& jump : jumps_) {
    const CMatrix l = kernels::lift(jump.site, jump.op, dims_);
    const CMatrix ldl = l.adjoint() * l;
    sup += jump.rate * CMatrix(Eigen::kroneckerProduct(l.conjugate(), l));
    sup -= 0.5 * jump.rate * CMatrix(Eigen::kroneckerProduct(id, ldl));
    sup -= 0.5 * jump.rate * CMatrix(Eigen::kroneckerProduct(ldl.transpose(), id));
  }
  return sup;
}

CMatrix apply_generator(const Generator& gen, const DensityMatrix& rho) {
  if (!(gen.dims() == rho.dims())) {
    throw DomainError("generator and density matrix dimensions differ");
  }
  return gen.apply(rho.matrix());
}

Propagator::Propagator(Generator gen, const DensityMatrix& rho0, IntegratorConfig cfg)
    : gen_(std::move(gen)), cfg_(cfg), state_(rho0.matrix()), step_(cfg.initial_step) {
  if (!(gen_.dims() == rho0.dims())) {
    throw DomainError("generator and initial state dimensions differ");
  }
  if (cfg_.method == IntegratorMethod::MatrixExponential) {
    if (gen_.dims().total() > kMaxExponentialDim) {
      throw ConfigError("matrix-exponential backend limited to N <= 16");
    }
    superop_ = gen_.superoperator();
  }
  if (cfg_.method == IntegratorMethod::Rk4Fixed && !(cfg_.fixed_step > 0.0)) {
    throw ConfigError("fixed RK4 step must be positive");
  }
  if (cfg_.method == IntegratorMethod::Rk4Adaptive &&
      (!(cfg_.abs_tol > 0.0) || !(cfg_.initial_step > 0.0))) {
    throw ConfigError("adaptive RK4 needs positive tolerance and initial step");
  }
}

CMatrix Propagator::rk4(const CMatrix& y, const CMatrix& k1, double h) const {
  const CMatrix k2 = gen_.apply(y + (0.5 * h) * k1);
  const CMatrix k3 = gen_.apply(y + (0.5 * h) * k2);
  const CMatrix k4 = gen_.apply(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void Propagator::step_adaptive(double t_end) {
  while (time_ < t_end) {
    const double remaining = t_end - time_;
    const bool last = step_ >= remaining;
    const double h = last ? remaining : step_;

    const CMatrix k1 = gen_.apply(state_);
    const CMatrix full = rk4(state_, k1, h);
    const CMatrix half = rk4(state_, k1, 0.5 * h);
    const CMatrix twice = rk4(half, gen_.apply(half), 0.5 * h);
    const CMatrix diff = twice - full;
    const double err = diff.cwiseAbs().maxCoeff() / 15.0;

    const double factor =
        err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(cfg_.abs_tol / err, 0.2), 0.2, 4.0);
    if (err <= cfg_.abs_tol) {
      state_ = hermitian_part(twice + diff / 15.0);
      time_ = last ? t_end : time_ + h;
      ++steps_;
      // A short final step says nothing about the natural step size.
      if (!last || h >= step_) step_ = h * factor;
    } else {
      step_ = h * factor;
      if (step_ < cfg_.min_step) {
        throw NumericError("adaptive RK4 step size underflow (h = " +
                           std::to_string(step_) + ", error " + std::to_string(err) +
                           ")");
      }
    }
    if (steps_ > cfg_.max_steps) throw NumericError("adaptive RK4 exceeded max_steps");
  }
}

void Propagator::step_fixed(double t_end) {
  while (time_ < t_end) {
    const double h = std::min(cfg_.fixed_step, t_end - time_);
    state_ = hermitian_part(rk4(state_, gen_.apply(state_), h));
    time_ = (t_end - time_ <= cfg_.fixed_step) ? t_end : time_ + h;
    ++steps_;
  }
}

void Propagator::step_exponential(double t_end) {
  const int n = gen_.dims().total();
  const CMatrix prop = (superop_ * (t_end - time_)).exp();
  CVector vec = Eigen::Map<const CVector>(state_.data(), n * n);
  CVector next = prop * vec;
  state_ = hermitian_part(Eigen::Map<const CMatrix>(next.data(), n, n));
  time_ = t_end;
  ++steps_;
}

DensityMatrix Propagator::checked_state() const {
  return DensityMatrix::from_integrator(gen_.dims(), state_, cfg_.integrity_tol);
}

DensityMatrix Propagator::advance_to(double t) {
  if (!(t >= time_)) {
    throw DomainError("propagation target " + std::to_string(t) +
                      " precedes current time " + std::to_string(time_));
  }
  if (t > time_) {
    switch (cfg_.method) {
      case IntegratorMethod::Rk4Adaptive:
        step_adaptive(t);
        break;
      case IntegratorMethod::Rk4Fixed:
        step_fixed(t);
        break;
      case IntegratorMethod::MatrixExponential:
        step_exponential(t);
        break;
    }
  }
  return checked_state();
}

DensityMatrix propagate(const DensityMatrix& rho0, const EnvironmentModel& model,
                        double t, const IntegratorConfig& cfg) {
  if (!(t >= 0.0)) throw DomainError("propagation time must be >= 0");
  if (t == 0.0) return rho0;
  Propagator prop(Generator(rho0.dims(), model), rho0, cfg);
  return prop.advance_to(t);
}

Trajectory evolve_trajectory(const DensityMatrix& rho0, const EnvironmentModel& model,
                             const std::vector<double>& times,
                             const IntegratorConfig& cfg) {
  if (times.empty() || times.front() != 0.0) {
    throw DomainError("trajectory time grid must start at t = 0");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw DomainError("trajectory time grid must be strictly increasing");
    }
  }
  Trajectory traj{{}, {}, model};
  traj.times = times;
  traj.states.reserve(times.size());
  traj.states.push_back(rho0);
  Propagator prop(Generator(rho0.dims(), model), rho0, cfg);
  for (std::size_t i = 1; i < times.size(); ++i) {
    try {
      traj.states.push_back(prop.advance_to(times[i]));
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at t = " + std::to_string(times[i]));
    } catch (const IntegrityError& e) {
      throw IntegrityError(std::string(e.what()) + " at t = " + std::to_string(times[i]));
    }
  }
  return traj;
}

}  // namespace qent
