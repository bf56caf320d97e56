#include "swave/wave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swave/errors.hpp"
#include "swave/format.hpp"
#include "swave/parallel.hpp"

namespace swave {

namespace {

Eigen::VectorXd to_vector(const SpectralCoeffs& c) {
  const auto v = c.values();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

SpectralCoeffs to_coeffs(const BasisPtr& basis, const Eigen::VectorXd& v) {
  return SpectralCoeffs(basis, std::vector<double>(v.data(), v.data() + v.size()));
}

void require_finite(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double t) {
  if (!u.allFinite() || !v.allFinite()) {
    throw NumericalError("solution left the finite range at t = " + format_double(t));
  }
}

Eigen::VectorXd fractional_eigenvalues(const SpectralBasis& basis, double s) {
  require_power_defined(basis, s);
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t n = 0; n < basis.size(); ++n) out[static_cast<Eigen::Index>(n)] = eigenvalue_power(basis.lambda(n), s);
  return out;
}

Eigen::MatrixXd modes_matrix(const SpectralBasis& basis) {
  const auto rows = static_cast<Eigen::Index>(basis.grid().size());
  const auto cols = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd phi(rows, cols);
  for (Eigen::Index n = 0; n < cols; ++n) {
    const auto col = basis.phi(static_cast<std::size_t>(n)).values();
    phi.col(n) = Eigen::Map<const Eigen::VectorXd>(col.data(), rows);
  }
  return phi;
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem setup

void WaveProblem::validate() const {
  if (!basis) throw InvalidArgument("wave problem has no basis");
  if (!(s >= 0.0)) throw InvalidArgument("fractional order s must be >= 0, got " + format_double(s));
  require_same_grid(a.grid(), basis->grid(), "wave problem coefficient a");
  require_same_grid(b.grid(), basis->grid(), "wave problem coefficient b");
  if (u0.basis() != basis || u1.basis() != basis) {
    throw GridMismatch("wave problem data must be expanded in the problem basis");
  }
  if (a.min() < 0.0) throw InvalidArgument("coefficient a must be nonnegative, min = " + format_double(a.min()));
  if (b.min() < 0.0) throw InvalidArgument("coefficient b must be nonnegative, min = " + format_double(b.min()));
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive, got " + format_double(dt));
  if (!(T >= dt)) throw InvalidArgument("final time T must be >= dt");
}

double default_time_step(const SpectralBasis& basis, double s, double T) {
  const double top = eigenvalue_power(basis.lambda(basis.size() - 1), s);
  const double resolve = top > 0.0 ? 0.5 / std::sqrt(top) : T / 200.0;
  return std::min(resolve, T / 200.0);
}

WaveProblem make_problem(double s, BasisPtr basis, SpectralCoeffs u0, SpectralCoeffs u1, double T,
                         double dt) {
  const Grid grid = basis->grid();
  if (dt <= 0.0) dt = default_time_step(*basis, s, T);
  WaveProblem p{s, basis, GridFunction::zeros(grid), GridFunction::zeros(grid), std::move(u0), std::move(u1), T, dt};
  p.validate();
  return p;
}

std::vector<double> time_grid(double T, double dt) {
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = T * static_cast<double>(k) / static_cast<double>(steps);
  return t;
}

// ---------------------------------------------------------------------------
// Free series

WaveSolution solve_free_series(const WaveProblem& problem) {
  problem.validate();
  if (!problem.a.is_zero() || !problem.b.is_zero()) {
    throw NonZeroCoupling("series solution needs a = b = 0; use solve_galerkin");
  }
  const SpectralBasis& basis = *problem.basis;
  const Eigen::VectorXd mu = fractional_eigenvalues(basis, problem.s);
  if ((mu.array() < 0.0).any()) throw NegativeSpectrum("lambda_n^s < 0: the free equation is not oscillatory");
  const Eigen::VectorXd omega = mu.array().sqrt();
  const Eigen::VectorXd A = to_vector(problem.u0);
  const Eigen::VectorXd B = to_vector(problem.u1);

  WaveSolution sol;
  sol.problem = std::make_shared<const WaveProblem>(problem);
  sol.times = time_grid(problem.T, problem.dt);
  const auto m = static_cast<Eigen::Index>(basis.size());
  sol.u.reserve(sol.times.size());
  sol.v.reserve(sol.times.size());
  sol.u.push_back(problem.u0);
  sol.v.push_back(problem.u1);
  for (std::size_t k = 1; k < sol.times.size(); ++k) {
    const double t = sol.times[k];
    Eigen::VectorXd u(m), v(m);
    for (Eigen::Index n = 0; n < m; ++n) {
      const double w = omega[n];
      if (w == 0.0) {
        u[n] = A[n] + B[n] * t;
        v[n] = B[n];
      } else {
        const double c = std::cos(w * t), s = std::sin(w * t);
        u[n] = A[n] * c + B[n] / w * s;
        v[n] = -w * A[n] * s + B[n] * c;
      }
    }
    sol.u.push_back(to_coeffs(problem.basis, u));
    sol.v.push_back(to_coeffs(problem.basis, v));
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Galerkin

Eigen::MatrixXd assemble_coupling(const GridFunction& a, const SpectralBasis& basis) {
  require_same_grid(a.grid(), basis.grid(), "assemble_coupling");
  const auto m = static_cast<Eigen::Index>(basis.size());
  if (a.is_zero()) return Eigen::MatrixXd::Zero(m, m);
  const Eigen::MatrixXd phi = modes_matrix(basis);
  const auto av = a.values();
  const Eigen::Map<const Eigen::VectorXd> weights(av.data(), static_cast<Eigen::Index>(av.size()));
  Eigen::MatrixXd coupling = basis.grid().h() * (phi.transpose() * weights.asDiagonal() * phi);
  return 0.5 * (coupling + coupling.transpose());
}

Eigen::MatrixXd stiffness_matrix(const WaveProblem& problem) {
  Eigen::MatrixXd k = assemble_coupling(problem.a, *problem.basis);
  k.diagonal() += fractional_eigenvalues(*problem.basis, problem.s);
  return k;
}

TrapezoidStepper::TrapezoidStepper(Eigen::MatrixXd stiffness, Eigen::MatrixXd damping, double dt)
    : k_(std::move(stiffness)), b_(std::move(damping)), dt_(dt) {
  const auto m = k_.rows();
  const Eigen::MatrixXd step = Eigen::MatrixXd::Identity(m, m) + 0.5 * dt_ * b_ + 0.25 * dt_ * dt_ * k_;
  lu_.compute(step);
  const double rcond = lu_.rcond();
  if (!(rcond > 1e3 * std::numeric_limits<double>::epsilon())) {
    throw NumericalError("trapezoidal step matrix is singular (rcond = " + format_double(rcond) + ")");
  }
  velocity_rhs_ = 0.5 * dt_ * b_ + 0.25 * dt_ * dt_ * k_;
}

void TrapezoidStepper::step(Eigen::VectorXd& u, Eigen::VectorXd& v) const {
  const Eigen::VectorXd rhs = v - dt_ * (k_ * u) - velocity_rhs_ * v;
  const Eigen::VectorXd v_next = lu_.solve(rhs);
  u += 0.5 * dt_ * (v + v_next);
  v = v_next;
}

namespace {

TrapezoidStepper make_stepper(const WaveProblem& problem, double dt) {
  return TrapezoidStepper(stiffness_matrix(problem), assemble_coupling(problem.b, *problem.basis), dt);
}

}  // namespace

WaveSolution solve_galerkin(const WaveProblem& problem) {
  problem.validate();
  WaveSolution sol;
  sol.problem = std::make_shared<const WaveProblem>(problem);
  sol.times = time_grid(problem.T, problem.dt);
  const TrapezoidStepper stepper = make_stepper(problem, sol.times[1] - sol.times[0]);

  Eigen::VectorXd u = to_vector(problem.u0);
  Eigen::VectorXd v = to_vector(problem.u1);
  sol.u.reserve(sol.times.size());
  sol.v.reserve(sol.times.size());
  sol.u.push_back(problem.u0);
  sol.v.push_back(problem.u1);
  for (std::size_t k = 1; k < sol.times.size(); ++k) {
    stepper.step(u, v);
    require_finite(u, v, sol.times[k]);
    sol.u.push_back(to_coeffs(problem.basis, u));
    sol.v.push_back(to_coeffs(problem.basis, v));
  }
  return sol;
}

WaveSolution solve_duhamel(const WaveProblem& problem, const std::vector<SpectralCoeffs>& forcing,
                           std::size_t threads) {
  WaveSolution sol = solve_galerkin(problem);
  const std::size_t steps = sol.steps();
  if (forcing.size() != steps + 1) {
    throw InvalidArgument("forcing has " + std::to_string(forcing.size()) + " samples, solver grid has " +
                          std::to_string(steps + 1));
  }
  for (const auto& f : forcing) {
    if (f.basis() != problem.basis) throw GridMismatch("forcing must be expanded in the problem basis");
  }
  const double dt = sol.step_size();
  const TrapezoidStepper stepper = make_stepper(problem, dt);
  const auto m = static_cast<Eigen::Index>(problem.basis->size());

  // Accumulators per worker; summed in worker order for reproducibility.
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, steps));
  std::vector<std::vector<Eigen::VectorXd>> acc_u(workers, std::vector<Eigen::VectorXd>(steps + 1, Eigen::VectorXd::Zero(m)));
  std::vector<std::vector<Eigen::VectorXd>> acc_v = acc_u;

  // Auxiliary problem started at tau_j with v(tau_j) = 0, v_t(tau_j) = f(tau_j).
  // Trapezoid weights in tau: 1/2 at tau_0 and at tau_k, 1 in between.
  rethrow_first(parallel_for(workers, workers, [&](std::size_t w) {
    for (std::size_t j = w; j < steps; j += workers) {
      const double weight = (j == 0 ? 0.5 : 1.0) * dt;
      Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
      Eigen::VectorXd v = to_vector(forcing[j]);
      if (j > 0) acc_v[w][j] += 0.5 * dt * v;
      for (std::size_t k = j + 1; k <= steps; ++k) {
        stepper.step(u, v);
        require_finite(u, v, sol.times[k]);
        acc_u[w][k] += weight * u;
        acc_v[w][k] += weight * v;
      }
    }
  }));

  Eigen::VectorXd last = to_vector(forcing[steps]);
  for (std::size_t k = 1; k <= steps; ++k) {
    Eigen::VectorXd u = to_vector(sol.u[k]);
    Eigen::VectorXd v = to_vector(sol.v[k]);
    for (std::size_t w = 0; w < workers; ++w) {
      u += acc_u[w][k];
      v += acc_v[w][k];
    }
    if (k == steps) v += 0.5 * dt * last;
    sol.u[k] = to_coeffs(problem.basis, u);
    sol.v[k] = to_coeffs(problem.basis, v);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Energy

EnergyTrace energy_trace(const WaveSolution& sol) {
  const WaveProblem& p = *sol.problem;
  const Eigen::VectorXd mu = fractional_eigenvalues(*p.basis, p.s);
  const Eigen::MatrixXd A = assemble_coupling(p.a, *p.basis);
  EnergyTrace tr;
  tr.times = sol.times;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const Eigen::VectorXd u = to_vector(sol.u[k]);
    const Eigen::VectorXd v = to_vector(sol.v[k]);
    const double kin = v.squaredNorm();
    const double pot = (mu.array() * u.array().square()).sum();
    const double pa = u.dot(A * u);
    tr.kinetic.push_back(kin);
    tr.potential_ls.push_back(pot);
    tr.potential_a.push_back(pa);
    tr.E.push_back(kin + pot + pa);
  }
  return tr;
}

std::vector<double> energy_identity_residuals(const WaveSolution& sol) {
  const EnergyTrace tr = energy_trace(sol);
  const Eigen::MatrixXd B = assemble_coupling(sol.problem->b, *sol.problem->basis);
  std::vector<double> dissipation;
  for (const auto& v : sol.v) {
    const Eigen::VectorXd x = to_vector(v);
    dissipation.push_back(x.dot(B * x));
  }
  std::vector<double> res;
  for (std::size_t k = 0; k + 1 < tr.E.size(); ++k) {
    const double dt = sol.times[k + 1] - sol.times[k];
    res.push_back(std::abs(tr.E[k + 1] - tr.E[k] + dt * (dissipation[k] + dissipation[k + 1])));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Estimates

std::string variant_name(EstimateVariant v) {
  switch (v) {
    case EstimateVariant::Free: return "free";
    case EstimateVariant::GeneralS: return "general_s";
    case EstimateVariant::SEqualsOne: return "s_equals_1";
  }
  return "unknown";
}

EstimateVariant variant_from_name(const std::string& name) {
  if (name == "free") return EstimateVariant::Free;
  if (name == "general_s") return EstimateVariant::GeneralS;
  if (name == "s_equals_1") return EstimateVariant::SEqualsOne;
  throw InvalidArgument("unknown estimate variant '" + name + "'");
}

EstimateReport check_estimates(const WaveSolution& sol, EstimateVariant variant) {
  const WaveProblem& p = *sol.problem;
  const double s = p.s;
  double lhs_l2 = 0.0, lhs_ws = 0.0, lhs_vel = 0.0;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    lhs_l2 = std::max(lhs_l2, sobolev_norm(sol.u[k], 0.0));
    lhs_ws = std::max(lhs_ws, sobolev_norm(sol.u[k], s));
    lhs_vel = std::max(lhs_vel, sobolev_norm(sol.v[k], 0.0));
  }
  const double u0_l2 = sobolev_norm(p.u0, 0.0);
  const double u0_ws = sobolev_norm(p.u0, s);
  const double u1_l2 = sobolev_norm(p.u1, 0.0);

  EstimateReport report;
  report.variant = variant;
  auto add = [&](const char* quantity, double lhs, double rhs) {
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    report.entries.push_back({quantity, lhs, rhs, ratio});
    report.max_ratio = std::max(report.max_ratio, ratio);
  };

  switch (variant) {
    case EstimateVariant::Free: {
      const double u1_wminus = sobolev_norm(p.u1, -s);
      add("u_L2", lhs_l2, u0_l2 + u1_wminus);
      add("u_Ws", lhs_ws, u0_ws + u1_l2);
      add("u_t_L2", lhs_vel, u0_ws + u1_l2);
      break;
    }
    case EstimateVariant::GeneralS: {
      const double factor = 1.0 + p.a.max_abs() + p.b.max_abs();
      const double rhs = factor * (u0_ws + u1_l2);
      add("u_L2", lhs_l2, rhs);
      add("u_Ws", lhs_ws, rhs);
      add("u_t_L2", lhs_vel, rhs);
      break;
    }
    case EstimateVariant::SEqualsOne: {
      if (s != 1.0) throw InvalidArgument("the s_equals_1 estimate needs s = 1");
      const double u0_dd = l2_norm(second_difference(synthesize(p.u0)));
      const double factor =
          (1.0 + p.basis->potential().max_abs()) * (1.0 + p.a.max_abs()) * (1.0 + p.b.max_abs());
      const double rhs = factor * (u0_l2 + u0_dd + u1_l2);
      add("u_L2", lhs_l2, rhs);
      add("u_W1", lhs_ws, rhs);
      add("u_t_L2", lhs_vel, rhs);
      break;
    }
  }
  return report;
}

nlohmann::json to_json(const EstimateReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  const EstimateEntry* worst = nullptr;
  for (const auto& e : report.entries) {
    entries.push_back({{"quantity", e.quantity}, {"lhs_max", e.lhs_max}, {"rhs", e.rhs}, {"ratio", e.ratio}});
    if (!worst || e.ratio > worst->ratio) worst = &e;
  }
  nlohmann::json j{{"variant", variant_name(report.variant)}, {"entries", entries}, {"ratio", report.max_ratio}};
  if (worst) {
    j["lhs_max"] = worst->lhs_max;
    j["rhs"] = worst->rhs;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Export

void write_solution_csv(std::ostream& out, const WaveSolution& sol) {
  const std::size_t m = sol.problem->basis->size();
  out << 't';
  for (std::size_t n = 1; n <= m; ++n) out << ",u" << n;
  for (std::size_t n = 1; n <= m; ++n) out << ",v" << n;
  out << '\n';
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    out << format_double(sol.times[k]);
    for (double c : sol.u[k].values()) out << ',' << format_double(c);
    for (double c : sol.v[k].values()) out << ',' << format_double(c);
    out << '\n';
  }
}

void write_energy_csv(std::ostream& out, const EnergyTrace& trace) {
  out << "t,E,E_kinetic,E_potential_Ls,E_potential_a\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    out << format_double(trace.times[k]) << ',' << format_double(trace.E[k]) << ','
        << format_double(trace.kinetic[k]) << ',' << format_double(trace.potential_ls[k]) << ','
        << format_double(trace.potential_a[k]) << '\n';
  }
}

}  // namespace swave
