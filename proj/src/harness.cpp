#include "swave/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swave/errors.hpp"
#include "swave/format.hpp"
#include "swave/parallel.hpp"
#include "swave/serialization.hpp"

namespace swave {

std::string case_name(ProblemCase c) { return c == ProblemCase::GeneralS ? "general_s" : "s_equals_1"; }

ProblemCase case_from_name(const std::string& name) {
  if (name == "general_s") return ProblemCase::GeneralS;
  if (name == "s_equals_1") return ProblemCase::SEqualsOne;
  throw InvalidArgument("unknown problem case '" + name + "' (expected general_s or s_equals_1)");
}

GridFunction sample_data(const DataSpec& data, const Grid& grid) {
  if (data.spec) return sample_unregularized(*data.spec, grid);
  return GridFunction::sample(grid, [&](double x) {
    double v = 0.0;
    for (std::size_t n = 0; n < data.sine_coeffs.size(); ++n) {
      v += data.sine_coeffs[n] * std::numbers::sqrt2 * std::sin(static_cast<double>(n + 1) * std::numbers::pi * x);
    }
    return v;
  });
}

void VeryWeakProblem::validate(bool check_epsilons) const {
  if (!(s >= 0.0)) throw InvalidArgument("s must be >= 0");
  if (problem_case == ProblemCase::GeneralS && q.is_singular()) {
    throw InvalidArgument("case general_s needs a regular potential q; use case s_equals_1 for singular q");
  }
  if (problem_case == ProblemCase::SEqualsOne && s != 1.0) {
    throw InvalidArgument("case s_equals_1 fixes s = 1, got s = " + format_double(s));
  }
  a.validate();
  b.validate();
  q.validate();
  if (u0.spec) u0.spec->validate();
  if (u1.spec) u1.spec->validate();
  const Grid g = grid();
  check_mode_resolution(n_interior, modes);
  if (check_epsilons && epsilons.empty()) throw InvalidArgument("epsilon list is empty");
  for (std::size_t i = 0; check_epsilons && i < epsilons.size(); ++i) {
    check_epsilon(epsilons[i], g);
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw InvalidArgument("epsilons must be strictly decreasing");
  }
  if (!(T > 0.0)) throw InvalidArgument("final time T must be positive");
  if (dt < 0.0 || (dt > 0.0 && dt > T)) throw InvalidArgument("time step must satisfy 0 < dt <= T (or 0 for default)");
  if (threads == 0) throw InvalidArgument("thread count must be >= 1");
}

namespace {

CoefficientSpec as_nonnegative(CoefficientSpec spec) {
  spec.nonneg_required = true;
  return spec;
}

double safe_exponent(std::span<const double> eps, std::span<const double> norms) {
  if (eps.size() < 3) return 0.0;
  if (std::any_of(norms.begin(), norms.end(), [](double v) { return !(v > 0.0); })) return 0.0;
  return fit_moderateness(eps, norms, NormKind::Sup).fitted_N;
}

class NetSolver {
 public:
  explicit NetSolver(const VeryWeakProblem& p) : p_(p), grid_(p.grid()) {
    p_.validate();
    const std::size_t threads = p_.threads;
    a_net_ = build_net(as_nonnegative(p_.a), p_.kernel, p_.epsilons, grid_, threads);
    b_net_ = build_net(as_nonnegative(p_.b), p_.kernel, p_.epsilons, grid_, threads);
    if (p_.u0.spec) u0_net_ = build_net(*p_.u0.spec, p_.kernel, p_.epsilons, grid_, threads);
    if (p_.u1.spec) u1_net_ = build_net(*p_.u1.spec, p_.kernel, p_.epsilons, grid_, threads);

    if (p_.problem_case == ProblemCase::GeneralS) {
      q_fixed_ = sample_unregularized(p_.q, grid_);
      fixed_basis_ = build_basis(*q_fixed_, p_.modes);
      bases_.assign(p_.epsilons.size(), fixed_basis_);
    } else {
      q_net_ = build_net(p_.q, p_.kernel, p_.epsilons, grid_, threads);
      bases_.resize(p_.epsilons.size());
      rethrow_first(parallel_for(bases_.size(), threads, [&](std::size_t i) {
        bases_[i] = build_basis(q_net_->members[i], p_.modes);
      }));
    }
  }

  const BasisPtr& fixed_basis() const { return fixed_basis_; }

  double default_dt() const {
    double dt = p_.T;
    for (const auto& b : bases_) dt = std::min(dt, default_time_step(*b, p_.s, p_.T));
    return dt;
  }

  NetSolution solve(double dt, const MemberCallback& on_member) const {
    const std::size_t count = p_.epsilons.size();
    std::vector<std::optional<NetMember>> results(count);
    const auto errors = parallel_for(count, p_.threads, [&](std::size_t i) { results[i] = solve_one(i, dt); });

    NetSolution net;
    net.epsilons = p_.epsilons;
    net.dt = dt;
    for (std::size_t i = 0; i < count; ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      if (on_member) on_member(i, *results[i]);
      net.members.push_back(std::move(*results[i]));
    }

    std::vector<double> a, b, q, u0, u1, sol, bound;
    for (const auto& m : net.members) {
      a.push_back(m.a_sup);
      b.push_back(m.b_sup);
      q.push_back(m.q_sup);
      u0.push_back(m.u0_ws);
      u1.push_back(m.u1_l2);
      sol.push_back(m.solution_norm);
      bound.push_back(m.bound_constant);
    }
    auto& e = net.exponents;
    e.a = safe_exponent(net.epsilons, a);
    e.b = safe_exponent(net.epsilons, b);
    e.q = safe_exponent(net.epsilons, q);
    e.u0 = safe_exponent(net.epsilons, u0);
    e.u1 = safe_exponent(net.epsilons, u1);
    e.solution = safe_exponent(net.epsilons, sol);
    e.predicted = std::max(e.a, e.b) + std::max(e.u0, e.u1);
    net.bound_constant_trend = safe_exponent(net.epsilons, bound);
    return net;
  }

 private:
  GridFunction data_member(const DataSpec& data, const std::optional<RegularizedNet>& net, std::size_t i) const {
    if (net) return net->members[i];
    return sample_data(data, grid_);
  }

  NetMember solve_one(std::size_t i, double dt) const {
    const BasisPtr& basis = bases_[i];
    GridFunction u0 = data_member(p_.u0, u0_net_, i);
    GridFunction u1 = data_member(p_.u1, u1_net_, i);
    WaveProblem problem{p_.s,          basis,           a_net_->members[i], b_net_->members[i],
                        analyze(u0, basis), analyze(u1, basis), p_.T, dt};
    WaveSolution sol = solve_galerkin(problem);

    double norm = 0.0;
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
      norm = std::max(norm, solution_norm(sol.u[k], sol.v[k], p_.s));
    }
    NetMember m{p_.epsilons[i], problem.a, problem.b, std::move(u0), std::move(u1), std::move(sol), norm};
    m.a_sup = problem.a.max_abs();
    m.b_sup = problem.b.max_abs();
    m.q_sup = basis->potential().max_abs();
    m.u0_ws = sobolev_norm(problem.u0, p_.s);
    m.u0_l2 = sobolev_norm(problem.u0, 0.0);
    m.u0_dd = l2_norm(second_difference(synthesize(problem.u0)));
    m.u1_l2 = sobolev_norm(problem.u1, 0.0);
    double rhs = 0.0;
    if (p_.problem_case == ProblemCase::GeneralS) {
      rhs = (1.0 + m.a_sup + m.b_sup) * (m.u0_ws + m.u1_l2);
    } else {
      rhs = (1.0 + m.q_sup) * (1.0 + m.a_sup) * (1.0 + m.b_sup) * (m.u0_l2 + m.u0_dd + m.u1_l2);
    }
    m.bound_constant = rhs > 0.0 ? norm / rhs : 0.0;
    return m;
  }

  VeryWeakProblem p_;
  Grid grid_;
  std::optional<RegularizedNet> a_net_, b_net_, q_net_, u0_net_, u1_net_;
  std::optional<GridFunction> q_fixed_;
  BasisPtr fixed_basis_;
  std::vector<BasisPtr> bases_;
};

double sup_norm_of_coeffs(const SpectralCoeffs& c) { return sobolev_norm(c, 0.0); }

double trapezoid_in_time(const WaveSolution& sol, bool velocity) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < sol.times.size(); ++k) {
    const auto& c0 = velocity ? sol.v[k] : sol.u[k];
    const auto& c1 = velocity ? sol.v[k + 1] : sol.u[k + 1];
    total += 0.5 * (sol.times[k + 1] - sol.times[k]) * (sup_norm_of_coeffs(c0) + sup_norm_of_coeffs(c1));
  }
  return total;
}

}  // namespace

NetSolution solve_net(const VeryWeakProblem& p, const MemberCallback& on_member) {
  NetSolver solver(p);
  return solver.solve(p.dt > 0.0 ? p.dt : solver.default_dt(), on_member);
}

double sup_l2_distance(const WaveSolution& u, const WaveSolution& w) {
  if (u.times.size() != w.times.size()) throw InvalidArgument("solutions use different time grids");
  double sup = 0.0;
  const bool same_basis = u.problem->basis == w.problem->basis;
  for (std::size_t k = 0; k < u.times.size(); ++k) {
    double d = 0.0;
    if (same_basis) {
      double sum = 0.0;
      for (std::size_t n = 0; n < u.u[k].size(); ++n) {
        const double x = u.u[k][n] - w.u[k][n];
        sum += x * x;
      }
      d = std::sqrt(sum);
    } else {
      d = l2_norm(synthesize(u.u[k]) - synthesize(w.u[k]));
    }
    sup = std::max(sup, d);
  }
  return sup;
}

UniquenessResult uniqueness_experiment(const VeryWeakProblem& p, const MollifierKernel& kernel_b,
                                       const MemberCallback& on_member) {
  VeryWeakProblem pb = p;
  pb.kernel = kernel_b;
  NetSolver solver_a(p);
  NetSolver solver_b(pb);
  const double dt = p.dt > 0.0 ? p.dt : std::min(solver_a.default_dt(), solver_b.default_dt());

  UniquenessResult result;
  result.net_a = solver_a.solve(dt, on_member);
  result.net_b = solver_b.solve(dt, {});

  std::vector<double> diffs;
  for (std::size_t i = 0; i < p.epsilons.size(); ++i) {
    const NetMember& ma = result.net_a.members[i];
    const NetMember& mb = result.net_b.members[i];
    diffs.push_back(sup_l2_distance(ma.solution, mb.solution));

    const BasisPtr& basis = ma.solution.problem->basis;
    const double data_ws = sobolev_norm(analyze(ma.u0 - mb.u0, basis), p.s);
    const double data_l2 = l2_norm(ma.u1 - mb.u1);
    const double a_diff = (ma.a - mb.a).max_abs();
    const double b_diff = (ma.b - mb.b).max_abs();
    double inner = data_ws + data_l2 + a_diff * trapezoid_in_time(mb.solution, false) +
                   b_diff * trapezoid_in_time(mb.solution, true);
    if (p.problem_case == ProblemCase::SEqualsOne) {
      const double q_diff =
          (ma.solution.problem->basis->potential() - mb.solution.problem->basis->potential()).max_abs();
      inner += q_diff * trapezoid_in_time(mb.solution, false);
    }
    const double bound = (1.0 + ma.a_sup + ma.b_sup) * inner;
    result.bound.push_back(bound);
    result.bound_ratio.push_back(bound > 0.0 ? diffs.back() / bound : (diffs.back() > 0.0 ? INFINITY : 0.0));
  }
  result.report = make_decay_report(p.epsilons, diffs, "L2", "uniqueness: sup_t ||u_eps - u~_eps||");
  return result;
}

ConsistencyResult consistency_experiment(const VeryWeakProblem& p, const MemberCallback& on_member) {
  const auto singular = [](const CoefficientSpec& s) { return s.is_singular(); };
  if (singular(p.a) || singular(p.b) || singular(p.q) || p.u0.is_singular() || p.u1.is_singular()) {
    throw SpecNotSmooth("consistency needs regular coefficients and data");
  }
  NetSolver solver(p);
  const Grid grid = p.grid();
  BasisPtr basis = solver.fixed_basis();
  if (!basis) basis = build_basis(sample_unregularized(p.q, grid), p.modes);
  const double dt =
      p.dt > 0.0 ? p.dt : std::min(solver.default_dt(), default_time_step(*basis, p.s, p.T));

  WaveProblem classical{p.s,
                        basis,
                        sample_unregularized(p.a, grid),
                        sample_unregularized(p.b, grid),
                        analyze(sample_data(p.u0, grid), basis),
                        analyze(sample_data(p.u1, grid), basis),
                        p.T,
                        dt};
  ConsistencyResult result{ConvergenceReport{}, 0.0, solver.solve(dt, on_member), solve_galerkin(classical)};

  std::vector<double> errors;
  for (const auto& m : result.net.members) errors.push_back(sup_l2_distance(m.solution, result.classical));
  result.report = make_decay_report(p.epsilons, errors, "L2", "consistency: sup_t ||u_eps - u||");
  if (errors.size() >= 2) result.spearman = spearman(p.epsilons, errors);
  return result;
}

nlohmann::json to_json(const InputExponents& e) {
  return nlohmann::json{{"a", e.a},   {"b", e.b},        {"q", e.q},
                        {"u0", e.u0}, {"u1", e.u1},      {"solution", e.solution},
                        {"predicted_max_rule", e.predicted}};
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [eps, err] : r.table) table.push_back({{"eps", eps}, {"error", err}});
  return nlohmann::json{{"table", table},
                        {"fitted_order", number_or_sentinel(r.fitted_order)},
                        {"fit_residual", r.fit_residual},
                        {"norm_kind", r.norm_kind},
                        {"context", r.context}};
}

}  // namespace swave
