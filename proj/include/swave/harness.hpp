#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swave/fit.hpp"
#include "swave/regularization.hpp"
#include "swave/spectral.hpp"
#include "swave/wave.hpp"

namespace swave {

enum class ProblemCase { GeneralS, SEqualsOne };
std::string case_name(ProblemCase c);
ProblemCase case_from_name(const std::string& name);

/// Initial datum: either a coefficient spec (regularized per epsilon) or a
/// band-limited function sum_n c_n sqrt(2) sin(n pi x), which is fixed in
/// epsilon and expanded in whichever basis is in force.
struct DataSpec {
  std::optional<CoefficientSpec> spec;
  std::vector<double> sine_coeffs;

  static DataSpec from_spec(CoefficientSpec s) { return DataSpec{std::move(s), {}}; }
  static DataSpec band_limited(std::vector<double> c) { return DataSpec{std::nullopt, std::move(c)}; }
  static DataSpec zero() { return band_limited({}); }

  bool is_singular() const { return spec && spec->is_singular(); }
  bool operator==(const DataSpec&) const = default;
};

/// Unregularized samples of a band-limited or Smooth datum.
GridFunction sample_data(const DataSpec& data, const Grid& grid);

struct VeryWeakProblem {
  double s = 1.0;
  ProblemCase problem_case = ProblemCase::GeneralS;
  CoefficientSpec a = CoefficientSpec::from_smooth(SmoothFunction::constant(0.0), true);
  CoefficientSpec b = CoefficientSpec::from_smooth(SmoothFunction::constant(0.0), true);
  CoefficientSpec q = CoefficientSpec::from_smooth(SmoothFunction::constant(0.0));
  DataSpec u0 = DataSpec::zero();
  DataSpec u1 = DataSpec::zero();
  MollifierKernel kernel;
  std::vector<double> epsilons;
  std::size_t n_interior = 1023;
  std::size_t modes = 32;
  double T = 1.0;
  /// <= 0 selects the default step from the stiffest basis in use.
  double dt = 0.0;
  std::size_t threads = 1;

  /// Throws InvalidArgument/ResolutionError before any compute. Commands that
  /// never regularize can skip the epsilon checks.
  void validate(bool check_epsilons = true) const;
  Grid grid() const { return Grid(n_interior); }
};

/// Everything recorded for one epsilon of a net solve.
struct NetMember {
  double eps = 0.0;
  GridFunction a;
  GridFunction b;
  GridFunction u0;
  GridFunction u1;
  WaveSolution solution;
  double solution_norm = 0.0;  // sup_t ||u_eps(t)||_s
  double a_sup = 0.0, b_sup = 0.0, q_sup = 0.0;
  double u0_ws = 0.0, u0_l2 = 0.0, u0_dd = 0.0, u1_l2 = 0.0;
  double bound_constant = 0.0;  // solution_norm over the energy-estimate right-hand side
};

struct InputExponents {
  double a = 0.0, b = 0.0, q = 0.0, u0 = 0.0, u1 = 0.0;
  double solution = 0.0;
  /// max(N_a, N_b) + max(N_u0, N_u1)
  double predicted = 0.0;
};

struct NetSolution {
  std::vector<double> epsilons;
  std::vector<NetMember> members;
  double dt = 0.0;
  InputExponents exponents;
  /// Fitted N of the bound constants against 1/eps; no growth means <= ~0.
  double bound_constant_trend = 0.0;
};

using MemberCallback = std::function<void(std::size_t index, const NetMember&)>;

/// Solves the regularized problem for every epsilon. Members are reported to
/// `on_member` in epsilon order; if some epsilon fails, the members before it
/// are still reported and then the first error is rethrown.
NetSolution solve_net(const VeryWeakProblem& p, const MemberCallback& on_member = {});

/// sup_t ||u(t) - w(t)||_{L2}; synthesizes on the grid when the bases differ.
double sup_l2_distance(const WaveSolution& u, const WaveSolution& w);

struct UniquenessResult {
  ConvergenceReport report;
  std::vector<double> bound;        // right-hand side of the difference estimate per eps
  std::vector<double> bound_ratio;  // observed / bound
  NetSolution net_a;
  NetSolution net_b;
};

UniquenessResult uniqueness_experiment(const VeryWeakProblem& p, const MollifierKernel& kernel_b,
                                       const MemberCallback& on_member = {});

struct ConsistencyResult {
  ConvergenceReport report;
  double spearman = 0.0;
  NetSolution net;
  WaveSolution classical;
};

/// Errors of the regularized net against the unregularized classical solve on
/// the same grid, basis and time grid. Throws SpecNotSmooth for singular input.
ConsistencyResult consistency_experiment(const VeryWeakProblem& p, const MemberCallback& on_member = {});

nlohmann::json to_json(const InputExponents& e);
nlohmann::json to_json(const ConvergenceReport& r);

}  // namespace swave
