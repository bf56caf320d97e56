#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "swave/grid.hpp"
#include "swave/spectral.hpp"

namespace swave {

/// u_tt + L^s u + a u + b u_t = 0 on (0,1), Dirichlet, truncated to a spectral basis.
struct WaveProblem {
  double s = 1.0;
  BasisPtr basis;
  GridFunction a;
  GridFunction b;
  SpectralCoeffs u0;
  SpectralCoeffs u1;
  double T = 1.0;
  double dt = 0.0;

  /// Throws InvalidArgument on negative coefficients, bad times, or mismatched grids.
  void validate() const;
};

/// min(0.5 / sqrt(lambda_M^s), T / 200)
double default_time_step(const SpectralBasis& basis, double s, double T);

/// Builds a problem with a = b = 0 and the default time step when dt <= 0.
WaveProblem make_problem(double s, BasisPtr basis, SpectralCoeffs u0, SpectralCoeffs u1, double T,
                         double dt = 0.0);

/// Uniform time grid covering [0, T]: ceil(T/dt) steps of size T/steps.
std::vector<double> time_grid(double T, double dt);

struct WaveSolution {
  std::shared_ptr<const WaveProblem> problem;
  std::vector<double> times;
  std::vector<SpectralCoeffs> u;
  std::vector<SpectralCoeffs> v;

  std::size_t steps() const { return times.size() - 1; }
  double step_size() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Exact mode-by-mode evaluation for a = b = 0.
WaveSolution solve_free_series(const WaveProblem& problem);

/// A_{mn} = <a phi_n, phi_m>; symmetric, and positive semidefinite when a >= 0.
Eigen::MatrixXd assemble_coupling(const GridFunction& a, const SpectralBasis& basis);

/// Factored implicit trapezoidal step for (u, v)' = (v, -K u - B v).
class TrapezoidStepper {
 public:
  TrapezoidStepper(Eigen::MatrixXd stiffness, Eigen::MatrixXd damping, double dt);

  void step(Eigen::VectorXd& u, Eigen::VectorXd& v) const;
  double dt() const { return dt_; }
  const Eigen::MatrixXd& stiffness() const { return k_; }
  const Eigen::MatrixXd& damping() const { return b_; }

 private:
  Eigen::MatrixXd k_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd velocity_rhs_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double dt_;
};

/// diag(lambda_n^s) + A(a)
Eigen::MatrixXd stiffness_matrix(const WaveProblem& problem);

WaveSolution solve_galerkin(const WaveProblem& problem);

/// u = w + int_0^t v(t; tau) dtau with forcing sampled on the solver time grid.
/// Auxiliary solves may fan out over `threads` workers.
WaveSolution solve_duhamel(const WaveProblem& problem, const std::vector<SpectralCoeffs>& forcing,
                           std::size_t threads = 1);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> E;
  std::vector<double> kinetic;       // ||u_t||^2
  std::vector<double> potential_ls;  // ||L^{s/2} u||^2
  std::vector<double> potential_a;   // ||a^{1/2} u||^2
};

EnergyTrace energy_trace(const WaveSolution& sol);

/// Per-step |E_{k+1} - E_k + dt (D_k + D_{k+1})| with D = ||b^{1/2} u_t||^2.
std::vector<double> energy_identity_residuals(const WaveSolution& sol);

enum class EstimateVariant { Free, GeneralS, SEqualsOne };
std::string variant_name(EstimateVariant v);
EstimateVariant variant_from_name(const std::string& name);

struct EstimateEntry {
  std::string quantity;
  double lhs_max = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct EstimateReport {
  EstimateVariant variant = EstimateVariant::Free;
  std::vector<EstimateEntry> entries;
  double max_ratio = 0.0;
};

/// LHS/RHS ratios of the energy estimates along a computed solution. The
/// implicit constants are unknown, so callers compare ratios across families.
EstimateReport check_estimates(const WaveSolution& sol, EstimateVariant variant);

nlohmann::json to_json(const EstimateReport& report);

/// t, then M coefficient columns, then M velocity columns.
void write_solution_csv(std::ostream& out, const WaveSolution& sol);
/// t, E, E_kinetic, E_potential_Ls, E_potential_a
void write_energy_csv(std::ostream& out, const EnergyTrace& trace);

}  // namespace swave
