#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "swave/grid.hpp"

namespace swave {

/// First M Dirichlet eigenpairs of L = -d^2/dx^2 + q on (0,1), discretized by
/// second-order central differences. Eigenfunctions are normalized in the
/// discrete L2 pairing and oriented so that their first interior value is positive.
class SpectralBasis {
 public:
  SpectralBasis(const GridFunction& q, std::size_t modes);

  const Grid& grid() const { return q_.grid(); }
  std::size_t size() const { return lambdas_.size(); }
  std::span<const double> lambdas() const { return lambdas_; }
  double lambda(std::size_t n) const { return lambdas_[n]; }
  /// 0-based: phi(0) is the ground state.
  const GridFunction& phi(std::size_t n) const { return phis_[n]; }
  const GridFunction& potential() const { return q_; }

  /// Set when the smallest eigenvalue is not positive; fractional powers are then refused.
  bool nonpositive_ground_state() const { return lambdas_.front() <= 0.0; }

  /// Continuum eigenvalue (pi n)^2 + c when q is the constant c; empty otherwise.
  std::optional<double> continuum_reference(std::size_t n) const;

  double normalization_residual(std::size_t n) const;
  double orthogonality_max(std::size_t n) const;

 private:
  GridFunction q_;
  std::optional<double> q_constant_;
  std::vector<double> lambdas_;
  std::vector<GridFunction> phis_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

/// Throws ResolutionError unless modes <= n_interior / 4.
void check_mode_resolution(std::size_t n_interior, std::size_t modes);

BasisPtr build_basis(const GridFunction& q, std::size_t modes);

/// Expansion coefficients c_n = <f, phi_n> with respect to one basis.
class SpectralCoeffs {
 public:
  SpectralCoeffs(BasisPtr basis, std::vector<double> c);
  static SpectralCoeffs zeros(BasisPtr basis);
  static SpectralCoeffs unit(BasisPtr basis, std::size_t n);

  const BasisPtr& basis() const { return basis_; }
  std::size_t size() const { return c_.size(); }
  std::span<const double> values() const { return c_; }
  double operator[](std::size_t n) const { return c_[n]; }

 private:
  BasisPtr basis_;
  std::vector<double> c_;
};

void require_same_basis(const SpectralCoeffs& a, const SpectralCoeffs& b, const char* what);

SpectralCoeffs analyze(const GridFunction& f, const BasisPtr& basis);
GridFunction synthesize(const SpectralCoeffs& c);

/// lambda^s with the integer/non-integer spectrum rule; throws NegativeSpectrum.
double eigenvalue_power(double lambda, double s);
/// Throws NegativeSpectrum when s is not a nonnegative integer and lambda_1 <= 0.
void require_power_defined(const SpectralBasis& basis, double s);

SpectralCoeffs apply_fractional(const SpectralCoeffs& c, double s);
/// ||L^{s/2} f||: the lambda^s-weighted euclidean norm of the coefficients.
double sobolev_norm(const SpectralCoeffs& c, double s);
/// ||u||_{L2} + ||L^{s/2} u||_{L2} + ||u_t||_{L2}
double solution_norm(const SpectralCoeffs& u, const SpectralCoeffs& u_t, double s);

/// Eigen report CSV: n, lambda_discrete, lambda_continuum_reference,
/// normalization_residual, orthogonality_max.
void write_eigen_csv(std::ostream& out, const SpectralBasis& basis);

}  // namespace swave
