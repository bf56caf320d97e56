#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "swave/fit.hpp"
#include "swave/grid.hpp"

namespace swave {

/// Friedrichs mollifier built on the bump exp(-1/(1-x^2)), normalized to unit
/// mass. A nonzero offset tau in (-1,1) yields a second admissible kernel:
/// the bump is narrowed to half-width 1-|tau| and centred at tau, so the
/// support stays inside [-1,1].
class MollifierKernel {
 public:
  explicit MollifierKernel(double offset = 0.0);

  double offset() const { return offset_; }
  double half_width() const { return width_; }
  /// psi(x)
  double operator()(double x) const;
  /// psi_eps(x) = psi(x / eps) / eps
  double scaled(double x, double eps) const { return (*this)(x / eps) / eps; }
  /// max psi = psi(offset)
  double peak() const;
  double support_lo() const { return offset_ - width_; }
  double support_hi() const { return offset_ + width_; }

  /// Integral of exp(-1/(1-x^2)) over (-1,1), by adaptive quadrature.
  static double bump_mass();

  bool operator==(const MollifierKernel& other) const { return offset_ == other.offset_; }

 private:
  double offset_;
  double width_;
  double amplitude_;
};

/// A smooth function on (0,1): sum_i poly[i] x^i + sum amp sin(k pi x) + sum amp cos(k pi x).
struct SmoothFunction {
  std::vector<double> poly;
  std::vector<std::pair<double, double>> sin_terms;  // (k, amplitude)
  std::vector<std::pair<double, double>> cos_terms;  // (k, amplitude)

  double operator()(double x) const;
  bool operator==(const SmoothFunction&) const = default;

  static SmoothFunction constant(double c) { return SmoothFunction{{c}, {}, {}}; }
  static SmoothFunction sine(double k, double amplitude = 1.0) {
    return SmoothFunction{{}, {{k, amplitude}}, {}};
  }
};

/// Symbolic description of a (possibly distributional) coefficient on (0,1).
struct CoefficientSpec {
  enum class Kind { Smooth, DiracDelta, DiracPower, Sum };
  struct Term;

  Kind kind = Kind::Smooth;
  SmoothFunction smooth;
  double x0 = 0.5;
  int power = 2;
  std::vector<Term> terms;
  bool nonneg_required = false;

  static CoefficientSpec from_smooth(SmoothFunction f, bool nonneg = false);
  static CoefficientSpec delta(double x0, bool nonneg = true);
  static CoefficientSpec delta_power(double x0, int k, bool nonneg = true);
  static CoefficientSpec sum(std::vector<Term> terms, bool nonneg = false);

  /// Throws InvalidArgument on a malformed spec.
  void validate() const;
  bool is_singular() const;
  bool is_identically_zero() const;
  bool operator==(const CoefficientSpec&) const;
};

struct CoefficientSpec::Term {
  double weight = 1.0;
  CoefficientSpec spec;
  bool operator==(const Term&) const = default;
};

std::string kind_name(CoefficientSpec::Kind kind);

struct Mollified {
  GridFunction values;
  /// Some support of a shifted kernel left [0,1] and was cut off by the grid.
  bool support_truncated = false;
};

/// Throws ResolutionError unless eps >= 8h; InvalidArgument unless 0 < eps <= 1.
void check_epsilon(double eps, const Grid& grid);

/// Regularization of one spec at one epsilon. Smooth specs are zero-extended
/// outside (0,1) and convolved with psi_eps; Dirac terms become psi_eps(x - x0)
/// and its powers.
Mollified mollify(const CoefficientSpec& spec, const MollifierKernel& kernel, double eps,
                  const Grid& grid);

/// Samples a Smooth spec directly (no regularization). Throws SpecNotSmooth.
GridFunction sample_unregularized(const CoefficientSpec& spec, const Grid& grid);

struct RegularizedNet {
  CoefficientSpec spec;
  MollifierKernel kernel;
  std::vector<double> epsilons;
  std::vector<GridFunction> members;
  bool nonnegativity_violated = false;
  bool support_truncated = false;
};

/// Geometric epsilon ladder eps0 * ratio^j, j = 0..count-1.
std::vector<double> geometric_epsilons(double eps0, double ratio, std::size_t count);

RegularizedNet build_net(const CoefficientSpec& spec, const MollifierKernel& kernel,
                         std::vector<double> epsilons, const Grid& grid, std::size_t threads = 1);

enum class NormKind { Sup, L2, H2 };
std::string norm_name(NormKind kind);
/// sup |f|, ||f||_{L2}, or ||f||_{L2} + ||f''||_{L2} with second differences.
double grid_norm(const GridFunction& f, NormKind kind);

struct ModeratenessReport {
  double fitted_N = 0.0;
  double fit_residual = 0.0;
  NormKind norm_kind = NormKind::Sup;
  std::vector<std::pair<double, double>> table;  // (eps, norm)
};

/// Least-squares slope of log(norm) against log(1/eps).
ModeratenessReport fit_moderateness(std::span<const double> epsilons, std::span<const double> norms,
                                    NormKind kind);
ModeratenessReport fit_moderateness(const RegularizedNet& net, NormKind kind);

/// Differences ||A_eps - B_eps|| with their observed decay order.
ConvergenceReport check_negligible(const RegularizedNet& a, const RegularizedNet& b, NormKind kind);
std::string negligibility_label(const ConvergenceReport& report);

/// Net export: a '# ' JSON header line describing the spec and kernel, then
/// CSV columns eps, sup_norm, l2_norm, h2_norm.
void write_net_csv(std::ostream& out, const RegularizedNet& net);

}  // namespace swave
