#pragma once

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace swave {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square of the fit residuals.
  double residual = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept. Needs >= 2 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Slope of log(y) against log(x); all entries must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

/// Observed order from three solutions at steps h, h/r, h/r^2:
/// log(|e_coarse| / |e_fine|) / log(r) with e the successive differences.
double richardson_order(double diff_coarse, double diff_fine, double ratio = 2.0);

/// Error (or difference) norms against epsilon, with the fitted decay order p
/// in err ~ eps^p. An all-zero table reports +infinity.
struct ConvergenceReport {
  std::vector<std::pair<double, double>> table;  // (eps, error)
  double fitted_order = 0.0;
  double fit_residual = 0.0;
  std::string norm_kind;
  std::string context;

  static constexpr double kInfiniteOrder = std::numeric_limits<double>::infinity();
  bool order_is_infinite() const { return fitted_order == kInfiniteOrder; }
};

ConvergenceReport make_decay_report(std::span<const double> eps, std::span<const double> errors,
                                    std::string norm_kind, std::string context);

}  // namespace swave
