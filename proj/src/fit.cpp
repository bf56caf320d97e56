#include "swave/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swave/errors.hpp"

namespace swave {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_line: x and y differ in length");
  if (x.size() < 2) throw InvalidArgument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("fit_loglog: entries must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("spearman: need matching samples");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double richardson_order(double diff_coarse, double diff_fine, double ratio) {
  return std::log(std::abs(diff_coarse) / std::abs(diff_fine)) / std::log(ratio);
}

ConvergenceReport make_decay_report(std::span<const double> eps, std::span<const double> errors,
                                    std::string norm_kind, std::string context) {
  if (eps.size() != errors.size() || eps.empty()) {
    throw InvalidArgument("decay report: epsilon and error tables must match and be nonempty");
  }
  ConvergenceReport report;
  report.norm_kind = std::move(norm_kind);
  report.context = std::move(context);
  std::vector<double> pe, pv;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (errors[i] < 0.0 || !std::isfinite(errors[i])) {
      throw NumericalError("decay report: errors must be finite and nonnegative");
    }
    report.table.emplace_back(eps[i], errors[i]);
    if (errors[i] > 0.0) {
      pe.push_back(eps[i]);
      pv.push_back(errors[i]);
    }
  }
  // Zero entries carry no slope information; fewer than two nonzero errors
  // means the differences vanish.
  if (pe.size() < 2) {
    report.fitted_order = ConvergenceReport::kInfiniteOrder;
    return report;
  }
  const LineFit fit = fit_loglog(pe, pv);
  report.fitted_order = fit.slope;
  report.fit_residual = fit.residual;
  return report;
}

}  // namespace swave
