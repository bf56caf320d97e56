#include "swave/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "swave/errors.hpp"
#include "swave/format.hpp"
#include "swave/parallel.hpp"
#include "swave/serialization.hpp"

namespace swave {

namespace {

double bump(double x) {
  const double r = 1.0 - x * x;
  return r > 0.0 ? std::exp(-1.0 / r) : 0.0;
}

template <typename F>
double adaptive_integral(F&& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
}

}  // namespace

// ---------------------------------------------------------------------------
// MollifierKernel

MollifierKernel::MollifierKernel(double offset) : offset_(offset), width_(1.0 - std::abs(offset)) {
  if (!(offset > -1.0 && offset < 1.0)) {
    throw InvalidArgument("mollifier offset must lie in (-1,1), got " + format_double(offset));
  }
  amplitude_ = 1.0 / (bump_mass() * width_);
}

double MollifierKernel::bump_mass() {
  static const double mass = adaptive_integral(bump, -1.0, 1.0);
  return mass;
}

double MollifierKernel::operator()(double x) const { return amplitude_ * bump((x - offset_) / width_); }

double MollifierKernel::peak() const { return amplitude_ * std::exp(-1.0); }

// ---------------------------------------------------------------------------
// Specs

double SmoothFunction::operator()(double x) const {
  double v = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) v = v * x + *it;
  for (const auto& [k, amp] : sin_terms) v += amp * std::sin(k * std::numbers::pi * x);
  for (const auto& [k, amp] : cos_terms) v += amp * std::cos(k * std::numbers::pi * x);
  return v;
}

CoefficientSpec CoefficientSpec::from_smooth(SmoothFunction f, bool nonneg) {
  CoefficientSpec s;
  s.kind = Kind::Smooth;
  s.smooth = std::move(f);
  s.nonneg_required = nonneg;
  return s;
}

CoefficientSpec CoefficientSpec::delta(double x0, bool nonneg) {
  CoefficientSpec s;
  s.kind = Kind::DiracDelta;
  s.x0 = x0;
  s.nonneg_required = nonneg;
  s.validate();
  return s;
}

CoefficientSpec CoefficientSpec::delta_power(double x0, int k, bool nonneg) {
  CoefficientSpec s;
  s.kind = Kind::DiracPower;
  s.x0 = x0;
  s.power = k;
  s.nonneg_required = nonneg;
  s.validate();
  return s;
}

CoefficientSpec CoefficientSpec::sum(std::vector<Term> terms, bool nonneg) {
  CoefficientSpec s;
  s.kind = Kind::Sum;
  s.terms = std::move(terms);
  s.nonneg_required = nonneg;
  s.validate();
  return s;
}

void CoefficientSpec::validate() const {
  switch (kind) {
    case Kind::Smooth:
      break;
    case Kind::DiracPower:
      if (power < 2) throw InvalidArgument("delta power needs k >= 2, got " + std::to_string(power));
      [[fallthrough]];
    case Kind::DiracDelta:
      if (!(x0 > 0.0 && x0 < 1.0)) {
        throw InvalidArgument("delta location must lie in (0,1), got " + format_double(x0));
      }
      break;
    case Kind::Sum:
      if (terms.empty()) throw InvalidArgument("sum spec needs at least one term");
      for (const auto& t : terms) {
        if (!std::isfinite(t.weight)) throw InvalidArgument("sum weight must be finite");
        if (nonneg_required && t.weight < 0.0) {
          throw InvalidArgument("nonnegative sum spec has negative weight " + format_double(t.weight));
        }
        t.spec.validate();
      }
      break;
  }
}

bool CoefficientSpec::is_singular() const {
  switch (kind) {
    case Kind::Smooth:
      return false;
    case Kind::DiracDelta:
    case Kind::DiracPower:
      return true;
    case Kind::Sum:
      return std::any_of(terms.begin(), terms.end(), [](const Term& t) { return t.spec.is_singular(); });
  }
  return false;
}

bool CoefficientSpec::is_identically_zero() const {
  switch (kind) {
    case Kind::Smooth: {
      auto zero = [](const auto& v) {
        return std::all_of(v.begin(), v.end(), [](const auto& p) { return p.second == 0.0; });
      };
      return std::all_of(smooth.poly.begin(), smooth.poly.end(), [](double c) { return c == 0.0; }) &&
             zero(smooth.sin_terms) && zero(smooth.cos_terms);
    }
    case Kind::DiracDelta:
    case Kind::DiracPower:
      return false;
    case Kind::Sum:
      return std::all_of(terms.begin(), terms.end(),
                         [](const Term& t) { return t.weight == 0.0 || t.spec.is_identically_zero(); });
  }
  return false;
}

bool CoefficientSpec::operator==(const CoefficientSpec& o) const {
  if (kind != o.kind || nonneg_required != o.nonneg_required) return false;
  switch (kind) {
    case Kind::Smooth:
      return smooth == o.smooth;
    case Kind::DiracDelta:
      return x0 == o.x0;
    case Kind::DiracPower:
      return x0 == o.x0 && power == o.power;
    case Kind::Sum:
      return terms == o.terms;
  }
  return false;
}

std::string kind_name(CoefficientSpec::Kind kind) {
  switch (kind) {
    case CoefficientSpec::Kind::Smooth: return "smooth";
    case CoefficientSpec::Kind::DiracDelta: return "delta";
    case CoefficientSpec::Kind::DiracPower: return "delta_power";
    case CoefficientSpec::Kind::Sum: return "sum";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Mollification

void check_epsilon(double eps, const Grid& grid) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw InvalidArgument("epsilon must lie in (0,1], got " + format_double(eps));
  }
  if (eps < 8.0 * grid.h()) {
    throw ResolutionError("epsilon " + format_double(eps) + " is below 8h = " +
                          format_double(8.0 * grid.h()) + "; refine the grid");
  }
}

namespace {

// Convolution of the zero extension of f with psi_eps at x:
// integral over y in supp(psi_eps) with 0 < x - y < 1.
double convolve_zero_extended(const SmoothFunction& f, const MollifierKernel& kernel, double eps,
                              double x) {
  const double lo = std::max(eps * kernel.support_lo(), x - 1.0);
  const double hi = std::min(eps * kernel.support_hi(), x);
  if (!(hi > lo)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate([&](double y) { return f(x - y) * kernel.scaled(y, eps); }, lo, hi, 1e-13);
}

void accumulate(const CoefficientSpec& spec, double weight, const MollifierKernel& kernel, double eps,
                const Grid& grid, std::vector<double>& out, bool& truncated) {
  const std::size_t n = grid.size();
  switch (spec.kind) {
    case CoefficientSpec::Kind::Smooth:
      for (std::size_t j = 0; j < n; ++j) {
        out[j] += weight * convolve_zero_extended(spec.smooth, kernel, eps, grid.node(j));
      }
      break;
    case CoefficientSpec::Kind::DiracDelta:
    case CoefficientSpec::Kind::DiracPower: {
      const int k = spec.kind == CoefficientSpec::Kind::DiracDelta ? 1 : spec.power;
      if (spec.x0 + eps * kernel.support_lo() < 0.0 || spec.x0 + eps * kernel.support_hi() > 1.0) {
        truncated = true;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double v = kernel.scaled(grid.node(j) - spec.x0, eps);
        if (v != 0.0) out[j] += weight * std::pow(v, k);
      }
      break;
    }
    case CoefficientSpec::Kind::Sum:
      for (const auto& t : spec.terms) accumulate(t.spec, weight * t.weight, kernel, eps, grid, out, truncated);
      break;
  }
}

}  // namespace

Mollified mollify(const CoefficientSpec& spec, const MollifierKernel& kernel, double eps,
                  const Grid& grid) {
  spec.validate();
  check_epsilon(eps, grid);
  std::vector<double> out(grid.size(), 0.0);
  bool truncated = false;
  accumulate(spec, 1.0, kernel, eps, grid, out, truncated);
  return Mollified{GridFunction(grid, std::move(out)), truncated};
}

GridFunction sample_unregularized(const CoefficientSpec& spec, const Grid& grid) {
  spec.validate();
  if (spec.is_singular()) {
    throw SpecNotSmooth(kind_name(spec.kind) + " coefficient is singular and has no pointwise samples");
  }
  if (spec.kind == CoefficientSpec::Kind::Smooth) return GridFunction::sample(grid, spec.smooth);
  GridFunction acc = GridFunction::zeros(grid);
  for (const auto& t : spec.terms) acc = acc + t.weight * sample_unregularized(t.spec, grid);
  return acc;
}

std::vector<double> geometric_epsilons(double eps0, double ratio, std::size_t count) {
  if (!(eps0 > 0.0 && eps0 <= 1.0)) throw InvalidArgument("eps0 must lie in (0,1]");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("epsilon ratio must lie in (0,1)");
  if (count == 0) throw InvalidArgument("epsilon ladder needs at least one level");
  std::vector<double> eps(count);
  for (std::size_t j = 0; j < count; ++j) eps[j] = eps0 * std::pow(ratio, static_cast<double>(j));
  return eps;
}

RegularizedNet build_net(const CoefficientSpec& spec, const MollifierKernel& kernel,
                         std::vector<double> epsilons, const Grid& grid, std::size_t threads) {
  if (epsilons.empty()) throw InvalidArgument("build_net: epsilon list is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    check_epsilon(epsilons[i], grid);
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw InvalidArgument("build_net: epsilons must be strictly decreasing");
    }
  }
  std::vector<Mollified> results(epsilons.size(), Mollified{GridFunction::zeros(grid), false});
  rethrow_first(parallel_for(epsilons.size(), threads, [&](std::size_t i) {
    results[i] = mollify(spec, kernel, epsilons[i], grid);
  }));

  RegularizedNet net{spec, kernel, std::move(epsilons), {}, false, false};
  net.members.reserve(results.size());
  for (auto& r : results) {
    net.support_truncated = net.support_truncated || r.support_truncated;
    if (!spec.nonneg_required) {
      net.members.push_back(std::move(r.values));
      continue;
    }
    std::vector<double> v(r.values.values().begin(), r.values.values().end());
    for (double& x : v) {
      if (x < -1e-12) net.nonnegativity_violated = true;
      x = std::max(x, 0.0);
    }
    net.members.emplace_back(grid, std::move(v));
  }
  return net;
}

// ---------------------------------------------------------------------------
// Norms and moderateness

std::string norm_name(NormKind kind) {
  switch (kind) {
    case NormKind::Sup: return "sup";
    case NormKind::L2: return "L2";
    case NormKind::H2: return "H2";
  }
  return "unknown";
}

double grid_norm(const GridFunction& f, NormKind kind) {
  switch (kind) {
    case NormKind::Sup: return f.max_abs();
    case NormKind::L2: return l2_norm(f);
    case NormKind::H2: return l2_norm(f) + l2_norm(second_difference(f));
  }
  return 0.0;
}

ModeratenessReport fit_moderateness(std::span<const double> epsilons, std::span<const double> norms,
                                    NormKind kind) {
  if (epsilons.size() != norms.size()) throw InvalidArgument("fit_moderateness: table size mismatch");
  if (epsilons.size() < 3) throw InvalidArgument("fit_moderateness: need at least 3 members");
  ModeratenessReport report;
  report.norm_kind = kind;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw InvalidArgument("fit_moderateness: epsilons must be strictly decreasing");
    }
    report.table.emplace_back(epsilons[i], norms[i]);
  }
  if (std::all_of(norms.begin(), norms.end(), [&](double v) { return v == norms.front(); })) {
    return report;
  }
  std::vector<double> inv_eps(epsilons.size());
  for (std::size_t i = 0; i < epsilons.size(); ++i) inv_eps[i] = 1.0 / epsilons[i];
  const LineFit fit = fit_loglog(inv_eps, norms);
  report.fitted_N = fit.slope;
  report.fit_residual = fit.residual;
  return report;
}

ModeratenessReport fit_moderateness(const RegularizedNet& net, NormKind kind) {
  std::vector<double> norms;
  norms.reserve(net.members.size());
  for (const auto& m : net.members) norms.push_back(grid_norm(m, kind));
  return fit_moderateness(net.epsilons, norms, kind);
}

ConvergenceReport check_negligible(const RegularizedNet& a, const RegularizedNet& b, NormKind kind) {
  if (a.epsilons != b.epsilons) throw InvalidArgument("check_negligible: nets use different epsilons");
  require_same_grid(a.members.front().grid(), b.members.front().grid(), "check_negligible");
  std::vector<double> diffs;
  diffs.reserve(a.members.size());
  for (std::size_t i = 0; i < a.members.size(); ++i) diffs.push_back(grid_norm(a.members[i] - b.members[i], kind));
  auto report = make_decay_report(a.epsilons, diffs, norm_name(kind), "");
  report.context = negligibility_label(report);
  return report;
}

std::string negligibility_label(const ConvergenceReport& report) {
  return "negligible-at-order-" + (report.order_is_infinite() ? std::string("+inf")
                                                              : format_double(report.fitted_order));
}

void write_net_csv(std::ostream& out, const RegularizedNet& net) {
  nlohmann::json header = to_json(net.spec);
  header["kernel_offset"] = net.kernel.offset();
  if (net.spec.kind == CoefficientSpec::Kind::DiracDelta || net.spec.kind == CoefficientSpec::Kind::DiracPower) {
    header["x0"] = net.spec.x0;
  }
  out << "# " << header.dump() << '\n';
  out << "eps,sup_norm,l2_norm,h2_norm\n";
  for (std::size_t i = 0; i < net.members.size(); ++i) {
    const auto& m = net.members[i];
    out << format_double(net.epsilons[i]) << ',' << format_double(grid_norm(m, NormKind::Sup)) << ','
        << format_double(grid_norm(m, NormKind::L2)) << ',' << format_double(grid_norm(m, NormKind::H2))
        << '\n';
  }
}

}  // namespace swave
