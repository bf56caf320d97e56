#include "swave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "swave/errors.hpp"
#include "swave/format.hpp"
#include "swave/tridiagonal.hpp"

namespace swave {

namespace {

std::optional<double> constant_value(const GridFunction& q) {
  const auto v = q.values();
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
    return v.front();
  }
  return std::nullopt;
}

bool is_nonnegative_integer(double s) { return s >= 0.0 && std::floor(s) == s; }

}  // namespace

void check_mode_resolution(std::size_t n_interior, std::size_t modes) {
  if (modes == 0) throw InvalidArgument("at least one spectral mode is required");
  if (modes > n_interior / 4) {
    throw ResolutionError("resolution guard: modes = " + std::to_string(modes) +
                          " exceeds n_interior/4 = " + std::to_string(n_interior / 4));
  }
}

SpectralBasis::SpectralBasis(const GridFunction& q, std::size_t modes)
    : q_(q), q_constant_(constant_value(q)) {
  const Grid& grid = q.grid();
  check_mode_resolution(grid.size(), modes);
  const std::size_t n = grid.size();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());

  SymmetricTridiagonal t;
  t.diag.resize(n);
  t.off.assign(n - 1, -inv_h2);
  for (std::size_t j = 0; j < n; ++j) t.diag[j] = 2.0 * inv_h2 + q[j];

  lambdas_ = lowest_eigenvalues(t, modes);
  auto vecs = eigenvectors_for(t, lambdas_);

  // Unit euclidean norm -> unit discrete L2 norm.
  const double scale = 1.0 / std::sqrt(grid.h());
  phis_.reserve(modes);
  for (auto& v : vecs) {
    auto first = std::find_if(v.begin(), v.end(), [](double x) { return std::abs(x) > 1e-200; });
    const double sign = (first != v.end() && *first < 0.0) ? -scale : scale;
    for (double& x : v) x *= sign;
    phis_.emplace_back(grid, std::move(v));
  }
}

std::optional<double> SpectralBasis::continuum_reference(std::size_t n) const {
  if (!q_constant_) return std::nullopt;
  const double k = std::numbers::pi * static_cast<double>(n + 1);
  return k * k + *q_constant_;
}

double SpectralBasis::normalization_residual(std::size_t n) const {
  return std::abs(l2_norm(phis_[n]) - 1.0);
}

double SpectralBasis::orthogonality_max(std::size_t n) const {
  double m = 0.0;
  for (std::size_t k = 0; k < phis_.size(); ++k) {
    if (k != n) m = std::max(m, std::abs(inner_product(phis_[n], phis_[k])));
  }
  return m;
}

BasisPtr build_basis(const GridFunction& q, std::size_t modes) {
  return std::make_shared<const SpectralBasis>(q, modes);
}

SpectralCoeffs::SpectralCoeffs(BasisPtr basis, std::vector<double> c)
    : basis_(std::move(basis)), c_(std::move(c)) {
  if (!basis_) throw InvalidArgument("spectral coefficients need a basis");
  if (c_.size() != basis_->size()) {
    throw InvalidArgument("coefficient vector has " + std::to_string(c_.size()) +
                          " entries for a basis of " + std::to_string(basis_->size()));
  }
  for (double v : c_) {
    if (!std::isfinite(v)) throw NumericalError("non-finite spectral coefficient");
  }
}

SpectralCoeffs SpectralCoeffs::zeros(BasisPtr basis) {
  const std::size_t m = basis->size();
  return SpectralCoeffs(std::move(basis), std::vector<double>(m, 0.0));
}

SpectralCoeffs SpectralCoeffs::unit(BasisPtr basis, std::size_t n) {
  std::vector<double> c(basis->size(), 0.0);
  c.at(n) = 1.0;
  return SpectralCoeffs(std::move(basis), std::move(c));
}

void require_same_basis(const SpectralCoeffs& a, const SpectralCoeffs& b, const char* what) {
  if (a.basis() != b.basis()) throw GridMismatch(std::string(what) + ": coefficients use different bases");
}

SpectralCoeffs analyze(const GridFunction& f, const BasisPtr& basis) {
  require_same_grid(f.grid(), basis->grid(), "analyze");
  std::vector<double> c(basis->size());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = inner_product(f, basis->phi(n));
  return SpectralCoeffs(basis, std::move(c));
}

GridFunction synthesize(const SpectralCoeffs& c) {
  const SpectralBasis& basis = *c.basis();
  std::vector<double> out(basis.grid().size(), 0.0);
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double cn = c[n];
    if (cn == 0.0) continue;
    const auto phi = basis.phi(n).values();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += cn * phi[j];
  }
  return GridFunction(basis.grid(), std::move(out));
}

double eigenvalue_power(double lambda, double s) {
  if (is_nonnegative_integer(s)) return std::pow(lambda, s);
  if (lambda <= 0.0) {
    throw NegativeSpectrum("lambda^s undefined for lambda = " + format_double(lambda) +
                           " and s = " + format_double(s) + "; shift the potential");
  }
  return std::pow(lambda, s);
}

void require_power_defined(const SpectralBasis& basis, double s) {
  if (!is_nonnegative_integer(s) && basis.nonpositive_ground_state()) {
    throw NegativeSpectrum("L^p with p = " + format_double(s) + " requires lambda_1 > 0, got lambda_1 = " +
                           format_double(basis.lambda(0)));
  }
}

SpectralCoeffs apply_fractional(const SpectralCoeffs& c, double s) {
  const SpectralBasis& basis = *c.basis();
  require_power_defined(basis, s);
  std::vector<double> out(c.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = eigenvalue_power(basis.lambda(n), s) * c[n];
  return SpectralCoeffs(c.basis(), std::move(out));
}

double sobolev_norm(const SpectralCoeffs& c, double s) {
  const SpectralBasis& basis = *c.basis();
  require_power_defined(basis, 0.5 * s);
  double sum = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double half = eigenvalue_power(basis.lambda(n), 0.5 * s) * c[n];
    sum += half * half;
  }
  return std::sqrt(sum);
}

double solution_norm(const SpectralCoeffs& u, const SpectralCoeffs& u_t, double s) {
  require_same_basis(u, u_t, "solution_norm");
  return sobolev_norm(u, 0.0) + sobolev_norm(u, s) + sobolev_norm(u_t, 0.0);
}

void write_eigen_csv(std::ostream& out, const SpectralBasis& basis) {
  out << "n,lambda_discrete,lambda_continuum_reference,normalization_residual,orthogonality_max\n";
  for (std::size_t n = 0; n < basis.size(); ++n) {
    const auto ref = basis.continuum_reference(n);
    out << (n + 1) << ',' << format_double(basis.lambda(n)) << ','
        << (ref ? format_double(*ref) : std::string()) << ','
        << format_double(basis.normalization_residual(n)) << ','
        << format_double(basis.orthogonality_max(n)) << '\n';
  }
}

}  // namespace swave
