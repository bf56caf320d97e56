#include "swave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swave/errors.hpp"

namespace swave {

Grid::Grid(std::size_t n_interior) : n_(n_interior), h_(0.0) {
  if (n_interior < 2) {
    throw InvalidArgument("grid needs at least 2 interior nodes, got " +
                          std::to_string(n_interior));
  }
  h_ = 1.0 / static_cast<double>(n_interior + 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

Grid make_grid(std::size_t n_interior) { return Grid(n_interior); }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw GridMismatch(std::string(what) + ": grids differ (" + std::to_string(a.size()) +
                       " vs " + std::to_string(b.size()) + " interior nodes)");
  }
}

GridFunction::GridFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("grid function has " + std::to_string(values_.size()) +
                          " values for a grid of " + std::to_string(grid_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericalError("grid function contains a non-finite value");
  }
}

GridFunction GridFunction::zeros(const Grid& grid) {
  return GridFunction(grid, std::vector<double>(grid.size(), 0.0));
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool GridFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

namespace {

template <typename Op>
GridFunction combine(const GridFunction& f, const GridFunction& g, Op op, const char* what) {
  require_same_grid(f.grid(), g.grid(), what);
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = op(f[j], g[j]);
  return GridFunction(f.grid(), std::move(out));
}

}  // namespace

GridFunction operator+(const GridFunction& f, const GridFunction& g) {
  return combine(f, g, [](double x, double y) { return x + y; }, "operator+");
}

GridFunction operator-(const GridFunction& f, const GridFunction& g) {
  return combine(f, g, [](double x, double y) { return x - y; }, "operator-");
}

GridFunction operator*(double alpha, const GridFunction& f) {
  std::vector<double> out(f.values().begin(), f.values().end());
  for (double& v : out) v *= alpha;
  return GridFunction(f.grid(), std::move(out));
}

GridFunction pointwise_product(const GridFunction& f, const GridFunction& g) {
  return combine(f, g, [](double x, double y) { return x * y; }, "pointwise_product");
}

GridFunction second_difference(const GridFunction& f) {
  const std::size_t n = f.size();
  const double inv_h2 = 1.0 / (f.grid().h() * f.grid().h());
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j == 0 ? 0.0 : f[j - 1];
    const double right = j + 1 == n ? 0.0 : f[j + 1];
    out[j] = (left - 2.0 * f[j] + right) * inv_h2;
  }
  return GridFunction(f.grid(), std::move(out));
}

// Endpoint terms of the composite trapezoid vanish with Dirichlet data.
double inner_product(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) sum += f[j] * g[j];
  return f.grid().h() * sum;
}

double l2_norm(const GridFunction& f) { return std::sqrt(inner_product(f, f)); }

}  // namespace swave
