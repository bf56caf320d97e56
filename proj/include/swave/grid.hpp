#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swave {

/// Uniform mesh of the open interval (0,1). Only interior nodes are stored;
/// the Dirichlet boundary values at x = 0 and x = 1 are implicitly zero.
class Grid {
 public:
  explicit Grid(std::size_t n_interior);

  std::size_t size() const { return n_; }
  double h() const { return h_; }
  /// Node x_{j+1} = (j+1) h for 0-based j.
  double node(std::size_t j) const { return static_cast<double>(j + 1) * h_; }
  std::vector<double> nodes() const;

  bool operator==(const Grid& other) const { return n_ == other.n_; }

 private:
  std::size_t n_;
  double h_;
};

Grid make_grid(std::size_t n_interior);

/// Real samples on the interior nodes of a Grid.
class GridFunction {
 public:
  GridFunction(const Grid& grid, std::vector<double> values);

  static GridFunction zeros(const Grid& grid);

  template <typename F>
  static GridFunction sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.node(j));
    return GridFunction(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  double max_abs() const;
  double min() const;
  bool is_zero() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

GridFunction operator+(const GridFunction& f, const GridFunction& g);
GridFunction operator-(const GridFunction& f, const GridFunction& g);
GridFunction operator*(double alpha, const GridFunction& f);
/// Pointwise product f(x) g(x).
GridFunction pointwise_product(const GridFunction& f, const GridFunction& g);
/// Second central differences with the implicit zero boundary values.
GridFunction second_difference(const GridFunction& f);

/// Composite trapezoid approximation of the L2 pairing on (0,1).
double inner_product(const GridFunction& f, const GridFunction& g);
double l2_norm(const GridFunction& f);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace swave
