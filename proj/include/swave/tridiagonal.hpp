#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swave {

/// Real symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
struct SymmetricTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // size diag.size() - 1

  std::size_t size() const { return diag.size(); }

  /// Number of eigenvalues strictly below x (Sturm sequence count).
  std::size_t count_below(double x) const;

  /// Gershgorin enclosure of the spectrum.
  std::pair<double, double> spectrum_bounds() const;

  /// y = T x
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// The k smallest eigenvalues, ascending, by Sturm bisection to full precision.
std::vector<double> lowest_eigenvalues(const SymmetricTridiagonal& t, std::size_t k);

/// Eigenvectors for the given eigenvalues by inverse iteration, reorthogonalized
/// against each other. Each returned vector has unit euclidean norm.
std::vector<std::vector<double>> eigenvectors_for(const SymmetricTridiagonal& t,
                                                  std::span<const double> eigenvalues);

}  // namespace swave
