#include "swave/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "swave/errors.hpp"

namespace swave {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// LU factorization of (T - shift I) with partial pivoting; rows may swap with
// their successor, so U carries a second superdiagonal.
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const SymmetricTridiagonal& t, double shift) : n_(t.size()) {
    d_.resize(n_);
    u1_.assign(n_, 0.0);
    u2_.assign(n_, 0.0);
    l_.assign(n_, 0.0);
    swap_.assign(n_, false);

    const double floor = kEps * std::max(1.0, norm_estimate(t));
    std::vector<double> sub(t.off);
    std::vector<double> diag(n_);
    for (std::size_t i = 0; i < n_; ++i) diag[i] = t.diag[i] - shift;

    // Row i currently holds (sub[i-1], diag[i], sup[i]); elimination runs on
    // the pair (row i, row i+1).
    std::vector<double> sup(t.off);
    sup.push_back(0.0);
    double row_d = diag[0];
    double row_u1 = n_ > 1 ? sup[0] : 0.0;
    double row_u2 = 0.0;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double next_sub = sub[i];
      double next_d = diag[i + 1];
      double next_u1 = sup[i + 1];
      if (std::abs(row_d) >= std::abs(next_sub)) {
        if (row_d == 0.0) row_d = floor;
        const double m = next_sub / row_d;
        l_[i] = m;
        d_[i] = row_d;
        u1_[i] = row_u1;
        u2_[i] = row_u2;
        row_d = next_d - m * row_u1;
        row_u1 = next_u1 - m * row_u2;
        row_u2 = 0.0;
      } else {
        swap_[i] = true;
        const double m = row_d / next_sub;
        l_[i] = m;
        d_[i] = next_sub;
        u1_[i] = next_d;
        u2_[i] = next_u1;
        row_d = row_u1 - m * next_d;
        row_u1 = row_u2 - m * next_u1;
        row_u2 = 0.0;
      }
    }
    if (row_d == 0.0) row_d = floor;
    d_[n_ - 1] = row_d;
  }

  void solve(std::vector<double>& b) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (swap_[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= l_[i] * b[i];
    }
    for (std::size_t k = n_; k-- > 0;) {
      double v = b[k];
      if (k + 1 < n_) v -= u1_[k] * b[k + 1];
      if (k + 2 < n_) v -= u2_[k] * b[k + 2];
      b[k] = v / d_[k];
    }
  }

 private:
  static double norm_estimate(const SymmetricTridiagonal& t) {
    const auto [lo, hi] = t.spectrum_bounds();
    return std::max(std::abs(lo), std::abs(hi));
  }

  std::size_t n_;
  std::vector<double> d_, u1_, u2_, l_;
  std::vector<bool> swap_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double nrm = std::sqrt(dot(v, v));
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw NumericalError("inverse iteration produced a degenerate vector");
  }
  for (double& x : v) x /= nrm;
}

}  // namespace

std::size_t SymmetricTridiagonal::count_below(double x) const {
  const std::size_t n = size();
  const double tiny = std::numeric_limits<double>::min() / kEps;
  std::size_t count = 0;
  double pivot = diag[0] - x;
  if (pivot < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(pivot) < tiny) pivot = -tiny;
    pivot = (diag[i] - x) - off[i - 1] * off[i - 1] / pivot;
    if (pivot < 0.0) ++count;
  }
  return count;
}

std::pair<double, double> SymmetricTridiagonal::spectrum_bounds() const {
  const std::size_t n = size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return {lo, hi};
}

void SymmetricTridiagonal::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
}

std::vector<double> lowest_eigenvalues(const SymmetricTridiagonal& t, std::size_t k) {
  if (k > t.size()) throw InvalidArgument("requested more eigenvalues than the matrix order");
  auto [lo, hi] = t.spectrum_bounds();
  const double scale = std::max(std::abs(lo), std::abs(hi));
  lo -= kEps * scale + std::numeric_limits<double>::min();
  hi += kEps * scale + std::numeric_limits<double>::min();

  std::vector<double> out(k);
  double left = lo;
  for (std::size_t i = 0; i < k; ++i) {
    // Find x with count_below(x) <= i < count_below(x'), x' = next float.
    double a = left;
    double b = hi;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (b - a <= 2.0 * kEps * std::max(std::abs(a), std::abs(b))) break;
      if (t.count_below(mid) > i) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out[i] = 0.5 * (a + b);
    left = a;
  }
  return out;
}

std::vector<std::vector<double>> eigenvectors_for(const SymmetricTridiagonal& t,
                                                  std::span<const double> eigenvalues) {
  const std::size_t n = t.size();
  const auto [lo, hi] = t.spectrum_bounds();
  const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
  std::vector<std::vector<double>> vecs;
  vecs.reserve(eigenvalues.size());

  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    // Tiny shift perturbation keeps the factorization away from exact singularity.
    const double shift = eigenvalues[k] + 8.0 * kEps * scale;
    ShiftedTridiagonalLU lu(t, shift);
    std::mt19937_64 rng(0x5eed0000ULL + k);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    normalize(v);

    for (int iter = 0; iter < 4; ++iter) {
      lu.solve(v);
      for (const auto& w : vecs) {
        const double c = dot(v, w);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * w[i];
      }
      normalize(v);
    }
    vecs.push_back(std::move(v));
  }
  return vecs;
}

}  // namespace swave
