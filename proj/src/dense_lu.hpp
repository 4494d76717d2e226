#pragma once

// Small dense LU with partial pivoting, row-major storage. Internal to the
// chain analysis; the matrices it sees are at most a few thousand rows.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace acr::detail {

class DenseLu {
 public:
  /// Factors `a` (n*n, row-major). Returns nullopt if a pivot falls below
  /// `singular_tol` times the largest entry magnitude.
  static std::optional<DenseLu> factor(std::vector<double> a, std::size_t n,
                                       double singular_tol = 1e-14) {
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return std::nullopt;

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
      if (std::abs(a[p * n + k]) <= singular_tol * scale) return std::nullopt;
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
        std::swap(perm[k], perm[p]);
      }
      const double pivot = a[k * n + k];
      for (std::size_t i = k + 1; i < n; ++i) {
        const double factor = a[i * n + k] / pivot;
        a[i * n + k] = factor;
        if (factor == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= factor * a[k * n + j];
      }
    }
    return DenseLu(std::move(a), std::move(perm), n);
  }

  std::vector<double> solve(std::span<const double> b) const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_[i * n_ + j] * x[j];
      x[i] = s;
    }
    for (std::size_t i = n_; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n_; ++j) s -= lu_[i * n_ + j] * x[j];
      x[i] = s / lu_[i * n_ + i];
    }
    return x;
  }

 private:
  DenseLu(std::vector<double> lu, std::vector<std::size_t> perm, std::size_t n)
      : lu_(std::move(lu)), perm_(std::move(perm)), n_(n) {}

  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
  std::size_t n_;
};

}  // namespace acr::detail
