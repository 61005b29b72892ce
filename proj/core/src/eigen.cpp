#include "simconf/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simconf/error.hpp"

namespace simconf {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kOffDiagonalTolerance = 1e-10;
constexpr int kMaxSweeps = 100;

double max_off_diagonal(const std::vector<double>& a, std::size_t n) {
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      peak = std::max(peak, std::abs(a[i * n + j]));
  return peak;
}

}  // namespace

SymmetricEigen symmetric_eigen(const std::vector<double>& matrix,
                               std::size_t n) {
  if (n == 0 || matrix.size() != n * n)
    throw UsageError("symmetric_eigen: matrix must be square and non-empty");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(matrix[i * n + j] - matrix[j * n + i]) > kSymmetryTolerance)
        throw UsageError("symmetric_eigen: matrix is not symmetric");

  std::vector<double> a = matrix;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  int sweep = 0;
  while (max_off_diagonal(a, n) >= kOffDiagonalTolerance) {
    if (++sweep > kMaxSweeps)
      throw NumericError("symmetric_eigen: no convergence after 100 sweeps");
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < kOffDiagonalTolerance) continue;

        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  // Sort eigenpairs ascending; stable so degenerate eigenvalues keep the
  // rotation order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x * n + x] < a[y * n + y];
  });

  SymmetricEigen out;
  out.n = n;
  out.eigenvalues.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a[order[k] * n + order[k]];
    for (std::size_t i = 0; i < n; ++i)
      out.vectors[i * n + k] = v[i * n + order[k]];
  }
  return out;
}

}  // namespace simconf
