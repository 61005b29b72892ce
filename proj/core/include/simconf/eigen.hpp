#pragma once

#include <cstddef>
#include <vector>

namespace simconf {

// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
// Column k of `vectors` (entries vectors[i*n + k]) is the unit eigenvector
// for eigenvalues[k]; columns are mutually orthonormal.
struct SymmetricEigen {
  std::size_t n = 0;
  std::vector<double> eigenvalues;
  std::vector<double> vectors;  // row-major n*n, eigenvectors as columns

  double vector_entry(std::size_t i, std::size_t k) const {
    return vectors[i * n + k];
  }
};

// Cyclic Jacobi rotations. Input is row-major n*n and must be symmetric
// within 1e-9 (UsageError otherwise). Converged when every off-diagonal
// magnitude drops below 1e-10; NumericError after 100 sweeps without
// convergence.
SymmetricEigen symmetric_eigen(const std::vector<double>& matrix,
                               std::size_t n);

}  // namespace simconf
