#pragma once

#include <vector>

#include "cpa/matrix.hpp"

namespace cpa {

struct SvdResult {
  ComplexMatrix left;                   // unitary
  std::vector<double> singular_values;  // nonincreasing, nonnegative
  ComplexMatrix right_conjugate;        // unitary; m = left * diag(sv) * right_conjugate
};

/// SVD of a small square complex matrix (dimension <= 16) via Jacobi
/// eigendecomposition of m^dagger m.
///
/// Deterministic phase convention: in each row of right_conjugate the first
/// element of largest magnitude is made real and nonnegative. Singular values
/// tied within 1e-12 keep their post-sort order. This pins the factorization
/// so downstream mesh programs are byte-reproducible.
SvdResult svd(const ComplexMatrix& m);

/// Permanent of a square matrix, dimension <= 10. Direct expansion for
/// dimension <= 3, Ryser's formula with Gray-code ordering above.
cdouble permanent(const ComplexMatrix& m);

/// True iff max-abs entry of (m^dagger m - I) is < tol. Non-square inputs
/// are never unitary.
bool is_unitary(const ComplexMatrix& m, double tol);

}  // namespace cpa
