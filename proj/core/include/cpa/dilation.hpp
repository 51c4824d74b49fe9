#pragma once

#include <vector>

#include "cpa/matrix.hpp"

namespace cpa {

/// An N x N unitary embedding a (possibly sub-unitary) M x M transformation
/// on its signal_modes x signal_modes block. Ancilla inputs are vacuum by
/// convention: simulations must inject exactly zero amplitude there.
struct DilatedUnitary {
  ComplexMatrix matrix;
  std::vector<int> signal_modes;
  std::vector<int> ancilla_modes;
  ComplexMatrix source;
};

/// Embed m into a unitary by coupling each singular mode with sigma < 1-1e-9
/// to one appended ancilla mode through the real rotation block
/// [[sigma, k], [k, -sigma]], k = sqrt(1 - sigma^2). Ancillas are appended
/// after the signal modes in singular-value order.
///
/// Throws DomainError if any singular value exceeds 1 + 1e-12 (gain is out of
/// scope) or m is not square.
DilatedUnitary dilate(const ComplexMatrix& m);

/// Drop every ancilla mode whose couplings to all other modes are < tol while
/// its diagonal has magnitude within [1-tol, 1]. No-op when nothing qualifies.
DilatedUnitary reduce_ancillas(const DilatedUnitary& d, double tol);

/// Extend with decoupled identity ancilla modes up to n_modes (no-op when
/// already that large). Keeps a lossless device drivable through the same
/// fixed-width pipeline as a lossy one.
DilatedUnitary pad_to_modes(const DilatedUnitary& d, int n_modes);

}  // namespace cpa
