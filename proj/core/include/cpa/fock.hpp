#pragma once

#include <string>
#include <vector>

#include "cpa/matrix.hpp"

namespace cpa {

/// Canonical basis of n-photon occupation tuples over n_modes modes, ordered
/// by lexicographically decreasing occupation:
/// (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2).
struct FockBasis {
  int n_modes = 0;
  int n_photons = 0;
  std::vector<std::vector<int>> states;

  int size() const { return static_cast<int>(states.size()); }
  /// Index of an occupation tuple, -1 when absent.
  int index_of(const std::vector<int>& occupation) const;
};

/// Throws DomainError when the basis would exceed 10,000 states.
FockBasis enumerate_basis(int n_modes, int n_photons);

/// Occupation tuple as a digit string, e.g. (1,0,1) -> "101".
std::string occupation_label(const std::vector<int>& occupation);

struct StateVector {
  FockBasis basis;
  std::vector<cdouble> amplitudes;
};

struct ProbabilityDistribution {
  FockBasis basis;
  std::vector<double> probabilities;
};

/// Lift a mode-space unitary to the n-photon Fock space:
///   <out| Phi(u) |in> = permanent(u[out|in]) / sqrt(prod out_i! prod in_j!)
/// where u[out|in] repeats row i out_i times and column j in_j times.
/// The result is unitary whenever u is.
ComplexMatrix photon_unitary(const ComplexMatrix& u, int n_photons);

/// (e^{i phi} |100> - |010>) / sqrt(2) on the 1-photon, 3-mode basis; the
/// third mode is the (vacuum) ancilla.
StateVector prepare_single_photon(double phi);

/// (e^{2 i phi} |200> - |020>) / sqrt(2) on the 2-photon, 3-mode basis.
StateVector prepare_noon(double phi);

/// |Phi(u) . amplitudes|^2 componentwise; u must be unitary and act on
/// state.basis.n_modes modes.
ProbabilityDistribution output_probabilities(const ComplexMatrix& u,
                                             const StateVector& state);

}  // namespace cpa
