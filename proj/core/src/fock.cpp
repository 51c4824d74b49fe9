#include "cpa/fock.hpp"

#include <cmath>

#include "cpa/errors.hpp"
#include "cpa/numerics.hpp"

namespace cpa {

namespace {

constexpr int kMaxBasisSize = 10000;
constexpr double kUnitaryTol = 1e-10;

long long binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long out = 1;
  for (long long i = 1; i <= k; ++i) {
    out = out * (n - k + i) / i;
    if (out > 4 * kMaxBasisSize) return out;  // enough to reject
  }
  return out;
}

void enumerate_rec(int modes_left, int photons_left, std::vector<int>& prefix,
                   std::vector<std::vector<int>>& out) {
  if (modes_left == 1) {
    prefix.push_back(photons_left);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int k = photons_left; k >= 0; --k) {
    prefix.push_back(k);
    enumerate_rec(modes_left - 1, photons_left - k, prefix, out);
    prefix.pop_back();
  }
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

int FockBasis::index_of(const std::vector<int>& occupation) const {
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i] == occupation) return static_cast<int>(i);
  return -1;
}

FockBasis enumerate_basis(int n_modes, int n_photons) {
  if (n_modes < 1) throw DomainError("enumerate_basis: need at least one mode");
  if (n_photons < 0) throw DomainError("enumerate_basis: negative photon count");
  if (binomial(n_photons + n_modes - 1, n_modes - 1) > kMaxBasisSize)
    throw DomainError("enumerate_basis: basis would exceed 10000 states");

  FockBasis basis;
  basis.n_modes = n_modes;
  basis.n_photons = n_photons;
  std::vector<int> prefix;
  enumerate_rec(n_modes, n_photons, prefix, basis.states);
  return basis;
}

std::string occupation_label(const std::vector<int>& occupation) {
  std::string out;
  for (int n : occupation) out += std::to_string(n);
  return out;
}

ComplexMatrix photon_unitary(const ComplexMatrix& u, int n_photons) {
  if (!u.square()) throw DomainError("photon_unitary: matrix must be square");
  if (!is_unitary(u, kUnitaryTol))
    throw NumericError("photon_unitary: mode matrix is not unitary");

  const FockBasis basis = enumerate_basis(u.rows(), n_photons);
  const int dim = basis.size();

  // precompute row/column index expansions and 1/sqrt(prod n_i!)
  std::vector<std::vector<int>> expansion(dim);
  std::vector<double> inv_root_fact(dim);
  for (int i = 0; i < dim; ++i) {
    double f = 1;
    for (int mode = 0; mode < basis.n_modes; ++mode) {
      const int occ = basis.states[i][mode];
      for (int c = 0; c < occ; ++c) expansion[i].push_back(mode);
      f *= factorial(occ);
    }
    inv_root_fact[i] = 1.0 / std::sqrt(f);
  }

  ComplexMatrix out(dim, dim);
  ComplexMatrix sub(n_photons, n_photons);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      for (int a = 0; a < n_photons; ++a)
        for (int b = 0; b < n_photons; ++b)
          sub.at(a, b) = u.at(expansion[i][a], expansion[j][b]);
      out.at(i, j) = permanent(sub) * inv_root_fact[i] * inv_root_fact[j];
    }
  }
  return out;
}

StateVector prepare_single_photon(double phi) {
  StateVector sv;
  sv.basis = enumerate_basis(3, 1);
  sv.amplitudes.assign(3, 0.0);
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  sv.amplitudes[sv.basis.index_of({1, 0, 0})] =
      cdouble(std::cos(phi), std::sin(phi)) * inv_root2;
  sv.amplitudes[sv.basis.index_of({0, 1, 0})] = -inv_root2;
  return sv;
}

StateVector prepare_noon(double phi) {
  StateVector sv;
  sv.basis = enumerate_basis(3, 2);
  sv.amplitudes.assign(sv.basis.size(), 0.0);
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  sv.amplitudes[sv.basis.index_of({2, 0, 0})] =
      cdouble(std::cos(2 * phi), std::sin(2 * phi)) * inv_root2;
  sv.amplitudes[sv.basis.index_of({0, 2, 0})] = -inv_root2;
  return sv;
}

ProbabilityDistribution output_probabilities(const ComplexMatrix& u,
                                             const StateVector& state) {
  if (u.rows() != state.basis.n_modes)
    throw DomainError("output_probabilities: mode count mismatch");
  const ComplexMatrix lifted = photon_unitary(u, state.basis.n_photons);
  const std::vector<cdouble> amp = lifted.apply(state.amplitudes);
  ProbabilityDistribution dist;
  dist.basis = state.basis;
  dist.probabilities.resize(amp.size());
  for (size_t i = 0; i < amp.size(); ++i) dist.probabilities[i] = std::norm(amp[i]);
  return dist;
}

}  // namespace cpa
