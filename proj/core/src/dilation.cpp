#include "cpa/dilation.hpp"

#include <algorithm>
#include <cmath>

#include "cpa/errors.hpp"
#include "cpa/numerics.hpp"

namespace cpa {

namespace {

// singular modes below this are lossy and get an ancilla; absorptions as
// small as 1e-8 must still dilate, so the margin sits well under that
constexpr double kLossyThreshold = 1.0 - 1e-9;

ComplexMatrix pad_to(const ComplexMatrix& m, int n) {
  ComplexMatrix out = ComplexMatrix::identity(n);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.at(i, j) = m.at(i, j);
  return out;
}

}  // namespace

DilatedUnitary dilate(const ComplexMatrix& m) {
  if (!m.square()) throw DomainError("dilate: matrix must be square");
  const int dim = m.rows();

  const SvdResult f = svd(m);
  for (double s : f.singular_values) {
    if (s > 1.0 + 1e-12)
      throw DomainError(
          "dilate: singular value exceeds 1; transformations with gain "
          "(parametric amplification) are unsupported");
  }

  std::vector<int> lossy;
  for (int k = 0; k < dim; ++k)
    if (f.singular_values[k] < kLossyThreshold) lossy.push_back(k);

  const int n = dim + static_cast<int>(lossy.size());
  ComplexMatrix sd = ComplexMatrix::identity(n);
  for (size_t a = 0; a < lossy.size(); ++a) {
    const int k = lossy[a];
    const int anc = dim + static_cast<int>(a);
    const double sigma = f.singular_values[k];
    const double kappa = std::sqrt(std::max(0.0, 1.0 - sigma * sigma));
    sd.at(k, k) = sigma;
    sd.at(k, anc) = kappa;
    sd.at(anc, k) = kappa;
    sd.at(anc, anc) = -sigma;
  }

  DilatedUnitary out;
  out.matrix = pad_to(f.left, n) * sd * pad_to(f.right_conjugate, n);
  out.source = m;
  for (int i = 0; i < dim; ++i) out.signal_modes.push_back(i);
  for (int i = dim; i < n; ++i) out.ancilla_modes.push_back(i);
  return out;
}

DilatedUnitary reduce_ancillas(const DilatedUnitary& d, double tol) {
  const int n = d.matrix.rows();
  std::vector<bool> drop(n, false);
  for (int a : d.ancilla_modes) {
    double coupling = 0;
    for (int k = 0; k < n; ++k) {
      if (k == a) continue;
      coupling = std::max(coupling, std::abs(d.matrix.at(a, k)));
      coupling = std::max(coupling, std::abs(d.matrix.at(k, a)));
    }
    const double diag = std::abs(d.matrix.at(a, a));
    if (coupling < tol && diag >= 1.0 - tol && diag <= 1.0 + tol) drop[a] = true;
  }

  std::vector<int> keep;
  for (int k = 0; k < n; ++k)
    if (!drop[k]) keep.push_back(k);
  if (static_cast<int>(keep.size()) == n) return d;

  DilatedUnitary out;
  out.source = d.source;
  out.matrix = ComplexMatrix(static_cast<int>(keep.size()),
                             static_cast<int>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i)
    for (size_t j = 0; j < keep.size(); ++j)
      out.matrix.at(static_cast<int>(i), static_cast<int>(j)) =
          d.matrix.at(keep[i], keep[j]);
  for (size_t i = 0; i < keep.size(); ++i) {
    const int old = keep[i];
    const bool signal =
        std::find(d.signal_modes.begin(), d.signal_modes.end(), old) !=
        d.signal_modes.end();
    if (signal)
      out.signal_modes.push_back(static_cast<int>(i));
    else
      out.ancilla_modes.push_back(static_cast<int>(i));
  }
  return out;
}

DilatedUnitary pad_to_modes(const DilatedUnitary& d, int n_modes) {
  const int n = d.matrix.rows();
  if (n >= n_modes) return d;
  DilatedUnitary out;
  out.source = d.source;
  out.matrix = pad_to(d.matrix, n_modes);
  out.signal_modes = d.signal_modes;
  out.ancilla_modes = d.ancilla_modes;
  for (int i = n; i < n_modes; ++i) out.ancilla_modes.push_back(i);
  return out;
}

}  // namespace cpa
