#include "cpa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpa/errors.hpp"

namespace cpa {

namespace {

constexpr int kMaxSvdDim = 16;
constexpr int kMaxPermanentDim = 10;

// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
// On return h carries the eigenvalues on its diagonal and v the eigenvector
// columns (h_in = v * diag * v^dagger).
void jacobi_hermitian(ComplexMatrix& h, ComplexMatrix& v) {
  const int n = h.rows();
  v = ComplexMatrix::identity(n);
  if (n < 2) return;

  double scale = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(h.at(i, j)));
  if (scale == 0) return;
  const double stop = 1e-16 * scale;

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(h.at(p, q)));
    if (off < stop) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cdouble hpq = h.at(p, q);
        const double apq = std::abs(hpq);
        if (apq < stop) continue;
        const double app = h.at(p, p).real();
        const double aqq = h.at(q, q).real();
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cdouble phase = hpq / apq;  // e^{i arg(h_pq)}

        // rows/columns p and q of h under R^dagger h R with
        // R[p,p]=c, R[p,q]=s*phase, R[q,p]=-s*conj(phase), R[q,q]=c
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const cdouble hkp = h.at(k, p);
          const cdouble hkq = h.at(k, q);
          h.at(k, p) = c * hkp - s * std::conj(phase) * hkq;
          h.at(k, q) = s * phase * hkp + c * hkq;
          h.at(p, k) = std::conj(h.at(k, p));
          h.at(q, k) = std::conj(h.at(k, q));
        }
        h.at(p, p) = app - t * apq;
        h.at(q, q) = aqq + t * apq;
        h.at(p, q) = 0;
        h.at(q, p) = 0;

        for (int k = 0; k < n; ++k) {
          const cdouble vkp = v.at(k, p);
          const cdouble vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * std::conj(phase) * vkq;
          v.at(k, q) = s * phase * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace

SvdResult svd(const ComplexMatrix& m) {
  if (!m.square()) throw DomainError("svd: matrix must be square");
  if (m.rows() > kMaxSvdDim) throw DomainError("svd: dimension exceeds 16");
  if (!m.all_finite()) throw DomainError("svd: non-finite entries");
  const int n = m.rows();

  ComplexMatrix h = m.adjoint() * m;
  ComplexMatrix v;
  jacobi_hermitian(h, v);

  // singular value for eigencolumn k is ||m v_k||, which keeps
  // u_k = m v_k / sigma_k exactly unit-norm even for tiny sigma
  std::vector<std::vector<cdouble>> mv(n);
  std::vector<double> sig(n);
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) {
    std::vector<cdouble> col(n);
    for (int i = 0; i < n; ++i) col[i] = v.at(i, k);
    mv[k] = m.apply(col);
    double s2 = 0;
    for (const auto& z : mv[k]) s2 += std::norm(z);
    sig[k] = std::sqrt(s2);
    order[k] = k;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sig[a] > sig[b]; });

  SvdResult out;
  out.left = ComplexMatrix(n, n);
  out.right_conjugate = ComplexMatrix(n, n);
  out.singular_values.resize(n);

  // right_conjugate rows are conj(v_k); fix each row's phase so its first
  // element of largest magnitude is real nonnegative, rotating u_k to match
  for (int kk = 0; kk < n; ++kk) {
    const int k = order[kk];
    out.singular_values[kk] = sig[k];

    std::vector<cdouble> w(n);
    for (int j = 0; j < n; ++j) w[j] = std::conj(v.at(j, k));
    int imax = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(w[j]) > std::abs(w[imax])) imax = j;
    cdouble ph = 1.0;
    if (std::abs(w[imax]) > 0) ph = w[imax] / std::abs(w[imax]);
    for (int j = 0; j < n; ++j) out.right_conjugate.at(kk, j) = w[j] * std::conj(ph);

    if (sig[k] > 1e-12) {
      // m = sum_k u_k sigma_k w_k requires u_k = m v_k' / sigma_k with
      // v_k' = conj(w_k row) = v_k * conj(ph)... the same rotation as w
      for (int i = 0; i < n; ++i)
        out.left.at(i, kk) = mv[k][i] * ph / sig[k];
    }
    // columns for sigma <= 1e-12 are completed below
  }

  // complete null columns: Gram-Schmidt standard basis vectors against the
  // columns already placed
  for (int kk = 0; kk < n; ++kk) {
    if (out.singular_values[kk] > 1e-12) continue;
    for (int e = 0; e < n; ++e) {
      std::vector<cdouble> cand(n);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (int c = 0; c < n; ++c) {
          if (c == kk) continue;
          double cn = 0;
          for (int i = 0; i < n; ++i) cn += std::norm(out.left.at(i, c));
          if (cn < 0.25) continue;  // unset column
          cdouble dot = 0;
          for (int i = 0; i < n; ++i)
            dot += std::conj(out.left.at(i, c)) * cand[i];
          for (int i = 0; i < n; ++i) cand[i] -= dot * out.left.at(i, c);
        }
      }
      double nrm = 0;
      for (const auto& z : cand) nrm += std::norm(z);
      nrm = std::sqrt(nrm);
      if (nrm > 1e-6) {
        for (int i = 0; i < n; ++i) out.left.at(i, kk) = cand[i] / nrm;
        break;
      }
    }
  }
  return out;
}

cdouble permanent(const ComplexMatrix& m) {
  if (!m.square() && m.rows() != 0)
    throw DomainError("permanent: matrix must be square");
  const int n = m.rows();
  if (n > kMaxPermanentDim) throw DomainError("permanent: dimension exceeds 10");

  if (n == 0) return 1.0;
  if (n == 1) return m.at(0, 0);
  if (n == 2) return m.at(0, 0) * m.at(1, 1) + m.at(0, 1) * m.at(1, 0);
  if (n == 3)
    return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) + m.at(1, 2) * m.at(2, 1)) +
           m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) + m.at(1, 2) * m.at(2, 0)) +
           m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) + m.at(1, 1) * m.at(2, 0));

  // Ryser with Gray-code subset enumeration:
  // per(m) = (-1)^n sum_{S != {}} (-1)^|S| prod_i sum_{j in S} m_ij
  std::vector<cdouble> rowsum(n, 0.0);
  cdouble total = 0;
  unsigned gray_prev = 0;
  int popcount = 0;
  const unsigned limit = 1u << n;
  for (unsigned k = 1; k < limit; ++k) {
    const unsigned gray = k ^ (k >> 1);
    const unsigned changed = gray ^ gray_prev;
    int j = 0;
    while (!((changed >> j) & 1u)) ++j;
    if (gray & changed) {
      for (int i = 0; i < n; ++i) rowsum[i] += m.at(i, j);
      ++popcount;
    } else {
      for (int i = 0; i < n; ++i) rowsum[i] -= m.at(i, j);
      --popcount;
    }
    gray_prev = gray;
    cdouble prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= rowsum[i];
    total += (popcount & 1) ? -prod : prod;  // (-1)^|S| prod
  }
  return (n % 2 == 0) ? total : -total;  // (-1)^n sum

}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (!m.square()) return false;
  const ComplexMatrix g = m.adjoint() * m;
  const int n = m.rows();
  double dev = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dev = std::max(dev, std::abs(g.at(i, j) - (i == j ? 1.0 : 0.0)));
  return dev < tol;
}

}  // namespace cpa
