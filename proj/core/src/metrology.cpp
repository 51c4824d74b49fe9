#include "cpa/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpa/errors.hpp"

namespace cpa {

namespace {

constexpr double kZeroProb = 1e-12;   // 0/0 detection: probability floor
constexpr double kZeroSlope = 1e-9;   // 0/0 detection: slope floor

// 5-point first derivative on a uniform grid (O(h^4)); falls back to local
// quadratic differences on non-uniform or short grids.
std::vector<double> differentiate(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;

  const double h = x[1] - x[0];
  bool uniform = n >= 5;
  for (int i = 1; i + 1 < n && uniform; ++i)
    if (std::abs((x[i + 1] - x[i]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      uniform = false;

  if (uniform) {
    const double w = 1.0 / (12.0 * h);
    d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) * w;
    d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) * w;
    for (int i = 2; i + 2 < n; ++i)
      d[i] = (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) * w;
    d[n - 2] =
        (-y[n - 5] + 6 * y[n - 4] - 18 * y[n - 3] + 10 * y[n - 2] + 3 * y[n - 1]) * w;
    d[n - 1] =
        (3 * y[n - 5] - 16 * y[n - 4] + 36 * y[n - 3] - 48 * y[n - 2] + 25 * y[n - 1]) * w;
    return d;
  }

  for (int i = 0; i < n; ++i) {
    const int c = std::clamp(i, 1, n - 2);
    const double h1 = x[c] - x[c - 1];
    const double h2 = x[c + 1] - x[c];
    // derivative of the quadratic through (c-1, c, c+1), evaluated at x[i]
    const double denom = h1 * h2 * (h1 + h2);
    const double a2 = (h1 * y[c + 1] - (h1 + h2) * y[c] + h2 * y[c - 1]) / denom;
    const double a1 =
        (h1 * h1 * y[c + 1] + (h2 * h2 - h1 * h1) * y[c] - h2 * h2 * y[c - 1]) /
        denom;
    d[i] = a1 + 2.0 * a2 * (x[i] - x[c]);
  }
  return d;
}

void check_curve(const PhaseCurve& curve) {
  if (curve.phis.size() != curve.values.size())
    throw DomainError("phase curve: grid/value length mismatch");
  if (curve.phis.size() < 2)
    throw DomainError("phase curve: need at least two grid points");
  for (size_t i = 1; i < curve.phis.size(); ++i)
    if (!(curve.phis[i] > curve.phis[i - 1]))
      throw DomainError("phase curve: grid must be strictly increasing");
  for (double v : curve.values)
    if (v < -kZeroProb)
      throw DomainError("phase curve: negative probability beyond tolerance");
}

// Quadratic (Lagrange) extrapolation of fi at phi from its nearest regular
// neighbors; the two-sided 0/0 limit of smooth Fisher curves.
double extrapolate_at(const std::vector<double>& phis,
                      const std::vector<double>& fi,
                      const std::vector<bool>& regular, int i) {
  std::vector<int> nearest;
  for (int off = 1; off < static_cast<int>(phis.size()); ++off) {
    if (i - off >= 0 && regular[i - off]) nearest.push_back(i - off);
    if (i + off < static_cast<int>(phis.size()) && regular[i + off])
      nearest.push_back(i + off);
    if (nearest.size() >= 3) break;
  }
  if (nearest.empty()) return 0.0;  // flat zero curve contributes nothing
  if (nearest.size() == 1) return fi[nearest[0]];
  if (nearest.size() == 2) {
    const int a = nearest[0], b = nearest[1];
    const double t = (phis[i] - phis[a]) / (phis[b] - phis[a]);
    return fi[a] + t * (fi[b] - fi[a]);
  }
  const int a = nearest[0], b = nearest[1], c = nearest[2];
  const double xa = phis[a], xb = phis[b], xc = phis[c], x = phis[i];
  return fi[a] * (x - xb) * (x - xc) / ((xa - xb) * (xa - xc)) +
         fi[b] * (x - xa) * (x - xc) / ((xb - xa) * (xb - xc)) +
         fi[c] * (x - xa) * (x - xb) / ((xc - xa) * (xc - xb));
}

}  // namespace

FisherResult fisher_per_outcome(const PhaseCurve& curve) {
  check_curve(curve);
  const int n = static_cast<int>(curve.phis.size());
  const std::vector<double> dp = differentiate(curve.phis, curve.values);

  std::vector<double> fi(n, 0.0);
  std::vector<bool> regular(n, false);
  for (int i = 0; i < n; ++i) {
    const double p = std::max(curve.values[i], 0.0);
    if (p >= kZeroProb) {
      fi[i] = dp[i] * dp[i] / p;
      regular[i] = true;
    } else if (std::abs(dp[i]) >= kZeroSlope) {
      // inconsistent data (zero probability, finite slope); bounded fallback
      fi[i] = dp[i] * dp[i] / kZeroProb;
      regular[i] = true;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!regular[i]) fi[i] = extrapolate_at(curve.phis, fi, regular, i);

  FisherResult out;
  out.fisher.phis = curve.phis;
  out.fisher.values = std::move(fi);
  out.fisher.outcome_label = curve.outcome_label;
  out.max_value = -std::numeric_limits<double>::infinity();
  out.argmax_phi = curve.phis.front();
  for (int i = 0; i < n; ++i) {
    if (out.fisher.values[i] > out.max_value) {
      out.max_value = out.fisher.values[i];
      out.argmax_phi = curve.phis[i];
    }
  }
  return out;
}

FisherResult fisher_total(const std::vector<PhaseCurve>& curves) {
  if (curves.empty()) throw DomainError("fisher_total: no curves");
  const std::vector<double>& grid = curves.front().phis;
  for (const PhaseCurve& c : curves) {
    if (c.phis.size() != grid.size())
      throw DomainError("fisher_total: phase grids differ");
    for (size_t i = 0; i < grid.size(); ++i)
      if (std::abs(c.phis[i] - grid[i]) > 1e-12)
        throw DomainError("fisher_total: phase grids differ");
  }

  FisherResult out;
  out.fisher.phis = grid;
  out.fisher.values.assign(grid.size(), 0.0);
  out.fisher.outcome_label = "total";
  for (const PhaseCurve& c : curves) {
    const FisherResult one = fisher_per_outcome(c);
    for (size_t i = 0; i < grid.size(); ++i)
      out.fisher.values[i] += one.fisher.values[i];
  }
  out.max_value = -std::numeric_limits<double>::infinity();
  out.argmax_phi = grid.front();
  for (size_t i = 0; i < grid.size(); ++i) {
    if (out.fisher.values[i] > out.max_value) {
      out.max_value = out.fisher.values[i];
      out.argmax_phi = grid[i];
    }
  }
  return out;
}

double bhattacharyya(const ProbabilityDistribution& p,
                     const ProbabilityDistribution& q) {
  if (p.basis.n_modes != q.basis.n_modes ||
      p.basis.n_photons != q.basis.n_photons ||
      p.probabilities.size() != q.probabilities.size())
    throw DomainError("bhattacharyya: basis mismatch");

  auto normalized = [](const std::vector<double>& v) {
    double sum = 0;
    for (double x : v) {
      if (x < -kZeroProb)
        throw DomainError("bhattacharyya: negative probability");
      sum += std::max(x, 0.0);
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw DomainError("bhattacharyya: distribution does not sum to 1");
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0) / sum;
    return out;
  };
  const std::vector<double> pn = normalized(p.probabilities);
  const std::vector<double> qn = normalized(q.probabilities);
  double b = 0;
  for (size_t i = 0; i < pn.size(); ++i) b += std::sqrt(pn[i] * qn[i]);
  return std::clamp(b, 0.0, 1.0);
}

SinusoidFit fit_sinusoid(const PhaseCurve& curve, int k) {
  check_curve(curve);
  if (k < 1) throw DomainError("fit_sinusoid: k must be a positive integer");
  const int n = static_cast<int>(curve.phis.size());
  if (n < 4) throw DomainError("fit_sinusoid: need at least 4 points");
  const double span = curve.phis.back() - curve.phis.front();
  if (span < kTwoPi / k - 1e-9)
    throw DomainError("fit_sinusoid: grid spans less than one period");

  // normal equations over {cos(k phi), sin(k phi), 1}
  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const double base[3] = {std::cos(k * curve.phis[i]),
                            std::sin(k * curve.phis[i]), 1.0};
    for (int a = 0; a < 3; ++a) {
      rhs[a] += base[a] * curve.values[i];
      for (int b = 0; b < 3; ++b) m[a][b] += base[a] * base[b];
    }
  }
  // 3x3 Gaussian elimination with partial pivoting
  int piv[3] = {0, 1, 2};
  for (int c = 0; c < 3; ++c) {
    int best = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[piv[r]][c]) > std::abs(m[piv[best]][c])) best = r;
    std::swap(piv[c], piv[best]);
    if (std::abs(m[piv[c]][c]) < 1e-14)
      throw DomainError("fit_sinusoid: singular normal equations");
    for (int r = c + 1; r < 3; ++r) {
      const double f = m[piv[r]][c] / m[piv[c]][c];
      for (int cc = c; cc < 3; ++cc) m[piv[r]][cc] -= f * m[piv[c]][cc];
      rhs[piv[r]] -= f * rhs[piv[c]];
    }
  }
  double sol[3];
  for (int c = 2; c >= 0; --c) {
    double acc = rhs[piv[c]];
    for (int cc = c + 1; cc < 3; ++cc) acc -= m[piv[c]][cc] * sol[cc];
    sol[c] = acc / m[piv[c]][c];
  }
  const double ac = sol[0], as = sol[1], d = sol[2];

  SinusoidFit fit;
  fit.k = k;
  fit.amplitude = std::hypot(ac, as);
  fit.phase = fit.amplitude > 0 ? wrap_two_pi(std::atan2(-as, ac)) : 0.0;
  fit.offset = d;
  double sse = 0;
  for (int i = 0; i < n; ++i) {
    const double model =
        fit.amplitude * std::cos(k * curve.phis[i] + fit.phase) + d;
    sse += (curve.values[i] - model) * (curve.values[i] - model);
  }
  fit.residual_rms = std::sqrt(sse / n);
  return fit;
}

VisibilityPhase visibility_and_phase(const SinusoidFit& s1_fit,
                                     const SinusoidFit& s2_fit) {
  if (s1_fit.offset <= 0 || s2_fit.offset <= 0)
    throw DomainError("visibility_and_phase: degenerate fit (offset <= 0)");
  VisibilityPhase out;
  out.visibility_s1 = s1_fit.amplitude / s1_fit.offset;
  out.visibility_s2 = s2_fit.amplitude / s2_fit.offset;
  out.relative_phase = wrap_pm_pi(s2_fit.phase - s1_fit.phase);
  return out;
}

namespace {

// closed-form (a, b >= 0) least squares for fixed x0; returns SSE
double triangle_solve(const std::vector<double>& xs,
                      const std::vector<double>& ys, double x0, double* a_out,
                      double* b_out) {
  const int n = static_cast<int>(xs.size());
  double su = 0, suu = 0, sy = 0, suy = 0;
  for (int i = 0; i < n; ++i) {
    const double u = -std::abs(xs[i] - x0);
    su += u;
    suu += u * u;
    sy += ys[i];
    suy += u * ys[i];
  }
  const double det = n * suu - su * su;
  double a, b;
  if (std::abs(det) < 1e-14) {
    a = sy / n;
    b = 0;
  } else {
    b = (n * suy - su * sy) / det;
    a = (sy - b * su) / n;
    if (b < 0) {  // flat fallback keeps the b >= 0 contract
      b = 0;
      a = sy / n;
    }
  }
  double sse = 0;
  for (int i = 0; i < n; ++i) {
    const double model = a - b * std::abs(xs[i] - x0);
    sse += (ys[i] - model) * (ys[i] - model);
  }
  if (a_out) *a_out = a;
  if (b_out) *b_out = b;
  return sse;
}

}  // namespace

TriangularFit fit_triangular(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw DomainError("fit_triangular: length mismatch");
  if (xs.size() < 5) throw DomainError("fit_triangular: need at least 5 points");

  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw DomainError("fit_triangular: degenerate x range");

  // coarse scan, then golden-section refinement of the best bracket
  const int kScan = 101;
  double best_x0 = lo, best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double x0 = lo + (hi - lo) * i / (kScan - 1);
    const double sse = triangle_solve(xs, ys, x0, nullptr, nullptr);
    if (sse < best_sse) {
      best_sse = sse;
      best_x0 = x0;
    }
  }
  const double step = (hi - lo) / (kScan - 1);
  double a_lo = std::max(lo, best_x0 - step);
  double b_hi = std::min(hi, best_x0 + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b_hi - gr * (b_hi - a_lo);
  double d = a_lo + gr * (b_hi - a_lo);
  double fc = triangle_solve(xs, ys, c, nullptr, nullptr);
  double fd = triangle_solve(xs, ys, d, nullptr, nullptr);
  for (int it = 0; it < 90 && (b_hi - a_lo) > 1e-13 * std::max(1.0, hi - lo);
       ++it) {
    if (fc < fd) {
      b_hi = d;
      d = c;
      fd = fc;
      c = b_hi - gr * (b_hi - a_lo);
      fc = triangle_solve(xs, ys, c, nullptr, nullptr);
    } else {
      a_lo = c;
      c = d;
      fc = fd;
      d = a_lo + gr * (b_hi - a_lo);
      fd = triangle_solve(xs, ys, d, nullptr, nullptr);
    }
  }
  TriangularFit fit;
  fit.x0 = (a_lo + b_hi) / 2.0;
  const double sse = triangle_solve(xs, ys, fit.x0, &fit.a, &fit.b);
  fit.residual_rms = std::sqrt(sse / xs.size());
  return fit;
}

double heralded_g2(double r_abh, double r_ah, double r_bh, double r_h) {
  if (r_abh < 0 || r_ah < 0 || r_bh < 0 || r_h < 0)
    throw DomainError("heralded_g2: rates must be nonnegative");
  if (r_ah * r_bh <= 0)
    throw DomainError("heralded_g2: zero two-fold coincidence rate leaves g2 undefined");
  return (r_abh * r_h) / (r_ah * r_bh);
}

}  // namespace cpa
