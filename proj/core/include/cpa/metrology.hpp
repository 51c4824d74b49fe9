#pragma once

#include <string>
#include <vector>

#include "cpa/fock.hpp"

namespace cpa {

/// One outcome's value (probability, intensity, ...) sampled over a strictly
/// increasing phase grid.
struct PhaseCurve {
  std::vector<double> phis;
  std::vector<double> values;
  std::string outcome_label;
};

struct FisherResult {
  PhaseCurve fisher;   // FI(phi) on the input grid
  double max_value;    // sup over the grid
  double argmax_phi;
};

/// Classical Fisher information FI(phi) = (dP/dphi)^2 / P for one outcome
/// curve. Derivatives use 5-point stencils (grid step <= 1e-3 recommended on
/// theory curves). Points with P < 1e-12 and |dP/dphi| < 1e-9 are 0/0 limits:
/// their FI is filled by quadratic extrapolation from the nearest regular
/// neighbors, and contributes 0 when the whole curve is flat at zero.
FisherResult fisher_per_outcome(const PhaseCurve& curve);

/// Pointwise sum of per-outcome FI over curves sharing one grid.
FisherResult fisher_total(const std::vector<PhaseCurve>& curves);

/// Bhattacharyya coefficient sum_i sqrt(p_i q_i) in [0, 1]; 1 means equal.
/// Distributions must share a basis and sum to 1 within 1e-6 (they are
/// renormalized inside that tolerance).
double bhattacharyya(const ProbabilityDistribution& p,
                     const ProbabilityDistribution& q);

/// a cos(k phi + c) + d with integer k fixed by the input state (1 for single
/// photon, 2 for the two-photon NOON fringes).
struct SinusoidFit {
  double amplitude = 0;   // a >= 0
  int k = 1;
  double phase = 0;       // c, [0, 2pi)
  double offset = 0;      // d
  double residual_rms = 0;
};

/// Closed-form least squares in the {cos(k phi), sin(k phi), 1} basis.
/// Requires >= 4 points spanning at least one period (2pi/k).
SinusoidFit fit_sinusoid(const PhaseCurve& curve, int k);

struct VisibilityPhase {
  double visibility_s1;
  double visibility_s2;
  double relative_phase;  // c2 - c1 reduced to (-pi, pi]
};

/// Fringe visibility a/d per port and the phase offset between two ports.
/// Throws DomainError when either fit has offset <= 0 (degenerate fit).
VisibilityPhase visibility_and_phase(const SinusoidFit& s1_fit,
                                     const SinusoidFit& s2_fit);

/// y = a - b |x - x0| with b >= 0.
struct TriangularFit {
  double a = 0;
  double b = 0;
  double x0 = 0;
  double residual_rms = 0;
};

/// Least squares over (a, b, x0): golden-section search on x0 with the
/// closed-form (a, b) solve per candidate. Requires >= 5 points.
TriangularFit fit_triangular(const std::vector<double>& xs,
                             const std::vector<double>& ys);

/// Heralded second-order correlation from coincidence rates:
///   g2 = (r_abh * r_h) / (r_ah * r_bh).
/// Throws DomainError on negative rates or a zero denominator.
double heralded_g2(double r_abh, double r_ah, double r_bh, double r_h);

}  // namespace cpa
