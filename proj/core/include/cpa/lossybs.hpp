#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cpa/matrix.hpp"

namespace cpa {

enum class BsKind { Type1, Type2, Custom };

/// Port-symmetric lossy beam splitter with scattering matrix [[t, r], [r, t]].
/// Physical devices satisfy
///   |t|^2 + |r|^2 + absorption = 1
///   2 |t| |r| cos(internal_phase) = -absorption     (minus branch)
///   absorption <= 1/2
/// Solver-constructed instances always do; hand-built Custom ones may not,
/// which validate() reports as data.
struct LossyBeamSplitter {
  cdouble t;              // transmission amplitude, phase convention arg(t) = 0
  cdouble r;              // reflection amplitude
  double absorption = 0;  // |A|^2 in [0, 1/2]
  double internal_phase = 0;  // arg(r) - arg(t), reduced to [0, 2pi)
  BsKind kind = BsKind::Custom;
};

enum class BsConstraint { EnergyConservation, PhaseRelation, AbsorptionBound };

std::string constraint_name(BsConstraint c);

/// Device with fixed internal phase pi; |r|/|t| grows from 0 to 1 as the
/// absorption grows from 0 to 1/2. `mirror` selects the quadratic root with
/// |r| -> 1 instead of |t| -> 1 as absorption -> 0.
LossyBeamSplitter solve_type1(double absorption, bool mirror = false);

/// Balanced device, |t| = |r| = sqrt((1-absorption)/2); the internal phase
/// runs from pi/2 to pi as the absorption grows from 0 to 1/2.
LossyBeamSplitter solve_type2(double absorption);

/// Wrap an arbitrary (t, r) pair; absorption and internal phase are derived.
LossyBeamSplitter custom_bs(cdouble t, cdouble r);

/// Constraint check at tolerance 1e-10; empty means physical (minus branch).
std::vector<BsConstraint> validate(const LossyBeamSplitter& bs);

/// Intensity removed from a coherent two-port probe (e^{i phi}, -1)/sqrt(2):
/// 1 - |t e^{i phi} - r|^2 / 2 - |r e^{i phi} - t|^2 / 2.
/// Equals absorption * (1 - cos phi) for minus-branch devices.
double absorbed_intensity(const LossyBeamSplitter& bs, double phi);

/// (|t - r|, |t + r|) sorted nonincreasing. For any valid minus-branch device
/// this is (1, sqrt(1 - 2 absorption)); the reason one ancilla mode suffices.
std::pair<double, double> singular_value_pair(const LossyBeamSplitter& bs);

/// The 2x2 scattering matrix [[t, r], [r, t]].
ComplexMatrix scattering_matrix(const LossyBeamSplitter& bs);

}  // namespace cpa
