#pragma once

#include <string>
#include <vector>

#include "cpa/lossybs.hpp"
#include "cpa/matrix.hpp"

namespace cpa {

/// One Mach-Zehnder cell acting on adjacent modes (mode, mode+1).
/// `layer` is the column index in the diagonally packed mesh drawing:
/// consecutive settings stay in one layer while they climb to higher mode
/// pairs, and drop to a new layer otherwise.
struct MziSetting {
  int mode = 0;
  double theta = 0;  // internal phase, [0, 2pi)
  double phi = 0;    // external phase, [0, 2pi)
  int layer = 0;
};

/// Ordered mesh program: settings apply first-to-last, then the per-mode
/// output phases.
struct MeshProgram {
  int n_modes = 0;
  std::vector<MziSetting> settings;
  std::vector<double> output_phases;  // [0, 2pi), one per mode
};

/// Transfer matrix of a single MZI:
///   e^{i(theta/2 + pi/2)} [[e^{i phi} sin(theta/2),  cos(theta/2)],
///                          [e^{i phi} cos(theta/2), -sin(theta/2)]]
/// theta = pi routes bar, theta = 0 routes cross.
ComplexMatrix mzi_matrix(double theta, double phi);

/// Rectangular mesh decomposition of an N x N unitary (N <= 16) into
/// N(N-1)/2 MZIs plus output phases, with residual diagonal phases pushed to
/// the output side. reconstruct(decompose(u)) == u to ~1e-13.
///
/// Throws DomainError for non-square/oversized input, NumericError (with the
/// residual) when u is not unitary within 1e-10.
MeshProgram decompose(const ComplexMatrix& u);

/// Product of the embedded 2x2 blocks in program order followed by
/// diag(e^{i delta_j}).
ComplexMatrix reconstruct(const MeshProgram& p);

struct CpaPhases {
  double theta2;            // internal phase of the ancilla-routing MZI
  double phi3_minus_phi2;   // external phase difference of the final two MZIs
};

/// Closed-form phase settings for the three-MZI mesh of a dilated
/// port-symmetric lossy beam splitter:
///   theta2 = 2 arccos(sqrt(2 absorption))
///   phi3 - phi2 = arg(t - r) - arg(t + r) + theta2/2 + pi/2   (mod 2pi)
/// with arg(0) taken as 0. Independent of the decomposition; used as an
/// oracle against decompose().
CpaPhases cpa_phases(const LossyBeamSplitter& bs);

/// delta_2 - delta_1 reduced to (-pi, pi]. For meshes compiled from dilated
/// 3-mode coherent-absorber unitaries this is always +-pi.
double output_phase_relation(const MeshProgram& p);

/// JSON form: {"n_modes":N,"mzis":[{"layer":..,"modes":[i,j],"theta":..,
/// "phi":..},...],"output_phases":[...]}, floats at 17 significant digits.
std::string mesh_to_json(const MeshProgram& p);

}  // namespace cpa
