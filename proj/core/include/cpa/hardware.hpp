#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cpa/clements.hpp"

namespace cpa {

/// Thermo-optic heater model:
///   V(I)       = resistance * I + cubic_coeff * I^3
///   optical(p) = fringe_amplitude * cos(modulation * p + offset) + baseline
/// with p the electrical power in mW.
struct HeaterCalibration {
  double resistance = 0;        // ohms
  double cubic_coeff = 0;       // ohms per ampere^2
  double fringe_amplitude = 0;  // optical power units
  double modulation = 0;        // radians per milliwatt
  double offset = 0;            // radians, [0, 2pi)
  double baseline = 0;          // optical power units
};

/// Sanity bounds for constructed calibrations: resistance, baseline and
/// modulation positive, modulation period 2pi/b within 1-1000 mW.
void validate_calibration(const HeaterCalibration& cal);

struct IvFit {
  double resistance = 0;
  double cubic_coeff = 0;
  double residual_rms = 0;
};

/// Least squares over the {I, I^3} basis. Requires >= 4 points with distinct
/// currents; throws DomainError on a rank-deficient design.
IvFit fit_iv(const std::vector<double>& currents_a,
             const std::vector<double>& voltages_v);

struct FringeFit {
  double amplitude = 0;
  double modulation = 0;    // rad/mW
  double offset = 0;        // [0, 2pi)
  double baseline = 0;
  double residual_rms = 0;
};

/// Nonlinear least squares for the optical fringe. The modulation seed comes
/// from a coarse period scan of the detrended signal, then Gauss-Newton
/// refinement. Requires >= 6 points spanning at least one period; a
/// fringeless (flat) signal is a fit error.
FringeFit fit_fringe(const std::vector<double>& power_mw,
                     const std::vector<double>& optical);

/// Smallest nonnegative electrical power whose fringe phase reaches
/// target_phase; full 2pi increments of (target - offset) map to full
/// modulation periods.
double phase_to_power_mw(double target_phase, const HeaterCalibration& cal);

/// Drive current (amperes) for an electrical power p (mW):
/// the nonnegative root of cubic_coeff * I^4 + resistance * I^2 = p.
/// Throws DomainError above the 24 mA driver limit.
double power_to_current_a(double power_mw, const HeaterCalibration& cal);

using CalibrationStore = std::map<std::string, HeaterCalibration>;

/// JSON object mapping heater id -> calibration.
CalibrationStore parse_calibration_store(const std::string& json_text);
std::string calibration_store_to_json(const CalibrationStore& store);

struct HeaterDriveRow {
  std::string heater_id;
  double phase = 0;      // radians programmed on this heater
  double power_mw = 0;
  double current_ma = 0;
};

/// Translate a mesh program into per-heater drive settings. Heater ids are
/// "mzi<k>_theta" / "mzi<k>_phi" for the k-th setting and "output<j>" for
/// output phases; ids missing from the store fall back to "default".
std::vector<HeaterDriveRow> mesh_drive_table(const MeshProgram& program,
                                             const CalibrationStore& store);

/// CSV with header: heater_id, theta_or_phi, power_mW, current_mA.
void write_drive_csv(const std::vector<HeaterDriveRow>& rows,
                     std::ostream& out);

}  // namespace cpa
