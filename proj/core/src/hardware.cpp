#include "cpa/hardware.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cpa/errors.hpp"
#include "cpa/format.hpp"

namespace cpa {

namespace {

constexpr double kMaxCurrentA = 0.024;  // driver channel limit

// linear least squares over {cos(b p), sin(b p), 1} for a fixed modulation;
// returns SSE and optionally the coefficients
double fringe_linear_solve(const std::vector<double>& p,
                           const std::vector<double>& y, double b, double* ac,
                           double* as, double* d) {
  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) {
    const double base[3] = {std::cos(b * p[i]), std::sin(b * p[i]), 1.0};
    for (int r = 0; r < 3; ++r) {
      rhs[r] += base[r] * y[i];
      for (int c = 0; c < 3; ++c) m[r][c] += base[r] * base[c];
    }
  }
  // Cramer solve; fall back to flat fit when nearly singular
  const double det =
      m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  double sol[3];
  if (std::abs(det) < 1e-12) {
    sol[0] = sol[1] = 0;
    sol[2] = rhs[2] / std::max(1.0, m[2][2]);
  } else {
    for (int c = 0; c < 3; ++c) {
      double mm[3][3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mm[i][j] = (j == c) ? rhs[i] : m[i][j];
      const double dc =
          mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
          mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
          mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
      sol[c] = dc / det;
    }
  }
  double sse = 0;
  for (int i = 0; i < n; ++i) {
    const double model =
        sol[0] * std::cos(b * p[i]) + sol[1] * std::sin(b * p[i]) + sol[2];
    sse += (y[i] - model) * (y[i] - model);
  }
  if (ac) *ac = sol[0];
  if (as) *as = sol[1];
  if (d) *d = sol[2];
  return sse;
}

HeaterCalibration calibration_from_json(const nlohmann::json& j) {
  HeaterCalibration cal;
  cal.resistance = j.at("resistance_ohm").get<double>();
  cal.cubic_coeff = j.value("cubic_coeff_ohm_per_a2", 0.0);
  cal.fringe_amplitude = j.at("fringe_amplitude").get<double>();
  cal.modulation = j.at("modulation_rad_per_mw").get<double>();
  cal.offset = j.at("offset_rad").get<double>();
  cal.baseline = j.at("baseline").get<double>();
  return cal;
}

}  // namespace

void validate_calibration(const HeaterCalibration& cal) {
  if (!(cal.resistance > 0))
    throw DomainError("calibration: resistance must be positive");
  if (!(cal.baseline > 0))
    throw DomainError("calibration: baseline must be positive");
  if (!(cal.modulation > 0))
    throw DomainError("calibration: modulation must be positive");
  const double period = kTwoPi / cal.modulation;
  if (period < 1.0 || period > 1000.0)
    throw DomainError("calibration: modulation period outside 1-1000 mW");
}

IvFit fit_iv(const std::vector<double>& currents_a,
             const std::vector<double>& voltages_v) {
  if (currents_a.size() != voltages_v.size())
    throw DomainError("fit_iv: length mismatch");
  if (currents_a.size() < 4) throw DomainError("fit_iv: need at least 4 points");
  const std::set<double> distinct(currents_a.begin(), currents_a.end());
  if (distinct.size() < 2)
    throw DomainError("fit_iv: currents must not be all identical");

  // normal equations over {I, I^3}
  double s2 = 0, s4 = 0, s6 = 0, s1v = 0, s3v = 0;
  for (size_t i = 0; i < currents_a.size(); ++i) {
    const double x = currents_a[i];
    const double x2 = x * x;
    s2 += x2;
    s4 += x2 * x2;
    s6 += x2 * x2 * x2;
    s1v += x * voltages_v[i];
    s3v += x * x2 * voltages_v[i];
  }
  const double det = s2 * s6 - s4 * s4;
  const double scale = std::max({s2, s6, 1e-300});
  if (std::abs(det) < 1e-12 * scale * scale)
    throw DomainError("fit_iv: rank-deficient design (degenerate currents)");

  IvFit fit;
  fit.resistance = (s6 * s1v - s4 * s3v) / det;
  fit.cubic_coeff = (s2 * s3v - s4 * s1v) / det;
  double sse = 0;
  for (size_t i = 0; i < currents_a.size(); ++i) {
    const double x = currents_a[i];
    const double model = fit.resistance * x + fit.cubic_coeff * x * x * x;
    sse += (voltages_v[i] - model) * (voltages_v[i] - model);
  }
  fit.residual_rms = std::sqrt(sse / currents_a.size());
  return fit;
}

FringeFit fit_fringe(const std::vector<double>& power_mw,
                     const std::vector<double>& optical) {
  if (power_mw.size() != optical.size())
    throw DomainError("fit_fringe: length mismatch");
  const int n = static_cast<int>(power_mw.size());
  if (n < 6) throw DomainError("fit_fringe: need at least 6 points");

  const auto [lo_it, hi_it] = std::minmax_element(power_mw.begin(), power_mw.end());
  const double span = *hi_it - *lo_it;
  if (!(span > 0)) throw DomainError("fit_fringe: degenerate power range");
  double min_dx = span;
  {
    std::vector<double> sorted = power_mw;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 1; i < n; ++i)
      min_dx = std::min(min_dx, std::max(sorted[i] - sorted[i - 1], 1e-12));
  }

  // coarse scan over candidate modulations, then Gauss-Newton on all four
  // parameters with a Levenberg damping fallback
  const double b_lo = kTwoPi / (2.0 * span);
  const double b_hi = kTwoPi / (2.0 * min_dx);
  double best_b = b_lo, best_sse = std::numeric_limits<double>::infinity();
  const int kScan = 400;
  for (int i = 0; i <= kScan; ++i) {
    const double b = b_lo * std::pow(b_hi / b_lo, double(i) / kScan);
    const double sse = fringe_linear_solve(power_mw, optical, b, nullptr,
                                           nullptr, nullptr);
    if (sse < best_sse) {
      best_sse = sse;
      best_b = b;
    }
  }

  double ac, as, d, b = best_b;
  fringe_linear_solve(power_mw, optical, b, &ac, &as, &d);
  double lambda = 1e-9;
  double sse_prev = best_sse;
  for (int iter = 0; iter < 200; ++iter) {
    // residuals r_i = y_i - (ac cos + as sin + d); J columns d r / d theta
    double jtj[4][4] = {};
    double jtr[4] = {};
    for (int i = 0; i < n; ++i) {
      const double cb = std::cos(b * power_mw[i]);
      const double sb = std::sin(b * power_mw[i]);
      const double r = optical[i] - (ac * cb + as * sb + d);
      const double row[4] = {cb, sb, 1.0,
                             power_mw[i] * (-ac * sb + as * cb)};
      for (int a2 = 0; a2 < 4; ++a2) {
        jtr[a2] += row[a2] * r;
        for (int b2 = 0; b2 < 4; ++b2) jtj[a2][b2] += row[a2] * row[b2];
      }
    }
    for (int a2 = 0; a2 < 4; ++a2) jtj[a2][a2] *= 1.0 + lambda;
    // 4x4 Gaussian elimination
    double m[4][5];
    for (int r2 = 0; r2 < 4; ++r2) {
      for (int c2 = 0; c2 < 4; ++c2) m[r2][c2] = jtj[r2][c2];
      m[r2][4] = jtr[r2];
    }
    bool singular = false;
    for (int c2 = 0; c2 < 4 && !singular; ++c2) {
      int piv = c2;
      for (int r2 = c2 + 1; r2 < 4; ++r2)
        if (std::abs(m[r2][c2]) > std::abs(m[piv][c2])) piv = r2;
      if (std::abs(m[piv][c2]) < 1e-300) {
        singular = true;
        break;
      }
      std::swap(m[piv], m[c2]);
      for (int r2 = c2 + 1; r2 < 4; ++r2) {
        const double f = m[r2][c2] / m[c2][c2];
        for (int k = c2; k < 5; ++k) m[r2][k] -= f * m[c2][k];
      }
    }
    if (singular) break;
    double step[4];
    for (int c2 = 3; c2 >= 0; --c2) {
      double acc = m[c2][4];
      for (int k = c2 + 1; k < 4; ++k) acc -= m[c2][k] * step[k];
      step[c2] = acc / m[c2][c2];
    }
    const double ac2 = ac + step[0], as2 = as + step[1], d2 = d + step[2],
                 b2 = b + step[3];
    double sse = 0;
    for (int i = 0; i < n; ++i) {
      const double model =
          ac2 * std::cos(b2 * power_mw[i]) + as2 * std::sin(b2 * power_mw[i]) + d2;
      sse += (optical[i] - model) * (optical[i] - model);
    }
    if (sse <= sse_prev) {
      ac = ac2;
      as = as2;
      d = d2;
      b = b2;
      lambda = std::max(lambda * 0.25, 1e-12);
      const double rel = std::abs(sse_prev - sse) / std::max(sse_prev, 1e-300);
      sse_prev = sse;
      if (rel < 1e-15 && std::abs(step[3]) < 1e-12 * std::max(1.0, std::abs(b)))
        break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e8) break;
    }
  }

  if (b < 0) {  // cos is even: fold the sign into the quadrature term
    b = -b;
    as = -as;
  }

  FringeFit fit;
  fit.amplitude = std::hypot(ac, as);
  fit.modulation = b;
  fit.offset = fit.amplitude > 0 ? wrap_two_pi(std::atan2(-as, ac)) : 0.0;
  fit.baseline = d;
  fit.residual_rms = std::sqrt(sse_prev / n);

  double scale = 0;
  for (double y : optical) scale = std::max(scale, std::abs(y));
  if (fit.amplitude < 1e-7 * std::max(scale, 1.0))
    throw DomainError("fit_fringe: no fringe in the data (flat signal)");
  if (span < kTwoPi / fit.modulation - 1e-9)
    throw DomainError("fit_fringe: data spans less than one modulation period");
  return fit;
}

double phase_to_power_mw(double target_phase, const HeaterCalibration& cal) {
  validate_calibration(cal);
  double delta = target_phase - cal.offset;
  while (delta < 0) delta += kTwoPi;
  return delta / cal.modulation;
}

double power_to_current_a(double power_mw, const HeaterCalibration& cal) {
  if (power_mw < 0) throw DomainError("power_to_current: negative power");
  if (!(cal.resistance > 0))
    throw DomainError("power_to_current: resistance must be positive");
  const double p_w = power_mw * 1e-3;
  double i2;
  if (cal.cubic_coeff == 0.0) {
    i2 = p_w / cal.resistance;
  } else {
    // beta I^4 + R I^2 - p = 0, quadratic in I^2
    const double disc = cal.resistance * cal.resistance + 4.0 * cal.cubic_coeff * p_w;
    i2 = (-cal.resistance + std::sqrt(disc)) / (2.0 * cal.cubic_coeff);
  }
  const double current = std::sqrt(std::max(i2, 0.0));
  if (current > kMaxCurrentA + 1e-15)
    throw DomainError("power_to_current: required current exceeds the 24 mA drive limit");
  return current;
}

CalibrationStore parse_calibration_store(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("calibration store: invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw DomainError("calibration store: top level must be an object");
  CalibrationStore store;
  try {
    for (auto it = j.begin(); it != j.end(); ++it)
      store[it.key()] = calibration_from_json(it.value());
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("calibration store: ") + e.what());
  }
  return store;
}

std::string calibration_store_to_json(const CalibrationStore& store) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [id, cal] : store) {
    if (!first) os << ",";
    first = false;
    os << "\"" << json_escape(id) << "\":{"
       << "\"resistance_ohm\":" << fmt17(cal.resistance)
       << ",\"cubic_coeff_ohm_per_a2\":" << fmt17(cal.cubic_coeff)
       << ",\"fringe_amplitude\":" << fmt17(cal.fringe_amplitude)
       << ",\"modulation_rad_per_mw\":" << fmt17(cal.modulation)
       << ",\"offset_rad\":" << fmt17(cal.offset)
       << ",\"baseline\":" << fmt17(cal.baseline) << "}";
  }
  os << "}";
  return os.str();
}

std::vector<HeaterDriveRow> mesh_drive_table(const MeshProgram& program,
                                             const CalibrationStore& store) {
  auto lookup = [&](const std::string& id) -> const HeaterCalibration& {
    auto it = store.find(id);
    if (it != store.end()) return it->second;
    it = store.find("default");
    if (it != store.end()) return it->second;
    throw DomainError("calibration store: no entry for heater '" + id +
                      "' and no default");
  };

  std::vector<HeaterDriveRow> rows;
  for (size_t k = 0; k < program.settings.size(); ++k) {
    const MziSetting& s = program.settings[k];
    for (const auto& [suffix, phase] :
         {std::pair<const char*, double>{"theta", s.theta},
          std::pair<const char*, double>{"phi", s.phi}}) {
      HeaterDriveRow row;
      row.heater_id = "mzi" + std::to_string(k) + "_" + suffix;
      row.phase = phase;
      const HeaterCalibration& cal = lookup(row.heater_id);
      row.power_mw = phase_to_power_mw(phase, cal);
      row.current_ma = power_to_current_a(row.power_mw, cal) * 1e3;
      rows.push_back(row);
    }
  }
  for (size_t j = 0; j < program.output_phases.size(); ++j) {
    HeaterDriveRow row;
    row.heater_id = "output" + std::to_string(j);
    row.phase = program.output_phases[j];
    const HeaterCalibration& cal = lookup(row.heater_id);
    row.power_mw = phase_to_power_mw(row.phase, cal);
    row.current_ma = power_to_current_a(row.power_mw, cal) * 1e3;
    rows.push_back(row);
  }
  return rows;
}

void write_drive_csv(const std::vector<HeaterDriveRow>& rows,
                     std::ostream& out) {
  out << "heater_id,theta_or_phi,power_mW,current_mA\n";
  for (const auto& r : rows) {
    out << r.heater_id << "," << fmt17(r.phase) << "," << fmt17(r.power_mw)
        << "," << fmt17(r.current_ma) << "\n";
  }
}

}  // namespace cpa
