#include "cpa/clements.hpp"

#include <cmath>
#include <sstream>

#include "cpa/errors.hpp"
#include "cpa/format.hpp"
#include "cpa/numerics.hpp"

namespace cpa {

namespace {

constexpr int kMaxModes = 16;
constexpr double kNullTol = 1e-13;

// arg with the deterministic arg(0) = 0 convention. Keeps meshes of exactly
// degenerate devices (absorption 0 or 1/2) equal to their continuous limits.
double arg0(cdouble z) { return std::abs(z) < kNullTol ? 0.0 : std::arg(z); }

struct Op {
  int mode;
  double theta;
  double phi;
};

// Left-multiply the embedded MZI on rows (m, m+1).
void apply_left(ComplexMatrix& u, const Op& op) {
  const ComplexMatrix t = mzi_matrix(op.theta, op.phi);
  const int n = u.cols();
  for (int j = 0; j < n; ++j) {
    const cdouble a = u.at(op.mode, j);
    const cdouble b = u.at(op.mode + 1, j);
    u.at(op.mode, j) = t.at(0, 0) * a + t.at(0, 1) * b;
    u.at(op.mode + 1, j) = t.at(1, 0) * a + t.at(1, 1) * b;
  }
}

// Right-multiply by the embedded inverse (adjoint) MZI on columns (m, m+1).
void apply_right_inverse(ComplexMatrix& u, const Op& op) {
  const ComplexMatrix t = mzi_matrix(op.theta, op.phi);
  const int n = u.rows();
  for (int i = 0; i < n; ++i) {
    const cdouble a = u.at(i, op.mode);
    const cdouble b = u.at(i, op.mode + 1);
    u.at(i, op.mode) = a * std::conj(t.at(0, 0)) + b * std::conj(t.at(0, 1));
    u.at(i, op.mode + 1) = a * std::conj(t.at(1, 0)) + b * std::conj(t.at(1, 1));
  }
}

// Settings that zero (u . T^-1)[row, m] given a = u[row, m], b = u[row, m+1]:
//   e^{-i phi} sin(theta/2) a + cos(theta/2) b = 0.
// Fully degenerate pairs take the balanced setting (pi/2, pi) so decoupled
// modes decompose to the same pattern as their coupled limits.
Op right_null_params(int m, cdouble a, cdouble b) {
  if (std::abs(a) < kNullTol && std::abs(b) < kNullTol)
    return {m, kPi / 2.0, kPi};
  const double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
  const double phi = wrap_two_pi(arg0(a) - arg0(-b));
  return {m, theta, phi};
}

// Settings that zero (T . u)[m+1, col] given a = u[m, col], b = u[m+1, col]:
//   e^{i phi} cos(theta/2) a - sin(theta/2) b = 0.
Op left_null_params(int m, cdouble a, cdouble b) {
  if (std::abs(a) < kNullTol && std::abs(b) < kNullTol)
    return {m, kPi / 2.0, kPi};
  const double theta = 2.0 * std::atan2(std::abs(a), std::abs(b));
  const double phi = wrap_two_pi(arg0(b) - arg0(a));
  return {m, theta, phi};
}

// Layer assignment for the diagonally packed mesh drawing: stay in the
// current layer while consecutive settings climb to higher mode pairs.
void assign_layers(std::vector<MziSetting>& settings) {
  int layer = 0;
  int prev_mode = -1;
  bool first = true;
  for (auto& s : settings) {
    if (!first && s.mode <= prev_mode) ++layer;
    s.layer = layer;
    prev_mode = s.mode;
    first = false;
  }
}

}  // namespace

ComplexMatrix mzi_matrix(double theta, double phi) {
  const double half = theta / 2.0;
  const double s = std::sin(half);
  const double c = std::cos(half);
  const cdouble g = std::exp(cdouble(0, half + kPi / 2.0));
  const cdouble e = std::exp(cdouble(0, phi));
  return ComplexMatrix::from_rows({{g * e * s, g * c}, {g * e * c, -g * s}});
}

MeshProgram decompose(const ComplexMatrix& u_in) {
  if (!u_in.square()) throw DomainError("decompose: matrix must be square");
  const int n = u_in.rows();
  if (n > kMaxModes) throw DomainError("decompose: dimension exceeds 16");
  {
    const ComplexMatrix g = u_in.adjoint() * u_in;
    double residual = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        residual = std::max(residual, std::abs(g.at(i, j) - (i == j ? 1.0 : 0.0)));
    if (residual >= 1e-10) {
      std::ostringstream msg;
      msg << "decompose: input is not unitary (residual " << residual << ")";
      throw NumericError(msg.str());
    }
  }

  ComplexMatrix u = u_in;
  std::vector<Op> right_ops;
  std::vector<Op> left_ops;

  // null the lower-left triangle diagonal by diagonal, alternating between
  // column ops (odd diagonals) and row ops (even diagonals); 1-based indices
  for (int i = 1; i <= n - 1; ++i) {
    if (i % 2 == 1) {
      for (int j = 0; j <= i - 1; ++j) {
        const int row = n - 1 - j;   // 0-based target row
        const int m = i - j - 1;     // 0-based column pair (m, m+1)
        const Op op = right_null_params(m, u.at(row, m), u.at(row, m + 1));
        apply_right_inverse(u, op);
        u.at(row, m) = 0;
        right_ops.push_back(op);
      }
    } else {
      for (int j = 1; j <= i; ++j) {
        const int row = n + j - i - 1;  // 0-based target row
        const int col = j - 1;
        const int m = row - 1;          // row pair (m, m+1)
        const Op op = left_null_params(m, u.at(m, col), u.at(m + 1, col));
        apply_left(u, op);
        u.at(m + 1, col) = 0;
        left_ops.push_back(op);
      }
    }
  }

  double off = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) off = std::max(off, std::abs(u.at(i, j)));
  if (off > 1e-8) {
    std::ostringstream msg;
    msg << "decompose: nulling left off-diagonal residual " << off;
    throw NumericError(msg.str());
  }

  std::vector<cdouble> diag(n);
  for (int i = 0; i < n; ++i) {
    const cdouble d = u.at(i, i);
    diag[i] = std::abs(d) > 0 ? d / std::abs(d) : cdouble(1, 0);
  }

  // u_in = (prod left^-1) diag (prod right^-1)^-1; commute each trailing
  // left inverse through the diagonal: T(theta,phi)^-1 D = D' T(theta,phi')
  // with phi' = arg(d_m / d_{m+1}),
  //      d'_m = e^{-i(theta+pi)} e^{-i phi} d_{m+1},
  //      d'_{m+1} = e^{-i(theta+pi)} d_{m+1}.
  MeshProgram p;
  p.n_modes = n;
  for (const Op& op : right_ops)
    p.settings.push_back({op.mode, wrap_two_pi(op.theta), wrap_two_pi(op.phi), 0});
  for (auto it = left_ops.rbegin(); it != left_ops.rend(); ++it) {
    const Op& op = *it;
    const double phi_p = wrap_two_pi(std::arg(diag[op.mode] / diag[op.mode + 1]));
    const cdouble shift = std::exp(cdouble(0, -(op.theta + kPi)));
    const cdouble dm1 = diag[op.mode + 1];
    diag[op.mode] = shift * std::exp(cdouble(0, -op.phi)) * dm1;
    diag[op.mode + 1] = shift * dm1;
    p.settings.push_back({op.mode, wrap_two_pi(op.theta), phi_p, 0});
  }
  assign_layers(p.settings);
  p.output_phases.resize(n);
  for (int i = 0; i < n; ++i) p.output_phases[i] = wrap_two_pi(std::arg(diag[i]));
  return p;
}

ComplexMatrix reconstruct(const MeshProgram& p) {
  if (p.n_modes < 1) throw DomainError("reconstruct: empty program");
  if (static_cast<int>(p.output_phases.size()) != p.n_modes)
    throw DomainError("reconstruct: output phase count mismatch");
  ComplexMatrix u = ComplexMatrix::identity(p.n_modes);
  for (const MziSetting& s : p.settings) {
    if (s.mode < 0 || s.mode + 1 >= p.n_modes)
      throw DomainError("reconstruct: mode pair out of range");
    apply_left(u, {s.mode, s.theta, s.phi});
  }
  for (int j = 0; j < p.n_modes; ++j) {
    const cdouble d = std::exp(cdouble(0, p.output_phases[j]));
    for (int k = 0; k < p.n_modes; ++k) u.at(j, k) *= d;
  }
  return u;
}

CpaPhases cpa_phases(const LossyBeamSplitter& bs) {
  const double a = std::max(0.0, bs.absorption);
  const double root = std::min(1.0, std::sqrt(2.0 * a));
  CpaPhases out;
  out.theta2 = 2.0 * std::acos(root);
  // arg((t+r)/(t-r)) via atan2 on each factor; the plain arctan form is
  // quadrant-ambiguous once |t| < |r|. arg(0) = 0 at the absorption = 1/2
  // endpoint where t + r vanishes.
  const auto safe_arg = [](cdouble z) {
    return std::abs(z) < 1e-12 ? 0.0 : std::arg(z);
  };
  const double gp = safe_arg(bs.t + bs.r);
  const double gm = safe_arg(bs.t - bs.r);
  out.phi3_minus_phi2 = wrap_two_pi(gm - gp + out.theta2 / 2.0 + kPi / 2.0);
  return out;
}

double output_phase_relation(const MeshProgram& p) {
  if (p.output_phases.size() < 2)
    throw DomainError("output_phase_relation: needs at least two modes");
  return wrap_pm_pi(p.output_phases[1] - p.output_phases[0]);
}

std::string mesh_to_json(const MeshProgram& p) {
  std::ostringstream os;
  os << "{\"n_modes\":" << p.n_modes << ",\"mzis\":[";
  for (size_t i = 0; i < p.settings.size(); ++i) {
    const MziSetting& s = p.settings[i];
    if (i) os << ",";
    os << "{\"layer\":" << s.layer << ",\"modes\":[" << s.mode << ","
       << s.mode + 1 << "],\"theta\":" << fmt17(s.theta)
       << ",\"phi\":" << fmt17(s.phi) << "}";
  }
  os << "],\"output_phases\":[";
  for (size_t i = 0; i < p.output_phases.size(); ++i) {
    if (i) os << ",";
    os << fmt17(p.output_phases[i]);
  }
  os << "]}";
  return os.str();
}

}  // namespace cpa
