#include "cpa/lossybs.hpp"

#include <cmath>

#include "cpa/errors.hpp"

namespace cpa {

namespace {

constexpr double kValidateTol = 1e-10;

void check_absorption_domain(double a) {
  if (!(a >= 0.0 && a <= 0.5)) {
    throw DomainError(
        "absorption coefficient must lie in [0, 0.5]; a port-symmetric lossy "
        "beam splitter cannot absorb more than half the incident power");
  }
}

}  // namespace

std::string constraint_name(BsConstraint c) {
  switch (c) {
    case BsConstraint::EnergyConservation: return "energy_conservation";
    case BsConstraint::PhaseRelation: return "phase_relation";
    case BsConstraint::AbsorptionBound: return "absorption_bound";
  }
  return "unknown";
}

LossyBeamSplitter solve_type1(double absorption, bool mirror) {
  check_absorption_domain(absorption);
  const double root = std::sqrt(std::max(0.0, 1.0 - 2.0 * absorption));
  // quadratic 4x(1-a-x) = a^2; default branch keeps |t| -> 1 as a -> 0
  const double x = mirror ? (1.0 - absorption - root) / 2.0
                          : (1.0 - absorption + root) / 2.0;
  LossyBeamSplitter bs;
  bs.t = std::sqrt(x);
  bs.r = -std::sqrt(std::max(0.0, 1.0 - absorption - x));
  bs.absorption = absorption;
  bs.internal_phase = kPi;
  bs.kind = BsKind::Type1;
  return bs;
}

LossyBeamSplitter solve_type2(double absorption) {
  check_absorption_domain(absorption);
  const double x = (1.0 - absorption) / 2.0;
  const double phi_rt = std::acos(-absorption / (1.0 - absorption));
  LossyBeamSplitter bs;
  bs.t = std::sqrt(x);
  bs.r = std::sqrt(x) * cdouble(std::cos(phi_rt), std::sin(phi_rt));
  bs.absorption = absorption;
  bs.internal_phase = wrap_two_pi(phi_rt);
  bs.kind = BsKind::Type2;
  return bs;
}

LossyBeamSplitter custom_bs(cdouble t, cdouble r) {
  LossyBeamSplitter bs;
  bs.t = t;
  bs.r = r;
  bs.absorption = 1.0 - std::norm(t) - std::norm(r);
  const double at = std::abs(t) > 0 ? std::arg(t) : 0.0;
  const double ar = std::abs(r) > 0 ? std::arg(r) : 0.0;
  bs.internal_phase = wrap_two_pi(ar - at);
  bs.kind = BsKind::Custom;
  return bs;
}

std::vector<BsConstraint> validate(const LossyBeamSplitter& bs) {
  std::vector<BsConstraint> out;
  const double energy = std::norm(bs.t) + std::norm(bs.r) + bs.absorption;
  if (std::abs(energy - 1.0) > kValidateTol)
    out.push_back(BsConstraint::EnergyConservation);
  // 2 Re(conj(t) r) == 2|t||r| cos(arg r - arg t); minus branch pins it to -a
  const double cross = 2.0 * std::real(std::conj(bs.t) * bs.r);
  if (std::abs(cross + bs.absorption) > kValidateTol)
    out.push_back(BsConstraint::PhaseRelation);
  if (bs.absorption > 0.5 + kValidateTol || bs.absorption < -kValidateTol)
    out.push_back(BsConstraint::AbsorptionBound);
  return out;
}

double absorbed_intensity(const LossyBeamSplitter& bs, double phi) {
  const cdouble e = cdouble(std::cos(phi), std::sin(phi));
  const double out1 = std::norm(bs.t * e - bs.r);
  const double out2 = std::norm(bs.r * e - bs.t);
  return 1.0 - 0.5 * out1 - 0.5 * out2;
}

std::pair<double, double> singular_value_pair(const LossyBeamSplitter& bs) {
  double lo = std::abs(bs.t - bs.r);
  double hi = std::abs(bs.t + bs.r);
  if (lo < hi) std::swap(lo, hi);
  return {lo, hi};
}

ComplexMatrix scattering_matrix(const LossyBeamSplitter& bs) {
  return ComplexMatrix::from_rows({{bs.t, bs.r}, {bs.r, bs.t}});
}

}  // namespace cpa
