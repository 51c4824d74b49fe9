#include "cpa/analysis.hpp"

#include <cmath>
#include <sstream>

#include "cpa/dilation.hpp"
#include "cpa/errors.hpp"
#include "cpa/format.hpp"

namespace cpa {

namespace {

// fine enough that 5-point stencils resolve Fisher maxima to well under 1e-6
const PhiGrid kFineGrid{0.0, kTwoPi, 6284};

PhaseCurve decimate(const PhaseCurve& c, size_t max_points) {
  if (c.phis.size() <= max_points) return c;
  PhaseCurve out;
  out.outcome_label = c.outcome_label;
  const size_t stride = (c.phis.size() + max_points - 1) / max_points;
  for (size_t i = 0; i < c.phis.size(); i += stride) {
    out.phis.push_back(c.phis[i]);
    out.values.push_back(c.values[i]);
  }
  if (out.phis.back() != c.phis.back()) {
    out.phis.push_back(c.phis.back());
    out.values.push_back(c.values.back());
  }
  return out;
}

std::string json_number(double v) {
  if (std::isnan(v) || std::isinf(v)) return "null";
  return fmt17(v);
}

}  // namespace

std::vector<PhaseCurve> theory_curves(const LossyBeamSplitter& bs,
                                      InputState input, const PhiGrid& grid) {
  const int n_photons = input == InputState::Noon ? 2 : 1;
  const DilatedUnitary d = pad_to_modes(dilate(scattering_matrix(bs)), 3);
  const ComplexMatrix lifted = photon_unitary(d.matrix, n_photons);
  const FockBasis basis = enumerate_basis(3, n_photons);

  std::vector<PhaseCurve> curves(basis.size());
  for (int i = 0; i < basis.size(); ++i)
    curves[i].outcome_label = occupation_label(basis.states[i]);
  for (int j = 0; j < grid.count; ++j) {
    const double phi = grid.at(j);
    const StateVector state =
        n_photons == 2 ? prepare_noon(phi) : prepare_single_photon(phi);
    const std::vector<cdouble> amp = lifted.apply(state.amplitudes);
    for (int i = 0; i < basis.size(); ++i) {
      curves[i].phis.push_back(phi);
      curves[i].values.push_back(std::norm(amp[i]));
    }
  }
  return curves;
}

SweepAnalysis analyze_sweep(const SweepResult& result) {
  SweepAnalysis analysis;
  const int n_photons = result.basis.n_photons;
  const int k = n_photons;  // fringe harmonic equals the photon number

  for (size_t ai = 0; ai < result.alphas.size(); ++ai) {
    const LossyBeamSplitter bs =
        sweep_device(result.config, result.alphas[ai]);
    const std::vector<PhaseCurve> curves =
        theory_curves(bs, result.config.input_state, kFineGrid);

    AlphaAnalysis entry;
    entry.alpha = result.alphas[ai];
    for (const PhaseCurve& c : curves) {
      entry.outcome_labels.push_back(c.outcome_label);
      entry.fisher_max.push_back(fisher_per_outcome(c).max_value);
    }
    const FisherResult total = fisher_total(curves);
    entry.fisher_total_max = total.max_value;
    entry.fisher_total = decimate(total.fisher, 256);

    for (const PhaseCurve& c : curves) {
      const SinusoidFit fit = fit_sinusoid(c, k);
      entry.fringe_phase.push_back(
          fit.amplitude < 1e-9 ? std::nan("") : fit.phase / k);
    }

    if (n_photons == 1) {
      try {
        const SinusoidFit s1 = fit_sinusoid(curves[0], 1);  // outcome "100"
        const SinusoidFit s2 = fit_sinusoid(curves[1], 1);  // outcome "010"
        const VisibilityPhase vp = visibility_and_phase(s1, s2);
        entry.has_visibility = true;
        entry.visibility_s1 = vp.visibility_s1;
        entry.visibility_s2 = vp.visibility_s2;
        entry.relative_phase = vp.relative_phase;
      } catch (const DomainError&) {
        entry.has_visibility = false;
      }
    }
    analysis.per_alpha.push_back(std::move(entry));
  }

  if (result.config.shots) {
    for (const SweepPoint& pt : result.points) {
      ProbabilityDistribution theory{result.basis, pt.theory};
      ProbabilityDistribution measured{result.basis, pt.normalized};
      analysis.bhattacharyya.push_back(
          {pt.alpha, pt.phi, bhattacharyya(measured, theory)});
    }
  }
  return analysis;
}

std::string analysis_to_json(const SweepAnalysis& analysis) {
  std::ostringstream os;
  os << "{\"per_alpha\":[";
  for (size_t i = 0; i < analysis.per_alpha.size(); ++i) {
    const AlphaAnalysis& a = analysis.per_alpha[i];
    if (i) os << ",";
    os << "{\"alpha\":" << fmt17(a.alpha) << ",\"outcomes\":[";
    for (size_t j = 0; j < a.outcome_labels.size(); ++j) {
      if (j) os << ",";
      os << "\"" << json_escape(a.outcome_labels[j]) << "\"";
    }
    os << "],\"fisher_max\":[";
    for (size_t j = 0; j < a.fisher_max.size(); ++j) {
      if (j) os << ",";
      os << json_number(a.fisher_max[j]);
    }
    os << "],\"fisher_total_max\":" << json_number(a.fisher_total_max);
    os << ",\"fisher_total_curve\":{\"phi\":[";
    for (size_t j = 0; j < a.fisher_total.phis.size(); ++j) {
      if (j) os << ",";
      os << fmt17(a.fisher_total.phis[j]);
    }
    os << "],\"value\":[";
    for (size_t j = 0; j < a.fisher_total.values.size(); ++j) {
      if (j) os << ",";
      os << json_number(a.fisher_total.values[j]);
    }
    os << "]}";
    if (a.has_visibility) {
      os << ",\"visibility\":{\"s1\":" << json_number(a.visibility_s1)
         << ",\"s2\":" << json_number(a.visibility_s2)
         << ",\"relative_phase\":" << json_number(a.relative_phase) << "}";
    }
    os << ",\"fringe_phase\":[";
    for (size_t j = 0; j < a.fringe_phase.size(); ++j) {
      if (j) os << ",";
      os << json_number(a.fringe_phase[j]);
    }
    os << "]}";
  }
  os << "],\"bhattacharyya\":[";
  for (size_t i = 0; i < analysis.bhattacharyya.size(); ++i) {
    const BhattacharyyaCell& c = analysis.bhattacharyya[i];
    if (i) os << ",";
    os << "{\"alpha\":" << fmt17(c.alpha) << ",\"phi\":" << fmt17(c.phi)
       << ",\"value\":" << json_number(c.value) << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace cpa
