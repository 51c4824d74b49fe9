#pragma once

#include <string>
#include <vector>

#include "cpa/experiment.hpp"
#include "cpa/metrology.hpp"

namespace cpa {

/// Derived metrology for one absorption setting. Fisher information is
/// evaluated on an internal fine phase grid (step <= 1e-3 rad) regardless of
/// the sweep grid, so the reported maxima are grid-independent.
struct AlphaAnalysis {
  double alpha = 0;
  std::vector<std::string> outcome_labels;
  std::vector<double> fisher_max;      // per outcome
  double fisher_total_max = 0;
  PhaseCurve fisher_total;             // decimated to <= 256 points
  // single-photon runs: signal fringe visibilities and S1/S2 phase offset
  bool has_visibility = false;
  double visibility_s1 = 0;
  double visibility_s2 = 0;
  double relative_phase = 0;
  // fitted fringe phase per outcome in input-phase units (c/k), k = 1 or 2;
  // NaN for flat curves
  std::vector<double> fringe_phase;
};

struct BhattacharyyaCell {
  double alpha;
  double phi;
  double value;
};

struct SweepAnalysis {
  std::vector<AlphaAnalysis> per_alpha;
  std::vector<BhattacharyyaCell> bhattacharyya;  // sampled runs only
};

SweepAnalysis analyze_sweep(const SweepResult& result);

/// JSON report (17-significant-digit floats): per-outcome Fisher maxima,
/// total-FI curves, visibilities, fringe phases, Bhattacharyya heatmap.
std::string analysis_to_json(const SweepAnalysis& analysis);

/// Theory-only phase curves for one device on an arbitrary grid; labels
/// follow the canonical Fock ordering.
std::vector<PhaseCurve> theory_curves(const LossyBeamSplitter& bs,
                                      InputState input, const PhiGrid& grid);

}  // namespace cpa
