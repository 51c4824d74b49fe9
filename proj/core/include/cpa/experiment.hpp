#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "cpa/fock.hpp"
#include "cpa/lossybs.hpp"

namespace cpa {

enum class InputState { SinglePhoton, Noon };

struct PhiGrid {
  double start = 0;
  double stop = kTwoPi;
  int count = 201;
  double at(int j) const {
    return start + (stop - start) * static_cast<double>(j) /
                       static_cast<double>(count - 1);
  }
};

/// Parameters for one sweep over (absorption, input phase). For Custom kind
/// the device comes from (custom_t, custom_r) and `absorptions` is ignored.
struct SweepConfig {
  BsKind kind = BsKind::Type1;
  cdouble custom_t = 0;
  cdouble custom_r = 0;
  std::vector<double> absorptions = {0.5};
  PhiGrid phi_grid;
  InputState input_state = InputState::SinglePhoton;
  std::optional<long long> shots;
  std::uint64_t seed = 0;
  std::vector<double> efficiencies;  // empty = ideal detectors
};

struct SweepPoint {
  double alpha = 0;
  double phi = 0;
  std::vector<double> theory;       // per outcome, sums to 1
  std::vector<long long> counts;    // corrected counts; empty without sampling
  std::vector<double> normalized;   // efficiency-deconvolved, sums to 1
  std::vector<double> sigma;        // propagated std dev of `normalized`
};

struct SweepResult {
  SweepConfig config;
  FockBasis basis;
  std::vector<double> alphas;      // resolved device absorptions
  std::vector<SweepPoint> points;  // row-major over (alpha, phi)
};

/// Evaluate solve -> dilate -> Fock probabilities over the whole grid, with
/// optional Monte-Carlo counting. Deterministic given the config (including
/// seed): per-point RNG streams derive from (seed, alpha index, phi index),
/// so results do not depend on worker scheduling.
SweepResult run_sweep(const SweepConfig& config);

/// Monte-Carlo counting for one grid point. Single-photon runs draw a port
/// and thin it by that detector's efficiency. Two-photon runs model the
/// number-resolving readout: each output mode splits 50:50 onto two
/// detectors, a shot registers only when exactly two distinct detectors
/// fire, and pair counts aggregate back onto the six Fock outcomes (bunched
/// outcomes therefore lose half their shots; see
/// number_resolving_correction). Efficiencies are per detector: 3 entries
/// for single-photon runs, 6 for two-photon runs, empty = ideal.
std::vector<long long> sample_counts(const ProbabilityDistribution& dist,
                                     long long shots,
                                     const std::vector<double>& efficiencies,
                                     std::uint64_t seed);

/// Double the counts of outcomes with two photons in one mode ((2,0,0),
/// (0,2,0), (0,0,2)): a bunched pair has only a 50% chance of splitting onto
/// two detectors of the readout MZI. Two-photon bases only.
std::vector<long long> number_resolving_correction(
    const FockBasis& basis, const std::vector<long long>& raw_counts);

struct NormalizedCounts {
  std::vector<double> probabilities;  // sums to exactly 1
  std::vector<double> sigma;          // Poisson propagation through the
                                      // deconvolution and normalization
};

/// Efficiency-deconvolve and renormalize corrected counts.
/// Throws DomainError when the total count is zero.
NormalizedCounts normalize_counts(const FockBasis& basis,
                                  const std::vector<long long>& counts,
                                  const std::vector<double>& efficiencies);

/// CSV: header then one row per (alpha, phi) with 17-significant-digit
/// floats, LF line endings. Columns: alpha, phi, outcome_<label>_theory...,
/// then outcome_<label>_counts... and outcome_<label>_sigma... when sampled.
void write_sweep_csv(const SweepResult& result, std::ostream& out);

/// Worker threads for sweep evaluation; the CPA_WORKERS environment variable
/// overrides the hardware default.
int worker_count();

/// The device a config denotes at one absorption setting (Custom ignores
/// alpha).
LossyBeamSplitter sweep_device(const SweepConfig& config, double alpha);

}  // namespace cpa
