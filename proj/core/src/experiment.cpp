#include "cpa/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "cpa/dilation.hpp"
#include "cpa/errors.hpp"
#include "cpa/format.hpp"
#include "cpa/numerics.hpp"
#include "cpa/rng.hpp"

namespace cpa {

namespace {

constexpr int kCircuitModes = 3;  // S1, S2, ancilla

int expected_detectors(int n_photons) { return n_photons == 1 ? 3 : 6; }

// sampling tolerates a dead (zero-efficiency) detector; deconvolution and
// configs require strictly positive entries
void check_efficiencies(const std::vector<double>& eff, int expected,
                        bool allow_zero = false) {
  if (eff.empty()) return;
  if (static_cast<int>(eff.size()) != expected)
    throw DomainError("efficiencies: expected " + std::to_string(expected) +
                      " detector entries");
  for (double e : eff) {
    if (!(e >= 0.0 && e <= 1.0) || (!allow_zero && e == 0.0))
      throw DomainError(allow_zero
                            ? "efficiencies: entries must lie in [0, 1]"
                            : "efficiencies: entries must lie in (0, 1]");
  }
}

double eff_at(const std::vector<double>& eff, int i) {
  return eff.empty() ? 1.0 : eff[i];
}

// single-photon outcomes are ports; two-photon outcomes are a mode pair
// (bunched when equal). occupied() returns the modes carrying photons.
std::pair<int, int> occupied(const std::vector<int>& state) {
  int first = -1, second = -1;
  for (size_t m = 0; m < state.size(); ++m) {
    for (int c = 0; c < state[m]; ++c) {
      if (first < 0)
        first = static_cast<int>(m);
      else
        second = static_cast<int>(m);
    }
  }
  return {first, second};
}

// Detection probability of one outcome under the readout model; used to
// deconvolve normalized counts.
double effective_efficiency(const FockBasis& basis,
                            const std::vector<int>& state,
                            const std::vector<double>& eff) {
  if (basis.n_photons == 1) {
    return eff_at(eff, occupied(state).first);
  }
  const auto [m, n] = occupied(state);
  if (m == n) {
    // both photons in one mode; after the x2 correction the surviving
    // detection path is the split onto both detectors of that mode
    return eff_at(eff, 2 * m) * eff_at(eff, 2 * m + 1);
  }
  const double em = 0.5 * (eff_at(eff, 2 * m) + eff_at(eff, 2 * m + 1));
  const double en = 0.5 * (eff_at(eff, 2 * n) + eff_at(eff, 2 * n + 1));
  return em * en;
}

}  // namespace

LossyBeamSplitter sweep_device(const SweepConfig& cfg, double alpha) {
  switch (cfg.kind) {
    case BsKind::Type1: return solve_type1(alpha);
    case BsKind::Type2: return solve_type2(alpha);
    case BsKind::Custom: return custom_bs(cfg.custom_t, cfg.custom_r);
  }
  throw DomainError("unknown beam splitter kind");
}

int worker_count() {
  if (const char* env = std::getenv("CPA_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 64);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

std::vector<long long> sample_counts(const ProbabilityDistribution& dist,
                                     long long shots,
                                     const std::vector<double>& efficiencies,
                                     std::uint64_t seed) {
  if (shots < 1) throw DomainError("sample_counts: shots must be >= 1");
  const FockBasis& basis = dist.basis;
  if (basis.n_photons != 1 && basis.n_photons != 2)
    throw DomainError("sample_counts: only 1- and 2-photon runs are modeled");
  check_efficiencies(efficiencies, expected_detectors(basis.n_photons),
                     /*allow_zero=*/true);

  const int k = basis.size();
  std::vector<double> cdf(k);
  double acc = 0;
  for (int i = 0; i < k; ++i) {
    acc += std::max(dist.probabilities[i], 0.0);
    cdf[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-6)
    throw DomainError("sample_counts: distribution does not sum to 1");

  Rng rng(seed);
  std::vector<long long> counts(k, 0);
  for (long long s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    int outcome = k - 1;
    for (int i = 0; i < k; ++i) {
      if (u < cdf[i]) {
        outcome = i;
        break;
      }
    }
    if (basis.n_photons == 1) {
      const int port = occupied(basis.states[outcome]).first;
      if (rng.uniform() < eff_at(efficiencies, port)) ++counts[outcome];
      continue;
    }
    const auto [m, n] = occupied(basis.states[outcome]);
    int det_a, det_b;
    if (m == n) {
      // both photons enter one readout MZI: 1/4 both on either detector
      // (no coincidence), 1/2 split onto both
      const double u2 = rng.uniform();
      if (u2 < 0.5) continue;
      det_a = 2 * m;
      det_b = 2 * m + 1;
    } else {
      det_a = 2 * m + (rng.uniform() < 0.5 ? 0 : 1);
      det_b = 2 * n + (rng.uniform() < 0.5 ? 0 : 1);
    }
    const bool hit_a = rng.uniform() < eff_at(efficiencies, det_a);
    const bool hit_b = rng.uniform() < eff_at(efficiencies, det_b);
    if (hit_a && hit_b) ++counts[outcome];
  }
  return counts;
}

std::vector<long long> number_resolving_correction(
    const FockBasis& basis, const std::vector<long long>& raw_counts) {
  if (basis.n_photons != 2)
    throw DomainError(
        "number_resolving_correction: applies only to two-photon runs");
  if (static_cast<int>(raw_counts.size()) != basis.size())
    throw DomainError("number_resolving_correction: count vector mismatch");
  std::vector<long long> out = raw_counts;
  for (int i = 0; i < basis.size(); ++i) {
    const auto [m, n] = occupied(basis.states[i]);
    if (m == n) out[i] *= 2;
  }
  return out;
}

NormalizedCounts normalize_counts(const FockBasis& basis,
                                  const std::vector<long long>& counts,
                                  const std::vector<double>& efficiencies) {
  if (static_cast<int>(counts.size()) != basis.size())
    throw DomainError("normalize_counts: count vector mismatch");
  check_efficiencies(efficiencies, expected_detectors(basis.n_photons));
  long long total = 0;
  for (long long c : counts) {
    if (c < 0) throw DomainError("normalize_counts: negative count");
    total += c;
  }
  if (total == 0) throw DomainError("normalize_counts: no recorded events");

  const int k = basis.size();
  std::vector<double> epsilon(k), a(k);
  double sum = 0;
  for (int i = 0; i < k; ++i) {
    epsilon[i] = effective_efficiency(basis, basis.states[i], efficiencies);
    a[i] = static_cast<double>(counts[i]) / epsilon[i];
    sum += a[i];
  }

  NormalizedCounts out;
  out.probabilities.resize(k);
  out.sigma.resize(k);
  for (int i = 0; i < k; ++i) out.probabilities[i] = a[i] / sum;
  // Poisson variance of each raw count propagated through deconvolution and
  // normalization: dp_i/dc_j = delta_ij/(eps_i S) - a_i/(eps_j S^2)
  for (int i = 0; i < k; ++i) {
    double var = 0;
    for (int j = 0; j < k; ++j) {
      const double grad = (i == j ? 1.0 / (epsilon[i] * sum) : 0.0) -
                          a[i] / (epsilon[j] * sum * sum);
      var += grad * grad * static_cast<double>(counts[j]);
    }
    out.sigma[i] = std::sqrt(var);
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.phi_grid.count < 2)
    throw DomainError("sweep: phi grid needs at least 2 points");
  if (cfg.shots && *cfg.shots < 1)
    throw DomainError("sweep: shots must be >= 1 when present");
  const int n_photons = cfg.input_state == InputState::Noon ? 2 : 1;
  check_efficiencies(cfg.efficiencies, expected_detectors(n_photons));

  std::vector<LossyBeamSplitter> devices;
  if (cfg.kind == BsKind::Custom) {
    devices.push_back(sweep_device(cfg, 0.0));
  } else {
    if (cfg.absorptions.empty())
      throw DomainError("sweep: no absorption values given");
    for (double a : cfg.absorptions) devices.push_back(sweep_device(cfg, a));
  }

  SweepResult result;
  result.config = cfg;
  result.basis = enumerate_basis(kCircuitModes, n_photons);
  for (const auto& bs : devices) result.alphas.push_back(bs.absorption);

  // one lifted unitary per device; phase dependence lives in the input state
  std::vector<ComplexMatrix> lifted;
  lifted.reserve(devices.size());
  for (const auto& bs : devices) {
    const DilatedUnitary d =
        pad_to_modes(dilate(scattering_matrix(bs)), kCircuitModes);
    lifted.push_back(photon_unitary(d.matrix, n_photons));
  }

  const int n_phi = cfg.phi_grid.count;
  const int n_points = static_cast<int>(devices.size()) * n_phi;
  result.points.resize(n_points);

  auto evaluate = [&](int flat) {
    const int ai = flat / n_phi;
    const int pi_ = flat % n_phi;
    const double phi = cfg.phi_grid.at(pi_);
    SweepPoint& pt = result.points[flat];
    pt.alpha = result.alphas[ai];
    pt.phi = phi;

    const StateVector state = n_photons == 2 ? prepare_noon(phi)
                                             : prepare_single_photon(phi);
    const std::vector<cdouble> amp = lifted[ai].apply(state.amplitudes);
    pt.theory.resize(amp.size());
    for (size_t i = 0; i < amp.size(); ++i) pt.theory[i] = std::norm(amp[i]);

    if (cfg.shots) {
      ProbabilityDistribution dist{result.basis, pt.theory};
      const std::uint64_t stream = derive_stream(
          cfg.seed, static_cast<std::uint64_t>(ai), static_cast<std::uint64_t>(pi_));
      std::vector<long long> counts =
          sample_counts(dist, *cfg.shots, cfg.efficiencies, stream);
      if (n_photons == 2)
        counts = number_resolving_correction(result.basis, counts);
      pt.counts = counts;
      const NormalizedCounts norm =
          normalize_counts(result.basis, counts, cfg.efficiencies);
      pt.normalized = norm.probabilities;
      pt.sigma = norm.sigma;
    }
  };

  const int workers = std::min(worker_count(), n_points);
  if (workers <= 1) {
    for (int i = 0; i < n_points; ++i) evaluate(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int i = w; i < n_points; i += workers) evaluate(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  const bool sampled = result.config.shots.has_value();
  std::vector<std::string> labels;
  for (const auto& s : result.basis.states) labels.push_back(occupation_label(s));

  out << "alpha,phi";
  for (const auto& l : labels) out << ",outcome_" << l << "_theory";
  if (sampled) {
    for (const auto& l : labels) out << ",outcome_" << l << "_counts";
    for (const auto& l : labels) out << ",outcome_" << l << "_sigma";
  }
  out << "\n";

  for (const SweepPoint& pt : result.points) {
    out << fmt17(pt.alpha) << "," << fmt17(pt.phi);
    for (double v : pt.theory) out << "," << fmt17(v);
    if (sampled) {
      for (long long c : pt.counts) out << "," << c;
      for (double s : pt.sigma) out << "," << fmt17(s);
    }
    out << "\n";
  }
}

}  // namespace cpa
