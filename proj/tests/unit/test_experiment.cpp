#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cpa/analysis.hpp"
#include "cpa/errors.hpp"
#include "cpa/experiment.hpp"
#include "test_util.hpp"

using namespace cpa;

namespace {

std::string csv_of(const SweepResult& r) {
  std::ostringstream os;
  write_sweep_csv(r, os);
  return os.str();
}

}  // namespace

TEST_CASE("single-photon sweep reproduces the closed-form ancilla fringe") {
  SweepConfig cfg;
  cfg.kind = BsKind::Type1;
  cfg.absorptions = {0.5};
  cfg.phi_grid = {0.0, kTwoPi, 101};
  cfg.input_state = InputState::SinglePhoton;
  const SweepResult res = run_sweep(cfg);
  REQUIRE(res.points.size() == 101);
  const int anc = res.basis.index_of({0, 0, 1});
  for (const SweepPoint& pt : res.points) {
    CHECK(pt.theory[anc] ==
          doctest::Approx(0.5 * (1.0 - std::cos(pt.phi))).epsilon(1e-12));
    CHECK(pt.counts.empty());
  }
  // full absorption at the symmetric-input phase
  CHECK(res.points[50].theory[anc] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lossless balanced device alternates bunching and anti-bunching") {
  SweepConfig cfg;
  cfg.kind = BsKind::Type2;
  cfg.absorptions = {0.0};
  cfg.phi_grid = {0.0, kPi, 5};  // half-period steps of the pi-periodic fringe
  cfg.input_state = InputState::Noon;
  const SweepResult res = run_sweep(cfg);
  const int both = res.basis.index_of({1, 1, 0});
  CHECK(res.points[0].theory[both] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(res.points[2].theory[both] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.points[4].theory[both] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("sampling matches theory within counting statistics") {
  const FockBasis basis = enumerate_basis(3, 1);
  const ProbabilityDistribution dist{basis, {0.3, 0.5, 0.2}};
  const long long shots = 1000000;
  const std::vector<long long> counts = sample_counts(dist, shots, {}, 4242);
  long long total = 0;
  for (long long c : counts) total += c;
  CHECK(total == shots);  // ideal detectors drop nothing
  for (int i = 0; i < basis.size(); ++i) {
    const double p = dist.probabilities[i];
    const double sigma = std::sqrt(p * (1 - p) * shots);
    CHECK(std::abs(counts[i] - p * shots) < 5 * sigma);
  }
}

TEST_CASE("a dead detector blanks the outcomes that need it") {
  const FockBasis basis = enumerate_basis(3, 1);
  const ProbabilityDistribution dist{basis, {0.3, 0.5, 0.2}};
  const std::vector<long long> counts =
      sample_counts(dist, 20000, {1.0, 0.0, 1.0}, 7);
  CHECK(counts[0] > 0);
  CHECK(counts[1] == 0);
  CHECK(counts[2] > 0);
}

TEST_CASE("identical seeds reproduce identical counts") {
  const FockBasis basis = enumerate_basis(3, 2);
  ProbabilityDistribution dist{basis, {0.25, 0.25, 0.1, 0.15, 0.15, 0.1}};
  const auto a = sample_counts(dist, 50000, {0.9, 0.8, 0.95, 0.85, 0.9, 0.7}, 123);
  const auto b = sample_counts(dist, 50000, {0.9, 0.8, 0.95, 0.85, 0.9, 0.7}, 123);
  CHECK(a == b);
  const auto c = sample_counts(dist, 50000, {0.9, 0.8, 0.95, 0.85, 0.9, 0.7}, 124);
  CHECK(a != c);
}

TEST_CASE("number-resolving correction doubles only bunched outcomes") {
  const FockBasis basis = enumerate_basis(3, 2);
  std::vector<long long> raw(basis.size(), 0);
  raw[basis.index_of({2, 0, 0})] = 100;
  raw[basis.index_of({1, 1, 0})] = 100;
  const auto corrected = number_resolving_correction(basis, raw);
  CHECK(corrected[basis.index_of({2, 0, 0})] == 200);
  CHECK(corrected[basis.index_of({1, 1, 0})] == 100);

  const std::vector<long long> zeros(basis.size(), 0);
  CHECK(number_resolving_correction(basis, zeros) == zeros);

  const FockBasis single = enumerate_basis(3, 1);
  CHECK_THROWS_AS(number_resolving_correction(single, {1, 2, 3}), DomainError);
}

TEST_CASE("normalize_counts deconvolves efficiencies and attaches sigmas") {
  const FockBasis basis = enumerate_basis(3, 1);
  const NormalizedCounts uniform =
      normalize_counts(basis, {100, 100, 100}, {0.5, 0.5, 0.5});
  for (double p : uniform.probabilities)
    CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const NormalizedCounts delta = normalize_counts(basis, {0, 42, 0}, {});
  CHECK(delta.probabilities[1] == doctest::Approx(1.0));
  CHECK(delta.probabilities[0] == 0.0);

  CHECK_THROWS_AS(normalize_counts(basis, {0, 0, 0}, {}), DomainError);
}

TEST_CASE("sampled-corrected-normalized counts recover theory") {
  // two-photon pipeline with uneven detector efficiencies, 1e6 shots
  SweepConfig cfg;
  cfg.kind = BsKind::Type1;
  cfg.absorptions = {0.3};
  cfg.phi_grid = {0.7, 0.7 + 0.1, 2};
  cfg.input_state = InputState::Noon;
  cfg.shots = 1000000;
  cfg.seed = 31337;
  cfg.efficiencies = {0.9, 0.75, 0.95, 0.8, 0.85, 0.7};
  const SweepResult res = run_sweep(cfg);
  for (const SweepPoint& pt : res.points) {
    double total = 0;
    for (double p : pt.normalized) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (size_t i = 0; i < pt.theory.size(); ++i) {
      const double sigma = std::max(pt.sigma[i], 1e-6);
      CHECK(std::abs(pt.normalized[i] - pt.theory[i]) < 5 * sigma);
    }
  }
}

TEST_CASE("reported uncertainties scale as one over root shots") {
  const FockBasis basis = enumerate_basis(3, 1);
  const ProbabilityDistribution dist{basis, {0.3, 0.5, 0.2}};
  std::vector<double> log_shots, log_sigma;
  for (long long shots : {1000LL, 10000LL, 100000LL}) {
    const auto counts = sample_counts(dist, shots, {}, 5);
    const NormalizedCounts norm = normalize_counts(basis, counts, {});
    double mean_sigma = 0;
    for (double s : norm.sigma) mean_sigma += s / norm.sigma.size();
    log_shots.push_back(std::log10(static_cast<double>(shots)));
    log_sigma.push_back(std::log10(mean_sigma));
  }
  const double slope = (log_sigma[2] - log_sigma[0]) / (log_shots[2] - log_shots[0]);
  CHECK(std::abs(slope + 0.5) < 0.05);
}

TEST_CASE("sweeps are deterministic and schedule-independent") {
  SweepConfig cfg;
  cfg.kind = BsKind::Type2;
  cfg.absorptions = {0.1, 0.4};
  cfg.phi_grid = {0.0, kTwoPi, 21};
  cfg.input_state = InputState::Noon;
  cfg.shots = 20000;
  cfg.seed = 777;

  const std::string first = csv_of(run_sweep(cfg));
  const std::string second = csv_of(run_sweep(cfg));
  CHECK(first == second);

  setenv("CPA_WORKERS", "1", 1);
  const std::string serial = csv_of(run_sweep(cfg));
  setenv("CPA_WORKERS", "4", 1);
  const std::string parallel = csv_of(run_sweep(cfg));
  unsetenv("CPA_WORKERS");
  CHECK(serial == parallel);
  CHECK(serial == first);
}

TEST_CASE("sweep CSV layout") {
  SweepConfig cfg;
  cfg.kind = BsKind::Type1;
  cfg.absorptions = {0.2};
  cfg.phi_grid = {0.0, kTwoPi, 3};
  cfg.input_state = InputState::SinglePhoton;
  cfg.shots = 100;
  cfg.seed = 1;
  const std::string csv = csv_of(run_sweep(cfg));
  CHECK(csv.rfind("alpha,phi,outcome_100_theory,outcome_010_theory,"
                  "outcome_001_theory,outcome_100_counts,outcome_010_counts,"
                  "outcome_001_counts,outcome_100_sigma,outcome_010_sigma,"
                  "outcome_001_sigma\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
  CHECK(csv.find("\r") == std::string::npos);
}

TEST_CASE("sweep config validation") {
  SweepConfig cfg;
  cfg.phi_grid.count = 1;
  CHECK_THROWS_AS(run_sweep(cfg), DomainError);
  cfg.phi_grid.count = 5;
  cfg.absorptions = {0.7};
  CHECK_THROWS_AS(run_sweep(cfg), DomainError);
  cfg.absorptions = {0.2};
  cfg.shots = 0;
  CHECK_THROWS_AS(run_sweep(cfg), DomainError);
  cfg.shots.reset();
  cfg.efficiencies = {0.5, 0.5};  // wrong arity for a single-photon run
  CHECK_THROWS_AS(run_sweep(cfg), DomainError);
}

TEST_CASE("custom devices run through the sweep pipeline") {
  const LossyBeamSplitter bs = solve_type2(0.2);
  SweepConfig cfg;
  cfg.kind = BsKind::Custom;
  cfg.custom_t = bs.t;
  cfg.custom_r = bs.r;
  cfg.phi_grid = {0.0, kTwoPi, 17};
  cfg.input_state = InputState::SinglePhoton;
  const SweepResult res = run_sweep(cfg);
  CHECK(res.alphas.size() == 1);
  CHECK(res.alphas[0] == doctest::Approx(0.2).epsilon(1e-12));
  const int anc = res.basis.index_of({0, 0, 1});
  for (const SweepPoint& pt : res.points)
    CHECK(pt.theory[anc] ==
          doctest::Approx(absorbed_intensity(bs, pt.phi)).epsilon(1e-10));
}

TEST_CASE("analysis reports Fisher maxima and fringe data") {
  SweepConfig cfg;
  cfg.kind = BsKind::Type2;
  cfg.absorptions = {0.0, 0.5};
  cfg.phi_grid = {0.0, kTwoPi, 41};
  cfg.input_state = InputState::Noon;
  cfg.shots = 50000;
  cfg.seed = 2024;
  const SweepResult res = run_sweep(cfg);
  const SweepAnalysis analysis = analyze_sweep(res);
  REQUIRE(analysis.per_alpha.size() == 2);
  CHECK(analysis.per_alpha[0].fisher_total_max == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(analysis.per_alpha[1].fisher_total_max <= 4.0 + 1e-6);
  CHECK(analysis.bhattacharyya.size() == res.points.size());
  for (const BhattacharyyaCell& cell : analysis.bhattacharyya)
    CHECK(cell.value > 0.99);
  const std::string json = analysis_to_json(analysis);
  CHECK(json.find("\"fisher_total_max\"") != std::string::npos);
  CHECK(json.find("\"bhattacharyya\"") != std::string::npos);
}
