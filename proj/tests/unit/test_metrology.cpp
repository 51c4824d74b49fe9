#include <doctest.h>

#include <cmath>
#include <functional>

#include "cpa/analysis.hpp"
#include "cpa/errors.hpp"
#include "cpa/experiment.hpp"
#include "cpa/metrology.hpp"
#include "test_util.hpp"

using namespace cpa;

namespace {

PhaseCurve curve_from(const std::function<double(double)>& f, int n = 2001,
                      double lo = 0.0, double hi = kTwoPi) {
  PhaseCurve c;
  for (int i = 0; i < n; ++i) {
    const double phi = lo + (hi - lo) * i / (n - 1);
    c.phis.push_back(phi);
    c.values.push_back(f(phi));
  }
  return c;
}

const PhiGrid kFine{0.0, kTwoPi, 6284};

}  // namespace

TEST_CASE("constant probability carries no phase information") {
  const FisherResult r = fisher_per_outcome(curve_from([](double) { return 0.5; }));
  CHECK(r.max_value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ancilla fringe at maximal absorption: FI is (1+cos)/2 with sup 1") {
  const PhaseCurve c = curve_from(
      [](double phi) { return 0.5 * (1.0 - std::cos(phi)); }, 6284);
  const FisherResult r = fisher_per_outcome(c);
  for (size_t i = 0; i < c.phis.size(); i += 97) {
    CHECK(r.fisher.values[i] ==
          doctest::Approx(0.5 * (1.0 + std::cos(c.phis[i]))).epsilon(1e-6));
  }
  CHECK(r.max_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("total single-photon information is exactly unity at full loss") {
  const std::vector<PhaseCurve> curves =
      theory_curves(solve_type1(0.5), InputState::SinglePhoton, kFine);
  const FisherResult total = fisher_total(curves);
  for (size_t i = 0; i < total.fisher.values.size(); i += 53)
    CHECK(total.fisher.values[i] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(total.max_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fisher bounds: nonnegative, below the square of the photon number") {
  for (int kind = 0; kind < 2; ++kind) {
    for (double alpha : {0.0, 0.25, 0.5}) {
      const LossyBeamSplitter bs =
          kind == 0 ? solve_type1(alpha) : solve_type2(alpha);
      for (InputState input : {InputState::SinglePhoton, InputState::Noon}) {
        const double nsq = input == InputState::Noon ? 4.0 : 1.0;
        const FisherResult total = fisher_total(theory_curves(bs, input, kFine));
        for (double v : total.fisher.values) CHECK(v >= -1e-9);
        CHECK(total.max_value <= nsq + 1e-6);
      }
    }
  }
}

TEST_CASE("stencil derivative agrees with the analytic fringe derivative") {
  const double a = 0.31, c0 = 0.83, d = 0.42;
  const PhaseCurve c = curve_from(
      [&](double phi) { return a * std::cos(2 * phi + c0) + d; }, 6284);
  const FisherResult r = fisher_per_outcome(c);
  for (size_t i = 0; i < c.phis.size(); i += 211) {
    const double p = a * std::cos(2 * c.phis[i] + c0) + d;
    const double dp = -2 * a * std::sin(2 * c.phis[i] + c0);
    CHECK(r.fisher.values[i] == doctest::Approx(dp * dp / p).epsilon(1e-6));
  }
}

TEST_CASE("fisher input validation") {
  PhaseCurve bad = curve_from([](double) { return 0.5; }, 10);
  bad.values[3] = -1e-3;
  CHECK_THROWS_AS(fisher_per_outcome(bad), DomainError);

  std::vector<PhaseCurve> mismatched = {curve_from([](double) { return 0.5; }, 10),
                                        curve_from([](double) { return 0.5; }, 11)};
  CHECK_THROWS_AS(fisher_total(mismatched), DomainError);
}

TEST_CASE("bhattacharyya overlap basics") {
  const FockBasis basis = enumerate_basis(3, 1);
  const ProbabilityDistribution p{basis, {0.2, 0.3, 0.5}};
  const ProbabilityDistribution q{basis, {0.5, 0.25, 0.25}};
  CHECK(bhattacharyya(p, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bhattacharyya(p, q) == doctest::Approx(bhattacharyya(q, p)).epsilon(1e-14));
  CHECK(bhattacharyya(p, q) < 1.0);

  const ProbabilityDistribution a{basis, {1.0, 0.0, 0.0}};
  const ProbabilityDistribution b{basis, {0.0, 1.0, 0.0}};
  CHECK(bhattacharyya(a, b) == doctest::Approx(0.0).epsilon(1e-14));

  const ProbabilityDistribution unnorm{basis, {0.2, 0.2, 0.2}};
  CHECK_THROWS_AS(bhattacharyya(p, unnorm), DomainError);
  const ProbabilityDistribution other{enumerate_basis(3, 2),
                                      {1, 0, 0, 0, 0, 0}};
  CHECK_THROWS_AS(bhattacharyya(p, other), DomainError);
}

TEST_CASE("sampled counts overlap theory at moderate statistics") {
  const std::vector<PhaseCurve> curves =
      theory_curves(solve_type1(0.5), InputState::Noon, PhiGrid{0.0, kTwoPi, 3});
  // phi = 0 point of the sweep pipeline, sampled at 1e5 shots
  SweepConfig cfg;
  cfg.kind = BsKind::Type1;
  cfg.absorptions = {0.5};
  cfg.phi_grid = {0.0, kPi, 2};
  cfg.input_state = InputState::Noon;
  cfg.shots = 100000;
  cfg.seed = 99;
  const SweepResult res = run_sweep(cfg);
  const ProbabilityDistribution theory{res.basis, res.points[0].theory};
  const ProbabilityDistribution measured{res.basis, res.points[0].normalized};
  CHECK(bhattacharyya(measured, theory) > 0.99);
}

TEST_CASE("sinusoid fit recovers model-matched curves exactly") {
  const PhaseCurve c = curve_from(
      [](double phi) { return 0.25 * (1.0 + std::cos(phi)); }, 200);
  const SinusoidFit fit = fit_sinusoid(c, 1);
  CHECK(fit.amplitude == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(wrap_pm_pi(fit.phase)) < 1e-12);
  CHECK(fit.offset == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fit.residual_rms < 1e-12);

  const double c_true = 1.234;
  const PhaseCurve noon = curve_from(
      [&](double phi) { return 0.3 * std::cos(2 * phi + c_true) + 0.4; }, 200);
  CHECK(fit_sinusoid(noon, 2).phase == doctest::Approx(c_true).epsilon(1e-9));
}

TEST_CASE("sinusoid fit tolerates counting noise") {
  Rng rng(71);
  const double c_true = 0.6, shots = 1e4;
  const PhaseCurve clean = curve_from(
      [&](double phi) { return 0.25 * std::cos(phi + c_true) + 0.3; }, 100);
  PhaseCurve noisy = clean;
  for (double& v : noisy.values) {
    const double lambda = v * shots;
    v = std::max(0.0, lambda + std::sqrt(lambda) * rng.normal()) / shots;
  }
  const SinusoidFit fit = fit_sinusoid(noisy, 1);
  CHECK(std::abs(wrap_pm_pi(fit.phase - c_true)) < 0.05);
}

TEST_CASE("sinusoid fit preconditions") {
  const PhaseCurve tiny = curve_from([](double) { return 0.5; }, 3);
  CHECK_THROWS_AS(fit_sinusoid(tiny, 1), DomainError);
  const PhaseCurve narrow =
      curve_from([](double phi) { return std::cos(phi); }, 50, 0.0, 2.0);
  CHECK_THROWS_AS(fit_sinusoid(narrow, 1), DomainError);
}

TEST_CASE("visibility and relative phase of the two signal ports") {
  const PhiGrid grid{0.0, kTwoPi, 401};
  for (double alpha : {0.0, 0.2, 0.4}) {
    // balanced devices interfere at full contrast on both ports
    const auto t2 = theory_curves(solve_type2(alpha), InputState::SinglePhoton, grid);
    const VisibilityPhase vp =
        visibility_and_phase(fit_sinusoid(t2[0], 1), fit_sinusoid(t2[1], 1));
    CHECK(vp.visibility_s1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(vp.visibility_s2 == doctest::Approx(1.0).epsilon(1e-6));
  }
  for (double alpha : {0.1, 0.3, 0.5}) {
    // fixed-internal-phase devices keep the two ports in step; contrast
    // grows as alpha/(1-alpha)
    const auto t1 = theory_curves(solve_type1(alpha), InputState::SinglePhoton, grid);
    const VisibilityPhase vp =
        visibility_and_phase(fit_sinusoid(t1[0], 1), fit_sinusoid(t1[1], 1));
    CHECK(std::abs(vp.relative_phase) < 1e-8);
    CHECK(vp.visibility_s1 ==
          doctest::Approx(alpha / (1.0 - alpha)).epsilon(1e-8));
  }

  SinusoidFit flat;
  flat.offset = 0.0;
  CHECK_THROWS_AS(visibility_and_phase(flat, flat), DomainError);
}

TEST_CASE("triangular fit recovers an exact tent") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 11; ++i) {
    const double x = -1.0 + 0.2 * i;
    xs.push_back(x);
    ys.push_back(1.0 - 2.0 * std::abs(x - 0.0));
  }
  const TriangularFit fit = fit_triangular(xs, ys);
  CHECK(fit.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.b == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(fit.x0) < 1e-9);
  CHECK(fit.residual_rms < 1e-9);
}

TEST_CASE("triangular fit degrades gracefully") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 9; ++i) {
    xs.push_back(i * 0.5);
    ys.push_back(3.0);
  }
  const TriangularFit flat = fit_triangular(xs, ys);
  CHECK(flat.b == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.a == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_triangular({0, 1, 2}, {0, 1, 2}), DomainError);
}

TEST_CASE("triangular fit peak location is unbiased under symmetric noise") {
  Rng rng(72);
  const double x0_true = 0.37;
  double mean = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs, ys;
    for (int i = 0; i < 21; ++i) {
      const double x = -1.0 + 0.1 * i;
      xs.push_back(x);
      ys.push_back(2.0 - 1.5 * std::abs(x - x0_true) + 0.02 * rng.normal());
    }
    mean += fit_triangular(xs, ys).x0;
  }
  mean /= trials;
  // standard error ~ 0.02-ish / sqrt(trials); allow 4 sigma
  CHECK(std::abs(mean - x0_true) < 0.01);
}

TEST_CASE("heralded g2 from coincidence rates") {
  CHECK(heralded_g2(0.0, 1e4, 1e4, 1e6) == doctest::Approx(0.0));
  // factorizable (coherent) rates give exactly 1
  const double r_h = 2e6, r_ah = 3e4, r_bh = 4e4;
  CHECK(heralded_g2(r_ah * r_bh / r_h, r_ah, r_bh, r_h) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // regression fixture for the formula wiring
  CHECK(heralded_g2(1.4, 1e4, 1e4, 1e6) == doctest::Approx(0.014).epsilon(1e-12));
  CHECK_THROWS_AS(heralded_g2(1.0, 0.0, 1e4, 1e6), DomainError);
  CHECK_THROWS_AS(heralded_g2(-1.0, 1e4, 1e4, 1e6), DomainError);
}
