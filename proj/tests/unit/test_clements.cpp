#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "cpa/clements.hpp"
#include "cpa/dilation.hpp"
#include "cpa/errors.hpp"
#include "cpa/numerics.hpp"
#include "test_util.hpp"

using namespace cpa;

namespace {

MeshProgram compile_device(const LossyBeamSplitter& bs) {
  return decompose(pad_to_modes(dilate(scattering_matrix(bs)), 3).matrix);
}

double mod_two_pi_gap(double a, double b) {
  return std::abs(wrap_pm_pi(a - b));
}

}  // namespace

// convention self-test: the bar/cross anchor points of the MZI cell; run
// before anything that depends on the transfer-matrix convention
TEST_CASE("mzi convention self-test: bar and cross anchor settings") {
  const ComplexMatrix bar = mzi_matrix(kPi, 0.0);
  const cdouble gbar = std::exp(cdouble(0, kPi));
  CHECK(std::abs(bar.at(0, 0) - gbar) < 1e-15);
  CHECK(std::abs(bar.at(1, 1) + gbar) < 1e-15);
  CHECK(std::abs(bar.at(0, 1)) < 1e-15);
  CHECK(std::abs(bar.at(1, 0)) < 1e-15);

  const ComplexMatrix cross = mzi_matrix(0.0, 0.0);
  const cdouble gcross = std::exp(cdouble(0, kPi / 2));
  CHECK(std::abs(cross.at(0, 1) - gcross) < 1e-15);
  CHECK(std::abs(cross.at(1, 0) - gcross) < 1e-15);
  CHECK(std::abs(cross.at(0, 0)) < 1e-15);
  CHECK(std::abs(cross.at(1, 1)) < 1e-15);
}

TEST_CASE("decomposing the 2x2 identity yields a bar cell plus phases") {
  const MeshProgram p = decompose(ComplexMatrix::identity(2));
  REQUIRE(p.settings.size() == 1);
  CHECK(p.settings[0].theta == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(max_abs_diff(reconstruct(p), ComplexMatrix::identity(2)) < 1e-13);
}

TEST_CASE("three-mode absorber mesh: three cells in two layers") {
  const MeshProgram p = compile_device(solve_type1(0.3));
  REQUIRE(p.settings.size() == 3);
  CHECK(p.settings[0].layer == 0);
  CHECK(p.settings[1].layer == 0);
  CHECK(p.settings[2].layer == 1);
  CHECK(p.settings[0].mode == 0);
  CHECK(p.settings[1].mode == 1);
  CHECK(p.settings[2].mode == 0);
  // the outer cells are fixed 50:50 splitters, the first carries phase pi
  CHECK(p.settings[0].theta == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(p.settings[2].theta == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(p.settings[0].phi == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(p.settings[1].theta ==
        doctest::Approx(2.0 * std::acos(std::sqrt(0.6))).epsilon(1e-12));
}

TEST_CASE("random unitaries round-trip through the mesh") {
  Rng rng(51);
  for (int n : {2, 3, 5, 8}) {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexMatrix u = testutil::random_unitary(n, rng);
      const MeshProgram p = decompose(u);
      CHECK(static_cast<int>(p.settings.size()) == n * (n - 1) / 2);
      worst = std::max(worst, max_abs_diff(reconstruct(p), u));
      for (const MziSetting& s : p.settings) {
        CHECK(s.theta >= 0.0);
        CHECK(s.theta < kTwoPi);
        CHECK(s.phi >= 0.0);
        CHECK(s.phi < kTwoPi);
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("reconstruct of trivial programs") {
  MeshProgram empty;
  empty.n_modes = 3;
  empty.output_phases = {0.0, 0.0, 0.0};
  CHECK(max_abs_diff(reconstruct(empty), ComplexMatrix::identity(3)) == 0.0);
  CHECK(output_phase_relation(empty) == 0.0);

  MeshProgram bar;
  bar.n_modes = 2;
  bar.settings = {{0, kPi, 0.0, 0}};
  bar.output_phases = {0.0, 0.0};
  const ComplexMatrix u = reconstruct(bar);
  CHECK(std::abs(u.at(0, 1)) < 1e-15);
  CHECK(std::abs(u.at(1, 0)) < 1e-15);
}

TEST_CASE("decompose validates its input") {
  CHECK_THROWS_AS(decompose(ComplexMatrix(3, 2)), DomainError);
  CHECK_THROWS_AS(decompose(ComplexMatrix(17, 17)), DomainError);
  ComplexMatrix not_unitary = ComplexMatrix::identity(3);
  not_unitary.at(0, 0) = 0.5;
  try {
    decompose(not_unitary);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("closed-form phase relations at the anchor absorptions") {
  CHECK(cpa_phases(solve_type1(0.5)).theta2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cpa_phases(solve_type1(0.0)).theta2 == doctest::Approx(kPi).epsilon(1e-12));

  const CpaPhases mid = cpa_phases(solve_type1(0.3));
  CHECK(mid.theta2 == doctest::Approx(1.36944).epsilon(1e-5));
  // the arg term vanishes for a real-amplitude device
  CHECK(mid.phi3_minus_phi2 ==
        doctest::Approx(mid.theta2 / 2 + kPi / 2).epsilon(1e-12));
  CHECK(mid.phi3_minus_phi2 == doctest::Approx(2.25552).epsilon(1e-5));
}

TEST_CASE("mesh phases agree with the closed form on the absorption grid") {
  for (int kind = 0; kind < 2; ++kind) {
    for (int step = 0; step <= 10; ++step) {
      const double alpha = 0.05 * step;
      const LossyBeamSplitter bs =
          kind == 0 ? solve_type1(alpha) : solve_type2(alpha);
      const MeshProgram p = compile_device(bs);
      const CpaPhases expect = cpa_phases(bs);
      REQUIRE(p.settings.size() == 3);
      CHECK(mod_two_pi_gap(p.settings[0].theta, kPi / 2) < 1e-8);
      CHECK(mod_two_pi_gap(p.settings[2].theta, kPi / 2) < 1e-8);
      CHECK(mod_two_pi_gap(p.settings[0].phi, kPi) < 1e-8);
      CHECK(mod_two_pi_gap(p.settings[1].theta, expect.theta2) < 1e-8);
      CHECK(mod_two_pi_gap(p.settings[2].phi - p.settings[1].phi,
                           expect.phi3_minus_phi2) < 1e-8);
    }
  }
}

TEST_CASE("output phases of absorber meshes differ by pi") {
  CHECK(std::abs(output_phase_relation(compile_device(solve_type1(0.3)))) ==
        doctest::Approx(kPi).epsilon(1e-9));
  CHECK(std::abs(output_phase_relation(compile_device(solve_type2(0.1)))) ==
        doctest::Approx(kPi).epsilon(1e-9));

  Rng rng(52);
  for (int trial = 0; trial < 500; ++trial) {
    const LossyBeamSplitter bs = testutil::random_minus_branch_bs(rng);
    const double gap = output_phase_relation(compile_device(bs));
    CHECK(std::abs(std::abs(gap) - kPi) < 1e-8);
  }
}

TEST_CASE("mesh JSON carries the full program") {
  const MeshProgram p = compile_device(solve_type1(0.3));
  const nlohmann::json j = nlohmann::json::parse(mesh_to_json(p));
  CHECK(j.at("n_modes").get<int>() == 3);
  REQUIRE(j.at("mzis").size() == 3);
  CHECK(j.at("mzis")[0].at("modes")[0].get<int>() == 0);
  CHECK(j.at("mzis")[0].at("modes")[1].get<int>() == 1);
  CHECK(j.at("output_phases").size() == 3);
  const MeshProgram q{
      j.at("n_modes").get<int>(),
      {},
      j.at("output_phases").get<std::vector<double>>()};
  (void)q;
  // phases must round-trip at full precision
  CHECK(j.at("mzis")[1].at("theta").get<double>() ==
        doctest::Approx(p.settings[1].theta).epsilon(1e-16));
}
