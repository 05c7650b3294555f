#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qvibe/core.hpp"
#include "qvibe/error.hpp"
#include "qvibe/signal.hpp"

using namespace qvibe;

TEST_CASE("coincidence probability at zero delay and at quadrature") {
  PhotonPairSpec pair;
  pair.visibility = 0.9;
  CHECK(quantum_coincidence_probability(pair, 0.0) == doctest::Approx(0.05).epsilon(1e-12));
  const double tau_op = quadrature_delay(pair);
  // pi / (2 * 2 pi 177 THz)
  CHECK(tau_op == doctest::Approx(1.0 / (4.0 * 177e12)).epsilon(1e-12));
  CHECK(quantum_coincidence_probability(pair, tau_op) == doctest::Approx(0.5).epsilon(1e-12));
  // half a fringe later the envelope still dominates nothing: close to (1 + V0)/2
  const double p_max = quantum_coincidence_probability(pair, pi / pair.delta_omega);
  const double env = std::exp(-2.0 * pair.sigma * pair.sigma * std::pow(pi / pair.delta_omega, 2));
  CHECK(p_max == doctest::Approx(0.5 * (1.0 + 0.9 * env)).epsilon(1e-12));
}

TEST_CASE("coincidence probability follows the Gaussian envelope far from zero delay") {
  PhotonPairSpec pair;
  const double tau = 3e-12;  // far outside the 1/sigma coherence time
  CHECK(std::abs(quantum_coincidence_probability(pair, tau) - 0.5) < 1e-12);
}

TEST_CASE("fringe period and quadrature slope") {
  PhotonPairSpec pair;
  CHECK(fringe_period(pair) == doctest::Approx(1.0 / 177e12).epsilon(1e-12));
  const double tau_op = quadrature_delay(pair);
  const double h = 1e-20;
  const double slope =
      (quantum_coincidence_probability(pair, tau_op + h) - quantum_coincidence_probability(pair, tau_op - h)) / (2 * h);
  CHECK(slope > 0.0);
  CHECK(slope == doctest::Approx(0.5 * pair.delta_omega).epsilon(1e-3));
}

TEST_CASE("classical ports are complementary and visibility follows the arm ratio") {
  auto spec = ClassicalFringeSpec::from_wavelength(1550e-9, 0.25, 0.3);
  CHECK(spec.visibility() == doctest::Approx(2.0 * 0.5 / 1.25));
  for (double tau : {0.0, 1e-16, 3.3e-15}) {
    CHECK(classical_port_probability(spec, tau, 1) + classical_port_probability(spec, tau, 2) ==
          doctest::Approx(1.0));
  }
  CHECK(ClassicalFringeSpec::from_wavelength(1550e-9, 1.0).visibility() == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)classical_port_probability(spec, 0.0, 3), std::invalid_argument);
}

TEST_CASE("classical quadrature offset puts the operating point at mid-fringe on a rising arccos") {
  ClassicalFringeSpec spec;
  const double tau_op = 1.41e-15;
  spec.phase_offset = classical_quadrature_offset(spec.omega_optical, tau_op);
  CHECK(classical_port_probability(spec, tau_op, 1) == doctest::Approx(0.5).epsilon(1e-12));
  // arccos((1 - 2 P1) / V) increases with delay around tau_op
  auto inv = [&](double tau) { return std::acos(1.0 - 2.0 * classical_port_probability(spec, tau, 1)); };
  CHECK(inv(tau_op + 1e-18) > inv(tau_op - 1e-18));
}

TEST_CASE("delay and displacement conversion") {
  CHECK(delay_to_displacement(1e-15, GeometryFactor{1}) == doctest::Approx(speed_of_light * 1e-15));
  CHECK(delay_to_displacement(1e-15, GeometryFactor{2}) == doctest::Approx(0.5 * speed_of_light * 1e-15));
  CHECK(displacement_to_delay(delay_to_displacement(3e-17, GeometryFactor{2}), GeometryFactor{2}) ==
        doctest::Approx(3e-17));
  CHECK_THROWS_AS(GeometryFactor{3}, ConfigError);
  CHECK(GeometryFactor{}.value() == 2);
}

TEST_CASE("pair spec validation") {
  PhotonPairSpec pair;
  CHECK_NOTHROW(pair.validate());
  pair.visibility = 0.0;
  CHECK_THROWS_AS(pair.validate(), ConfigError);
  pair.visibility = 1.1;
  CHECK_THROWS_AS(pair.validate(), ConfigError);
  pair = PhotonPairSpec{};
  pair.delta_omega = -1.0;
  CHECK_THROWS_AS(pair.validate(), ConfigError);

  // 810 nm / 1550 nm differ by 176.7 THz, 0.16% away from 177 THz
  pair = PhotonPairSpec{};
  pair.lambda_1 = 810e-9;
  pair.lambda_2 = 1550e-9;
  CHECK_THROWS_AS(pair.validate(), ConfigError);
  pair.delta_omega = two_pi * speed_of_light * (1.0 / 810e-9 - 1.0 / 1550e-9);
  CHECK_NOTHROW(pair.validate());

  const auto from = PhotonPairSpec::from_detuning(177e12, 0.85, 1e12);
  CHECK(from.delta_omega == doctest::Approx(two_pi * 177e12));
  CHECK(from.sigma == doctest::Approx(two_pi * 1e12));
  CHECK(from.visibility == doctest::Approx(0.85));
}

TEST_CASE("classical spec validation") {
  ClassicalFringeSpec spec;
  spec.arm_intensity_ratio = 1.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.arm_intensity_ratio = 0.5;
  spec.omega_optical = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
