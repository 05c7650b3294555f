#include "qvibe/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qvibe/error.hpp"

namespace qvibe {

void PhotonPairSpec::validate() const {
  if (!(delta_omega > 0.0) || !std::isfinite(delta_omega)) {
    throw ConfigError("photon pair: delta_omega must be positive");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("photon pair: sigma must be non-negative");
  }
  if (!(visibility > 0.0 && visibility <= 1.0)) {
    throw ConfigError("photon pair: visibility must lie in (0, 1]");
  }
  if (lambda_1 < 0.0 || lambda_2 < 0.0) {
    throw ConfigError("photon pair: wavelengths must be positive");
  }
  if (lambda_1 > 0.0 && lambda_2 > 0.0) {
    const double implied = std::abs(two_pi * speed_of_light * (1.0 / lambda_1 - 1.0 / lambda_2));
    if (std::abs(implied - delta_omega) > 1e-3 * delta_omega) {
      throw ConfigError("photon pair: wavelengths imply a detuning of " +
                        std::to_string(implied / two_pi * 1e-12) +
                        " THz, inconsistent with delta_omega beyond 0.1%");
    }
  }
}

PhotonPairSpec PhotonPairSpec::from_detuning(double detuning_hz, double visibility, double bandwidth_hz) {
  PhotonPairSpec spec;
  spec.delta_omega = two_pi * detuning_hz;
  spec.sigma = two_pi * bandwidth_hz;
  spec.visibility = visibility;
  spec.validate();
  return spec;
}

double ClassicalFringeSpec::visibility() const {
  const double r = arm_intensity_ratio;
  return 2.0 * std::sqrt(r) / (1.0 + r);
}

void ClassicalFringeSpec::validate() const {
  if (!(omega_optical > 0.0) || !std::isfinite(omega_optical)) {
    throw ConfigError("classical fringe: optical frequency must be positive");
  }
  if (!(arm_intensity_ratio >= 0.0 && arm_intensity_ratio <= 1.0)) {
    throw ConfigError("classical fringe: arm intensity ratio must lie in [0, 1]");
  }
  if (!std::isfinite(phase_offset)) {
    throw ConfigError("classical fringe: phase offset must be finite");
  }
}

ClassicalFringeSpec ClassicalFringeSpec::from_wavelength(double wavelength_m, double arm_intensity_ratio,
                                                         double phase_offset) {
  if (!(wavelength_m > 0.0)) {
    throw ConfigError("classical fringe: wavelength must be positive");
  }
  ClassicalFringeSpec spec;
  spec.omega_optical = two_pi * speed_of_light / wavelength_m;
  spec.arm_intensity_ratio = arm_intensity_ratio;
  spec.phase_offset = phase_offset;
  spec.validate();
  return spec;
}

GeometryFactor::GeometryFactor(int g) : g_(g) {
  if (g != 1 && g != 2) {
    throw ConfigError("geometry factor must be 1 or 2, got " + std::to_string(g));
  }
}

double quantum_coincidence_probability(const PhotonPairSpec& spec, double tau) {
  const double envelope = std::exp(-2.0 * spec.sigma * spec.sigma * tau * tau);
  return 0.5 * (1.0 - spec.visibility * std::cos(spec.delta_omega * tau) * envelope);
}

double classical_port_probability(const ClassicalFringeSpec& spec, double tau, int port) {
  const double p1 = 0.5 * (1.0 + spec.visibility() * std::cos(spec.omega_optical * tau + spec.phase_offset));
  switch (port) {
    case 1:
      return p1;
    case 2:
      return 1.0 - p1;
    default:
      throw std::invalid_argument("classical port must be 1 or 2, got " + std::to_string(port));
  }
}

double delay_to_displacement(double tau, GeometryFactor g) { return speed_of_light * tau / g.value(); }

double displacement_to_delay(double displacement, GeometryFactor g) {
  return g.value() * displacement / speed_of_light;
}

double quadrature_delay(const PhotonPairSpec& spec) { return pi / (2.0 * spec.delta_omega); }

double fringe_period(const PhotonPairSpec& spec) { return two_pi / spec.delta_omega; }

double classical_quadrature_offset(double omega_optical, double tau_op) {
  return std::remainder(-0.5 * pi - omega_optical * tau_op, two_pi);
}

}  // namespace qvibe
