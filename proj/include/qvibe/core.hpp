#pragma once

// Physical constants, two-photon and classical fringe models, and the
// delay <-> displacement conversion.

#include <numbers>

namespace qvibe {

inline constexpr double speed_of_light = 299'792'458.0;  // m/s, exact
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Default angular-frequency half bandwidth, 2*pi*0.5 THz.
inline constexpr double default_sigma = two_pi * 0.5e12;

/// Entangled photon pair parameters defining the two-photon fringe.
struct PhotonPairSpec {
  double delta_omega = two_pi * 177e12;  ///< angular detuning, rad/s
  double sigma = default_sigma;          ///< angular half bandwidth, rad/s
  double visibility = 1.0;               ///< fringe visibility V0 in (0, 1]
  double lambda_1 = 0.0;                 ///< m, 0 when not specified
  double lambda_2 = 0.0;                 ///< m, 0 when not specified

  /// Throws ConfigError when a field is out of range or the wavelengths
  /// disagree with delta_omega by more than 0.1%.
  void validate() const;

  /// Build from the detuning and bandwidth expressed as ordinary frequencies (Hz).
  static PhotonPairSpec from_detuning(double detuning_hz, double visibility = 1.0,
                                      double bandwidth_hz = 0.5e12);
};

/// Single-photon interferometer used for the classical comparison.
struct ClassicalFringeSpec {
  double omega_optical = two_pi * speed_of_light / 1550e-9;  ///< rad/s
  double arm_intensity_ratio = 1.0;  ///< intensity of arm b relative to arm a, in [0, 1]
  double phase_offset = 0.0;         ///< rad

  /// 2*sqrt(r)/(1+r).
  [[nodiscard]] double visibility() const;
  void validate() const;

  static ClassicalFringeSpec from_wavelength(double wavelength_m, double arm_intensity_ratio = 1.0,
                                             double phase_offset = 0.0);
};

/// Optical path-fold multiplier: 1 for transmission, 2 for retro-reflection.
class GeometryFactor {
 public:
  constexpr GeometryFactor() = default;
  /// Throws ConfigError unless g is 1 or 2.
  explicit GeometryFactor(int g);
  [[nodiscard]] constexpr int value() const noexcept { return g_; }
  friend constexpr bool operator==(GeometryFactor, GeometryFactor) = default;

 private:
  int g_ = 2;
};

/// 1/2 * {1 - V0 cos(delta_omega tau) exp(-2 sigma^2 tau^2)}.
[[nodiscard]] double quantum_coincidence_probability(const PhotonPairSpec& spec, double tau);

/// Port 1: 1/2 [1 + V cos(omega tau + phi0)]; port 2 is the complement.
/// Throws std::invalid_argument for a port other than 1 or 2.
[[nodiscard]] double classical_port_probability(const ClassicalFringeSpec& spec, double tau, int port);

[[nodiscard]] double delay_to_displacement(double tau, GeometryFactor g);
[[nodiscard]] double displacement_to_delay(double displacement, GeometryFactor g);

/// Delay where the quantum fringe sits at P_C = 1/2 on its first rising slope.
[[nodiscard]] double quadrature_delay(const PhotonPairSpec& spec);

/// Full fringe period in delay, 2*pi/delta_omega.
[[nodiscard]] double fringe_period(const PhotonPairSpec& spec);

/// Phase offset placing the classical fringe at cos(omega tau_op + phi0) = cos(-pi/2),
/// so that the arccos inversion is increasing in delay around tau_op.
[[nodiscard]] double classical_quadrature_offset(double omega_optical, double tau_op);

}  // namespace qvibe
