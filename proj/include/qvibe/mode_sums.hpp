#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qvibe {

/// S(m) = sum_i weight_i * exp(-i m x_i) for m = 0, ..., n_modes - 1, with
/// every x_i in [-pi, pi).
///
/// Type-1 non-uniform FFT with Gaussian gridding (oversampling 2, 12-point
/// half-width spreading); relative to sum_i |weight_i| the error is ~1e-11.
[[nodiscard]] std::vector<std::complex<double>> uniform_mode_sums(std::span<const double> x,
                                                                  std::span<const double> weights,
                                                                  std::size_t n_modes);

}  // namespace qvibe
