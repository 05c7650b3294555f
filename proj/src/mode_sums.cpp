#include "qvibe/mode_sums.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace qvibe {

namespace {

constexpr int half_width = 12;
constexpr double oversampling = 2.0;

// fftw planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_smooth(std::size_t n) {
  for (std::size_t p : {2, 3, 5, 7}) {
    while (n % p == 0) {
      n /= p;
    }
  }
  return n == 1;
}

std::size_t next_smooth_even(std::size_t n) {
  n = std::max<std::size_t>(n, 2);
  n += n % 2;
  while (!is_smooth(n)) {
    n += 2;
  }
  return n;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (data == nullptr) {
      throw std::bad_alloc();
    }
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

}  // namespace

std::vector<std::complex<double>> uniform_mode_sums(std::span<const double> x, std::span<const double> weights,
                                                    std::size_t n_modes) {
  if (x.size() != weights.size()) {
    throw std::invalid_argument("uniform_mode_sums: x and weights differ in length");
  }
  std::vector<std::complex<double>> out(n_modes, {0.0, 0.0});
  if (n_modes == 0 || x.empty()) {
    return out;
  }
  constexpr double pi = std::numbers::pi;
  constexpr double two_pi = 2.0 * pi;

  // Modes m = m0 + k with k in [-ms/2, ms/2); the shift is folded into the weights.
  const std::size_t ms = next_smooth_even(n_modes);
  const auto mr = static_cast<std::size_t>(oversampling * static_cast<double>(ms));
  const double m0 = 0.5 * static_cast<double>(ms);
  const double msd = static_cast<double>(ms);
  const double tau = pi * half_width / (msd * msd * oversampling * (oversampling - 0.5));
  const double h = two_pi / static_cast<double>(mr);

  double e3[2 * half_width];
  for (int l = -half_width + 1; l <= half_width; ++l) {
    e3[l + half_width - 1] = std::exp(-(l * h) * (l * h) / (4.0 * tau));
  }

  FftwBuffer grid(mr);
  for (std::size_t j = 0; j < mr; ++j) {
    grid.data[j][0] = 0.0;
    grid.data[j][1] = 0.0;
  }

  const auto mr_l = static_cast<long long>(mr);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (!(xi >= -pi && xi < pi)) {
      throw std::invalid_argument("uniform_mode_sums: abscissa outside [-pi, pi)");
    }
    const std::complex<double> c = weights[i] * std::polar(1.0, -m0 * xi);
    const double xx = xi < 0.0 ? xi + two_pi : xi;
    auto j0 = static_cast<long long>(std::floor(xx / h));
    const double delta = xx - static_cast<double>(j0) * h;
    const double e1 = std::exp(-delta * delta / (4.0 * tau));
    const double e2 = std::exp(h * delta / (2.0 * tau));
    // l = 0 .. half_width
    double pw = 1.0;
    for (int l = 0; l <= half_width; ++l) {
      const double v = e1 * pw * e3[l + half_width - 1];
      long long j = (j0 + l) % mr_l;
      grid.data[j][0] += v * c.real();
      grid.data[j][1] += v * c.imag();
      pw *= e2;
    }
    // l = -1 .. -half_width + 1
    const double e2_inv = 1.0 / e2;
    pw = e2_inv;
    for (int l = -1; l >= -half_width + 1; --l) {
      const double v = e1 * pw * e3[l + half_width - 1];
      long long j = ((j0 + l) % mr_l + mr_l) % mr_l;
      grid.data[j][0] += v * c.real();
      grid.data[j][1] += v * c.imag();
      pw *= e2_inv;
    }
  }

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(mr), grid.data, grid.data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double scale = std::sqrt(pi / tau) / static_cast<double>(mr);
  for (std::size_t m = 0; m < n_modes; ++m) {
    const double k = static_cast<double>(m) - m0;
    const auto idx = static_cast<std::size_t>((static_cast<long long>(k) % mr_l + mr_l) % mr_l);
    const double deconv = scale * std::exp(k * k * tau);
    out[m] = {grid.data[idx][0] * deconv, grid.data[idx][1] * deconv};
  }
  return out;
}

}  // namespace qvibe
