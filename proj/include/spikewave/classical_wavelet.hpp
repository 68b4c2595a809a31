#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "spikewave/common.hpp"
#include "spikewave/fft.hpp"
#include "spikewave/scale_space.hpp"
#include "spikewave/signal.hpp"

namespace spikewave {

enum class WaveletKind { morlet, limit_kernel_derivative };

/// Raw complex Morlet value (Gaussian envelope times a complex carrier),
/// before any admissibility correction.
inline std::complex<double> morlet_value(double t, double sigma, double omega0) {
  const double envelope = std::exp(-t * t / (2.0 * sigma * sigma)) /
                          std::sqrt(std::numbers::pi * sigma * sigma);
  return envelope * std::complex<double>(std::cos(omega0 * t), std::sin(omega0 * t));
}

/// Sampled mother wavelet on a uniform grid. Tap j sits at
/// t = t_start + j * dt. Zero mean and unit L2 norm by construction.
struct MotherWavelet {
  WaveletKind kind = WaveletKind::morlet;
  double dt = 0.0;
  double t_start = 0.0;
  std::vector<std::complex<double>> taps;

  // Parameter record, depending on kind.
  double sigma = 0.0;
  double omega0 = 0.0;
  ScaleParams scale_params{};
  int derivative_order = 0;

  bool complex_valued() const { return kind == WaveletKind::morlet; }
  double t_end() const { return t_start + dt * static_cast<double>(taps.size()); }

  std::complex<double> mean_mass() const {
    std::complex<double> acc = 0.0;
    for (const auto& v : taps) acc += v;
    return acc * dt;
  }

  double l2_norm() const {
    double acc = 0.0;
    for (const auto& v : taps) acc += std::norm(v);
    return std::sqrt(acc * dt);
  }

  /// Linear interpolation of the sampled form; zero outside the support.
  std::complex<double> sample_at(double t) const {
    const double x = (t - t_start) / dt;
    if (x < 0.0) return 0.0;
    const auto j = static_cast<std::size_t>(x);
    if (j + 1 >= taps.size()) {
      if (j + 1 == taps.size()) return taps[j] * (1.0 - (x - static_cast<double>(j)));
      return 0.0;
    }
    const double frac = x - static_cast<double>(j);
    return taps[j] * (1.0 - frac) + taps[j + 1] * frac;
  }
};

/// Complex Morlet mother wavelet sampled on a symmetric window of +-6 sigma.
/// The discrete mean is removed with an envelope-proportional correction,
/// then the taps are rescaled to unit L2 norm.
inline MotherWavelet morlet(double sigma, double omega0, double dt) {
  detail::require_finite(sigma, "sigma");
  detail::require_positive(sigma, "sigma");
  detail::require_finite(omega0, "omega0");
  detail::require_positive(omega0, "omega0");
  detail::require_finite(dt, "dt");
  detail::require_positive(dt, "dt");
  detail::require(dt < sigma, "dt must resolve sigma");

  const auto half = static_cast<std::size_t>(std::ceil(6.0 * sigma / dt));
  MotherWavelet w;
  w.kind = WaveletKind::morlet;
  w.dt = dt;
  w.t_start = -static_cast<double>(half) * dt;
  w.sigma = sigma;
  w.omega0 = omega0;
  w.taps.resize(2 * half + 1);
  std::vector<double> envelope(w.taps.size());
  std::complex<double> sum = 0.0;
  double env_sum = 0.0;
  for (std::size_t j = 0; j < w.taps.size(); ++j) {
    const double t = w.t_start + dt * static_cast<double>(j);
    w.taps[j] = morlet_value(t, sigma, omega0);
    envelope[j] = std::abs(std::exp(-t * t / (2.0 * sigma * sigma)));
    sum += w.taps[j];
    env_sum += envelope[j];
  }
  const std::complex<double> correction = sum / env_sum;
  for (std::size_t j = 0; j < w.taps.size(); ++j)
    w.taps[j] -= correction * envelope[j];
  const double norm = w.l2_norm();
  for (auto& v : w.taps) v /= norm;
  return w;
}

/// Causal mother wavelet: normalized n-th derivative of the composed
/// truncated-exponential cascade.
inline MotherWavelet limit_kernel_wavelet(const ScaleParams& params, int order,
                                          double dt, double eps_trunc = 1e-6) {
  const DiscreteKernel cascade =
      compose_cascade(time_constants(params), dt, eps_trunc);
  const DiscreteKernel deriv = kernel_derivative(cascade, order);
  MotherWavelet w;
  w.kind = WaveletKind::limit_kernel_derivative;
  w.dt = dt;
  w.t_start = 0.0;
  w.scale_params = params;
  w.derivative_order = order;
  w.taps.assign(deriv.taps.begin(), deriv.taps.end());
  return w;
}

/// Spectrum magnitude peak of the sampled wavelet (rad/s), from a
/// zero-padded transform with parabolic refinement.
inline double center_frequency(const MotherWavelet& w) {
  const std::size_t n =
      detail::next_pow2(std::max<std::size_t>(4096, 4 * w.taps.size()));
  std::vector<std::complex<double>> padded(n);
  std::copy(w.taps.begin(), w.taps.end(), padded.begin());
  detail::fft_inplace(padded, false);
  std::size_t best = 1;
  double best_mag = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double mag = std::abs(padded[k]);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  double refined = static_cast<double>(best);
  if (best + 1 < n / 2 && best > 1) {
    const double ym = std::abs(padded[best - 1]);
    const double y0 = best_mag;
    const double yp = std::abs(padded[best + 1]);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom != 0.0) refined += 0.5 * (ym - yp) / denom;
  }
  return 2.0 * std::numbers::pi * refined / (static_cast<double>(n) * w.dt);
}

/// One-sided admissibility constant: integral of |psi_hat(w)|^2 / w over
/// positive frequencies, from the discrete spectrum of the sampled taps.
inline double admissibility_constant(const MotherWavelet& w) {
  const std::size_t n =
      detail::next_pow2(std::max<std::size_t>(8192, 8 * w.taps.size()));
  std::vector<std::complex<double>> padded(n);
  std::copy(w.taps.begin(), w.taps.end(), padded.begin());
  detail::fft_inplace(padded, false);
  const double d_omega = 2.0 * std::numbers::pi / (static_cast<double>(n) * w.dt);
  double acc = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double omega = d_omega * static_cast<double>(k);
    const double mag = std::abs(padded[k]) * w.dt;
    acc += mag * mag / omega;
  }
  return acc * d_omega;
}

/// Wavelet coefficients over (scale, shift). Shifts sit on the signal grid:
/// b_i = b0 + i * dt.
struct CwtGrid {
  std::vector<double> scales;
  double dt = 0.0;
  double b0 = 0.0;
  std::size_t shifts = 0;
  std::vector<std::complex<double>> coefficients;  // [scale * shifts + shift]
  double admissibility = 0.0;

  std::complex<double> at(std::size_t scale_idx, std::size_t shift_idx) const {
    return coefficients[scale_idx * shifts + shift_idx];
  }
};

inline std::vector<double> log_spaced_scales(double a_min, double a_max,
                                             std::size_t count) {
  detail::require(a_min > 0.0 && a_max > a_min, "scale range must be positive and increasing");
  detail::require(count >= 2, "scale grid needs at least two entries");
  std::vector<double> scales(count);
  const double step = std::log(a_max / a_min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    scales[i] = a_min * std::exp(step * static_cast<double>(i));
  return scales;
}

namespace detail {

/// Dilated wavelet samples on the signal grid: values a^{-1/2} psi(t_j / a)
/// for t_j = j * dt covering the dilated support. Returns the taps and the
/// grid offset of the first tap.
struct DilatedWavelet {
  std::vector<std::complex<double>> taps;
  long long j_min = 0;
};

inline DilatedWavelet dilate_wavelet(const MotherWavelet& w, double a, double dt) {
  const double lo = a * w.t_start;
  const double hi = a * w.t_end();
  const auto j_min = static_cast<long long>(std::floor(lo / dt));
  const auto j_max = static_cast<long long>(std::ceil(hi / dt));
  const double amp = 1.0 / std::sqrt(a);
  DilatedWavelet d;
  d.j_min = j_min;
  d.taps.resize(static_cast<std::size_t>(j_max - j_min + 1));
  for (long long j = j_min; j <= j_max; ++j)
    d.taps[static_cast<std::size_t>(j - j_min)] =
        amp * w.sample_at(static_cast<double>(j) * dt / a);
  if (d.taps.size() < 8)
    throw numeric_error("scale under-resolves the mother wavelet");
  return d;
}

}  // namespace detail

/// Forward transform: T(a, b) = dt * sum_x f(x) a^{-1/2} conj(psi((x-b)/a))
/// with shifts b on the signal grid and zero padding outside it.
inline CwtGrid cwt(const SampledSignal& signal, const MotherWavelet& mother,
                   const std::vector<double>& scales) {
  signal.validate();
  detail::require(!scales.empty(), "scales must be non-empty");
  for (double a : scales)
    detail::require(std::isfinite(a) && a > 0.0, "scales must be positive");

  CwtGrid grid;
  grid.scales = scales;
  grid.dt = signal.dt;
  grid.b0 = signal.t0;
  grid.shifts = signal.samples.size();
  grid.coefficients.assign(scales.size() * grid.shifts, 0.0);
  grid.admissibility = admissibility_constant(mother);

  std::vector<std::complex<double>> f(signal.samples.begin(), signal.samples.end());
  for (std::size_t si = 0; si < scales.size(); ++si) {
    detail::DilatedWavelet d = detail::dilate_wavelet(mother, scales[si], signal.dt);
    std::vector<std::complex<double>> g(d.taps.size());
    for (std::size_t j = 0; j < d.taps.size(); ++j)
      g[j] = std::conj(d.taps[d.taps.size() - 1 - j]);  // reversed conjugate
    const auto conv = detail::fft_convolve(f, g);
    const long long L = static_cast<long long>(d.taps.size());
    for (std::size_t i = 0; i < grid.shifts; ++i) {
      const long long k = static_cast<long long>(i) + d.j_min + L - 1;
      if (k >= 0 && k < static_cast<long long>(conv.size()))
        grid.coefficients[si * grid.shifts + i] = conv[static_cast<std::size_t>(k)] * signal.dt;
    }
  }
  return grid;
}

/// Resolution-of-identity inversion over positive scales with trapezoidal
/// scale quadrature. Complex mothers contribute through twice the real part
/// (one-sided analytic reconstruction); real mothers directly.
inline SampledSignal icwt(const CwtGrid& grid, const MotherWavelet& mother) {
  detail::require(grid.scales.size() >= 2, "icwt needs at least two scales");
  detail::require(grid.shifts > 0, "icwt needs a non-empty grid");
  const double c_psi =
      grid.admissibility > 0.0 ? grid.admissibility : admissibility_constant(mother);
  if (!(c_psi > 0.0) || !std::isfinite(c_psi))
    throw numeric_error("non-admissible wavelet: admissibility constant is not finite");

  const std::size_t n_scales = grid.scales.size();
  std::vector<std::complex<double>> acc(grid.shifts, 0.0);
  for (std::size_t si = 0; si < n_scales; ++si) {
    const double a = grid.scales[si];
    double da;
    if (si == 0)
      da = (grid.scales[1] - grid.scales[0]) / 2.0;
    else if (si + 1 == n_scales)
      da = (grid.scales[n_scales - 1] - grid.scales[n_scales - 2]) / 2.0;
    else
      da = (grid.scales[si + 1] - grid.scales[si - 1]) / 2.0;

    detail::DilatedWavelet d = detail::dilate_wavelet(mother, a, grid.dt);
    std::vector<std::complex<double>> row(grid.shifts);
    for (std::size_t i = 0; i < grid.shifts; ++i)
      row[i] = grid.at(si, i);
    const auto conv = detail::fft_convolve(row, d.taps);
    const double weight = da / (a * a) * grid.dt;
    for (std::size_t i = 0; i < grid.shifts; ++i) {
      const long long k = static_cast<long long>(i) - d.j_min;
      if (k >= 0 && k < static_cast<long long>(conv.size()))
        acc[i] += conv[static_cast<std::size_t>(k)] * weight;
    }
  }

  const double polarity = mother.complex_valued() ? 2.0 : 1.0;
  SampledSignal out;
  out.dt = grid.dt;
  out.t0 = grid.b0;
  out.samples.resize(grid.shifts);
  for (std::size_t i = 0; i < grid.shifts; ++i)
    out.samples[i] = polarity * acc[i].real() / c_psi;
  return out;
}

}  // namespace spikewave
