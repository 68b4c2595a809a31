#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

#include "spikewave/common.hpp"
#include "spikewave/signal.hpp"

namespace spikewave {

/// Geometric scale ladder: `levels` variance levels spaced by powers of the
/// distribution ratio c, topping out at tau_max.
struct ScaleParams {
  double c = std::numbers::sqrt2;
  int levels = 7;
  double tau_max = 1.0;

  void validate() const {
    detail::require_finite(c, "c");
    detail::require(c > 1.0, "c must exceed 1");
    detail::require(levels >= 1, "levels must be at least 1");
    detail::require_finite(tau_max, "tau_max");
    detail::require_positive(tau_max, "tau_max");
  }
};

/// Smoothing time constants of the cascade, slowest last. Their squares sum
/// to the ladder's tau_max.
struct TimeConstantSchedule {
  std::vector<double> mus;

  double min_mu() const { return *std::min_element(mus.begin(), mus.end()); }
  double max_mu() const { return *std::max_element(mus.begin(), mus.end()); }
  double sum() const { return std::accumulate(mus.begin(), mus.end(), 0.0); }
  double sum_squares() const {
    double acc = 0.0;
    for (double m : mus) acc += m * m;
    return acc;
  }

  void validate() const {
    detail::require(!mus.empty(), "mus must be non-empty");
    for (double m : mus) {
      detail::require_finite(m, "mus");
      detail::require_positive(m, "mus");
    }
  }
};

/// Causal sampled kernel. Tap i sits at t = i * dt and carries quadrature
/// weight dt, so mass() approximates the continuous integral.
struct DiscreteKernel {
  double dt = 0.0;
  std::vector<double> taps;
  bool causal = true;

  std::size_t size() const { return taps.size(); }
  double duration() const { return dt * static_cast<double>(taps.size()); }

  double mass() const {
    double acc = 0.0;
    for (double v : taps) acc += v;
    return acc * dt;
  }

  double l2_norm() const {
    double acc = 0.0;
    for (double v : taps) acc += v * v;
    return std::sqrt(acc * dt);
  }

  void validate() const {
    detail::require_finite(dt, "dt");
    detail::require_positive(dt, "dt");
    detail::require(!taps.empty(), "taps must be non-empty");
    for (double v : taps)
      if (!std::isfinite(v)) throw validation_error("taps must be finite");
  }
};

/// Variance levels tau_k = c^{2(k - K)} * tau_max for k = 1..K. Strictly
/// increasing; the last level equals tau_max exactly.
inline std::vector<double> tau_levels(const ScaleParams& params) {
  params.validate();
  std::vector<double> taus(static_cast<std::size_t>(params.levels));
  for (int k = 1; k <= params.levels; ++k)
    taus[static_cast<std::size_t>(k - 1)] =
        std::pow(params.c, 2.0 * (k - params.levels)) * params.tau_max;
  return taus;
}

/// Cascade time constants realizing the tau_levels ladder:
///   mu_1 = c^{1-K} sqrt(tau_max)
///   mu_k = c^{k-K-1} sqrt(c^2 - 1) sqrt(tau_max)   for 2 <= k <= K.
/// The squares telescope so that sum(mu_k^2) = tau_max analytically.
inline TimeConstantSchedule time_constants(const ScaleParams& params) {
  params.validate();
  const int k_max = params.levels;
  const double root_tau = std::sqrt(params.tau_max);
  TimeConstantSchedule schedule;
  schedule.mus.resize(static_cast<std::size_t>(k_max));
  schedule.mus[0] = std::pow(params.c, 1.0 - k_max) * root_tau;
  const double spread = std::sqrt(params.c * params.c - 1.0);
  for (int k = 2; k <= k_max; ++k)
    schedule.mus[static_cast<std::size_t>(k - 1)] =
        std::pow(params.c, static_cast<double>(k - k_max - 1)) * spread * root_tau;
  return schedule;
}

namespace detail {

/// Smallest tap count whose analytic tail exp(-N*dt/mu) drops to eps_trunc.
inline std::size_t exponential_horizon(double mu, double dt, double eps_trunc) {
  const double n = std::ceil(mu * std::log(1.0 / eps_trunc) / dt);
  return static_cast<std::size_t>(std::max(1.0, n));
}

inline void check_kernel_resolution(double mu, double dt) {
  if (!(dt < mu))
    throw numeric_error("under-resolved kernel: dt must stay below mu");
}

}  // namespace detail

/// First-order causal smoothing kernel with time constant mu, truncated
/// where the analytic tail drops below eps_trunc. Tap i carries the exact
/// kernel mass of the cell [i*dt, (i+1)*dt) divided by dt, so the discrete
/// mass equals the truncated integral 1 - exp(-N*dt/mu) and stays in
/// [1 - eps_trunc, 1].
inline DiscreteKernel truncated_exponential(double mu, double dt,
                                            double eps_trunc = 1e-6) {
  detail::require_finite(mu, "mu");
  detail::require_positive(mu, "mu");
  detail::require_finite(dt, "dt");
  detail::require_positive(dt, "dt");
  detail::require(eps_trunc > 0.0 && eps_trunc < 1.0,
                  "eps_trunc must lie in (0, 1)");
  detail::check_kernel_resolution(mu, dt);

  const std::size_t n = detail::exponential_horizon(mu, dt, eps_trunc);
  const double decay = std::exp(-dt / mu);
  DiscreteKernel kernel;
  kernel.dt = dt;
  kernel.causal = true;
  kernel.taps.resize(n);
  double cell = (1.0 - decay) / dt;
  for (std::size_t i = 0; i < n; ++i) {
    kernel.taps[i] = cell;
    cell *= decay;
  }
  return kernel;
}

/// Discrete convolution with quadrature weight dt:
/// out[n] = dt * sum_i a[i] * b[n-i].
inline DiscreteKernel convolve(const DiscreteKernel& a, const DiscreteKernel& b) {
  a.validate();
  b.validate();
  if (a.dt != b.dt)
    throw numeric_error("dt mismatch between kernels (no resampling is performed)");
  DiscreteKernel out;
  out.dt = a.dt;
  out.causal = a.causal && b.causal;
  out.taps.assign(a.taps.size() + b.taps.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.taps.size(); ++i) {
    const double ai = a.taps[i];
    if (ai == 0.0) continue;
    double* dst = out.taps.data() + i;
    const double* src = b.taps.data();
    const std::size_t nb = b.taps.size();
    for (std::size_t j = 0; j < nb; ++j) dst[j] += ai * src[j];
  }
  for (double& v : out.taps) v *= a.dt;
  return out;
}

/// Convolution of one truncated exponential per schedule entry. Mass is the
/// product of the factor masses, hence within [1 - K*eps_trunc, 1].
inline DiscreteKernel compose_cascade(const TimeConstantSchedule& schedule,
                                      double dt, double eps_trunc = 1e-6) {
  schedule.validate();
  DiscreteKernel acc = truncated_exponential(schedule.mus[0], dt, eps_trunc);
  for (std::size_t k = 1; k < schedule.mus.size(); ++k)
    acc = convolve(acc, truncated_exponential(schedule.mus[k], dt, eps_trunc));
  return acc;
}

struct KernelMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Mass, first moment and second central moment of a kernel, treating
/// taps[i]*dt as point mass at t = i*dt.
inline KernelMoments kernel_moments(const DiscreteKernel& kernel) {
  kernel.validate();
  const double mass = kernel.mass();
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw numeric_error("zero-mass kernel: moments are undefined");
  double first = 0.0;
  for (std::size_t i = 0; i < kernel.taps.size(); ++i)
    first += static_cast<double>(i) * kernel.dt * kernel.taps[i];
  const double mean = first * kernel.dt / mass;
  double second = 0.0;
  for (std::size_t i = 0; i < kernel.taps.size(); ++i) {
    const double d = static_cast<double>(i) * kernel.dt - mean;
    second += d * d * kernel.taps[i];
  }
  return {mass, mean, second * kernel.dt / mass};
}

/// n-th discrete derivative (central differences, one-sided at the ends),
/// rescaled to unit L2 norm. Supported orders: 1 and 2.
inline DiscreteKernel kernel_derivative(const DiscreteKernel& kernel, int order) {
  kernel.validate();
  if (order < 1 || order > 2)
    throw validation_error("derivative order must be 1 or 2");
  const std::size_t n = kernel.taps.size();
  detail::require(n >= static_cast<std::size_t>(order) + 2,
                  "kernel too short for the requested derivative");
  const double dt = kernel.dt;
  const auto& t = kernel.taps;
  DiscreteKernel out;
  out.dt = dt;
  out.causal = kernel.causal;
  out.taps.resize(n);
  if (order == 1) {
    out.taps[0] = (t[1] - t[0]) / dt;
    for (std::size_t i = 1; i + 1 < n; ++i)
      out.taps[i] = (t[i + 1] - t[i - 1]) / (2.0 * dt);
    out.taps[n - 1] = (t[n - 1] - t[n - 2]) / dt;
  } else {
    const double dt2 = dt * dt;
    out.taps[0] = (t[2] - 2.0 * t[1] + t[0]) / dt2;
    for (std::size_t i = 1; i + 1 < n; ++i)
      out.taps[i] = (t[i + 1] - 2.0 * t[i] + t[i - 1]) / dt2;
    out.taps[n - 1] = (t[n - 1] - 2.0 * t[n - 2] + t[n - 3]) / dt2;
  }
  const double norm = out.l2_norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw numeric_error("derivative has zero L2 norm");
  for (double& v : out.taps) v /= norm;
  return out;
}

/// Causal smoothing transform: out[n] = dt * sum_j kernel[j] * f[n-j] with
/// zero history before the signal start. Output keeps the input grid.
inline SampledSignal scale_space_transform(const SampledSignal& signal,
                                           const DiscreteKernel& kernel) {
  signal.validate();
  kernel.validate();
  if (signal.dt != kernel.dt)
    throw numeric_error("dt mismatch between signal and kernel (no resampling is performed)");
  const std::size_t n = signal.samples.size();
  const std::size_t m = kernel.taps.size();
  SampledSignal out;
  out.dt = signal.dt;
  out.t0 = signal.t0;
  out.samples.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = signal.samples[i];
    if (f == 0.0) continue;
    const std::size_t span = std::min(m, n - i);
    double* dst = out.samples.data() + i;
    const double* k = kernel.taps.data();
    for (std::size_t j = 0; j < span; ++j) dst[j] += k[j] * f;
  }
  for (double& v : out.samples) v *= signal.dt;
  return out;
}

}  // namespace spikewave
