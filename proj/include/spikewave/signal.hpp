#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "spikewave/common.hpp"

namespace spikewave {

/// Uniformly sampled real-valued signal. samples[i] holds the value at
/// t0 + i * dt; the duration is exactly dt * samples.size().
struct SampledSignal {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  double duration() const { return dt * static_cast<double>(samples.size()); }
  double time_at(std::size_t i) const {
    return t0 + dt * static_cast<double>(i);
  }

  void validate() const {
    detail::require_finite(dt, "dt");
    detail::require_positive(dt, "dt");
    detail::require_finite(t0, "t0");
    detail::require(!samples.empty(), "samples must be non-empty");
    for (double v : samples) {
      if (!std::isfinite(v))
        throw validation_error("samples must be finite");
    }
  }
};

enum class SignalKind { sine, composite_sine, custom_sum };

struct SineComponent {
  double amplitude = 0.0;
  double frequency_hz = 0.0;
  double phase_rad = 0.0;
};

/// Description of a sum-of-sinusoids test signal.
struct SignalSpec {
  SignalKind kind = SignalKind::custom_sum;
  std::vector<SineComponent> components;
  double duration = 1.0;
  double dt = 1e-3;

  void validate() const {
    detail::require_finite(duration, "duration");
    detail::require_positive(duration, "duration");
    detail::require_finite(dt, "dt");
    detail::require_positive(dt, "dt");
    detail::require(duration / dt >= 1.0, "duration must cover at least one sample");
    if (kind == SignalKind::sine)
      detail::require(components.size() == 1,
                      "components: a sine spec takes exactly one component");
    if (kind == SignalKind::composite_sine)
      detail::require(!components.empty(),
                      "components: a composite-sine spec takes at least one component");
    for (const auto& c : components) {
      detail::require_finite(c.amplitude, "components.amplitude");
      detail::require_finite(c.frequency_hz, "components.frequency_hz");
      detail::require_finite(c.phase_rad, "components.phase_rad");
      detail::require(c.frequency_hz >= 0.0,
                      "components.frequency_hz must be non-negative");
      if (c.frequency_hz > 0.0)
        detail::require(dt < 1.0 / (8.0 * c.frequency_hz),
                        "dt must stay below an eighth of the shortest component period");
    }
  }

  static SignalSpec sine(double amplitude, double frequency_hz,
                         double phase_rad, double duration, double dt) {
    SignalSpec s;
    s.kind = SignalKind::sine;
    s.components = {{amplitude, frequency_hz, phase_rad}};
    s.duration = duration;
    s.dt = dt;
    return s;
  }
};

/// Evaluate the spec analytically at time t.
inline double evaluate_spec(const SignalSpec& spec, double t) {
  double acc = 0.0;
  for (const auto& c : spec.components)
    acc += c.amplitude *
           std::sin(2.0 * std::numbers::pi * c.frequency_hz * t + c.phase_rad);
  return acc;
}

/// Sample the spec on a uniform grid starting at t = 0. Pure: identical
/// specs produce identical signals.
inline SampledSignal generate(const SignalSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::llround(spec.duration / spec.dt));
  SampledSignal out;
  out.dt = spec.dt;
  out.t0 = 0.0;
  out.samples.resize(n == 0 ? 1 : n);
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = evaluate_spec(spec, out.time_at(i));
  return out;
}

/// Relabel the time axis by t' = s * t. Sample values are untouched, so
/// f'(t') = f(t) holds exactly on grid points.
inline SampledSignal rescale_time(const SampledSignal& signal, double s) {
  signal.validate();
  detail::require_finite(s, "s");
  detail::require(s > 0.0, "s must be positive");
  SampledSignal out = signal;
  out.dt = signal.dt * s;
  out.t0 = signal.t0 * s;
  return out;
}

/// Time-dilated spec: the signal f'(t') = f(t'/s) sampled on the same dt.
/// Frequencies shrink by s, duration grows by s.
inline SignalSpec dilate_spec(const SignalSpec& spec, double s) {
  detail::require(s > 0.0 && std::isfinite(s), "s must be positive");
  SignalSpec out = spec;
  out.duration = spec.duration * s;
  for (auto& c : out.components) c.frequency_hz /= s;
  return out;
}

inline SampledSignal negate(const SampledSignal& signal) {
  SampledSignal out = signal;
  for (double& v : out.samples) v = -v;
  return out;
}

}  // namespace spikewave
