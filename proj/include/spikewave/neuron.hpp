#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "spikewave/common.hpp"
#include "spikewave/scale_space.hpp"
#include "spikewave/signal.hpp"

namespace spikewave {

/// Membrane parameters of one leaky integrate-and-fire unit. theta_thr may
/// be +infinity to disable firing (pure smoothing probe).
struct NeuronConfig {
  double mu = 1.0;
  double theta_thr = 0.5;

  void validate() const {
    detail::require_finite(mu, "mu");
    detail::require_positive(mu, "mu");
    detail::require(theta_thr > 0.0 && !std::isnan(theta_thr),
                    "theta_thr must be positive");
  }
};

/// Ordered spike times of one (scale, polarity) channel.
struct SpikeTrain {
  std::vector<double> times;
  int scale_index = 0;
  int polarity = +1;

  std::size_t count() const { return times.size(); }
};

/// Recorded membrane potential, one value per input sample (post-reset).
struct MembraneTrace {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<double> u;
};

struct LifResult {
  SpikeTrain train;
  MembraneTrace trace;
};

/// Leaky integrate-and-fire with reset by subtraction.
///
/// Exponential-integrator step: the input is held constant over
/// (t_{i-1}, t_i], so u(t_i) = u(t_{i-1}) * exp(-dt/mu) + (1 - exp(-dt/mu)) * f_i,
/// which is exact for piecewise-constant input. A spike is emitted at the
/// sample time where u crosses theta_thr; theta_thr is subtracted at that
/// instant and the surplus carries over (at most one spike per step). The
/// initial state is u = 0.
inline LifResult simulate_lif(const SampledSignal& signal,
                              const NeuronConfig& config) {
  signal.validate();
  config.validate();
  if (!(signal.dt < config.mu))
    throw numeric_error("under-resolved membrane: dt must stay below mu");

  const double decay = std::exp(-signal.dt / config.mu);
  const double gain = 1.0 - decay;
  LifResult out;
  out.trace.dt = signal.dt;
  out.trace.t0 = signal.t0;
  out.trace.u.resize(signal.samples.size());
  double u = 0.0;
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    u = u * decay + gain * signal.samples[i];
    if (u >= config.theta_thr) {
      out.train.times.push_back(signal.time_at(i));
      u -= config.theta_thr;
    }
    out.trace.u[i] = u;
  }
  return out;
}

/// Polarity-split spike encoding of a signal across a scale hierarchy.
/// Channel k integrates f (positive) and -f (negative) with time constant
/// mu_k from the schedule.
struct TwoChannelEncoding {
  ScaleParams params;
  std::vector<double> mus;
  double theta_thr = 0.0;
  double t0 = 0.0;
  double dt = 0.0;
  double duration = 0.0;
  std::vector<SpikeTrain> positive;
  std::vector<SpikeTrain> negative;
  std::vector<MembraneTrace> positive_traces;  // filled when requested
  std::vector<MembraneTrace> negative_traces;

  std::size_t levels() const { return mus.size(); }

  std::size_t total_spikes() const {
    std::size_t n = 0;
    for (const auto& t : positive) n += t.count();
    for (const auto& t : negative) n += t.count();
    return n;
  }
};

struct EncoderParams {
  ScaleParams scales;
  double theta_thr = 0.1;
  bool record_traces = false;

  void validate() const {
    scales.validate();
    detail::require(theta_thr > 0.0 && !std::isnan(theta_thr),
                    "theta_thr must be positive");
  }
};

inline TwoChannelEncoding two_channel_encode(const SampledSignal& signal,
                                             const EncoderParams& params) {
  signal.validate();
  params.validate();
  const TimeConstantSchedule schedule = time_constants(params.scales);
  const SampledSignal negated = negate(signal);

  TwoChannelEncoding enc;
  enc.params = params.scales;
  enc.mus = schedule.mus;
  enc.theta_thr = params.theta_thr;
  enc.t0 = signal.t0;
  enc.dt = signal.dt;
  enc.duration = signal.duration();
  enc.positive.resize(schedule.mus.size());
  enc.negative.resize(schedule.mus.size());

  for (std::size_t k = 0; k < schedule.mus.size(); ++k) {
    const NeuronConfig cfg{schedule.mus[k], params.theta_thr};
    LifResult pos = simulate_lif(signal, cfg);
    LifResult neg = simulate_lif(negated, cfg);
    pos.train.scale_index = static_cast<int>(k);
    pos.train.polarity = +1;
    neg.train.scale_index = static_cast<int>(k);
    neg.train.polarity = -1;
    enc.positive[k] = std::move(pos.train);
    enc.negative[k] = std::move(neg.train);
    if (params.record_traces) {
      enc.positive_traces.push_back(std::move(pos.trace));
      enc.negative_traces.push_back(std::move(neg.trace));
    }
  }
  return enc;
}

/// Pair of membrane traces for the covariance diagram: (f, mu) on grid t
/// and (rescale_time(f, s), s*mu) on grid t' = s*t. Sample-for-sample the
/// two runs share the ratio dt/mu, so for power-of-two s they agree
/// bit-for-bit.
inline std::pair<MembraneTrace, MembraneTrace> covariance_probe(
    const SampledSignal& signal, const NeuronConfig& config, double s) {
  detail::require_finite(s, "s");
  detail::require(s > 0.0, "s must be positive");
  LifResult base = simulate_lif(signal, config);
  LifResult scaled = simulate_lif(rescale_time(signal, s),
                                  NeuronConfig{config.mu * s, config.theta_thr});
  return {std::move(base.trace), std::move(scaled.trace)};
}

}  // namespace spikewave
