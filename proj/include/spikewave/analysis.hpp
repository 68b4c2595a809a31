#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spikewave/classical_wavelet.hpp"
#include "spikewave/common.hpp"
#include "spikewave/neuron.hpp"
#include "spikewave/scale_space.hpp"
#include "spikewave/signal.hpp"
#include "spikewave/spiking_wavelet.hpp"

namespace spikewave {

struct ErrorReport {
  double rmse = 0.0;
  double rel_l2 = 0.0;
  double max_abs = 0.0;
  bool degenerate_reference = false;
};

/// Pointwise error metrics over t >= t0 + skip_transient.
inline ErrorReport error_report(const SampledSignal& reference,
                                const SampledSignal& candidate,
                                double skip_transient = 0.0) {
  reference.validate();
  candidate.validate();
  detail::require(reference.dt == candidate.dt &&
                      reference.samples.size() == candidate.samples.size(),
                  "signal grids differ");
  detail::require(skip_transient >= 0.0 && skip_transient < reference.duration(),
                  "skip_transient must stay inside the signal window");
  const auto begin = static_cast<std::size_t>(
      std::ceil(skip_transient / reference.dt - 1e-12));
  const std::size_t n = reference.samples.size();

  double sq = 0.0, ref_sq = 0.0, max_abs = 0.0;
  for (std::size_t i = begin; i < n; ++i) {
    const double d = candidate.samples[i] - reference.samples[i];
    sq += d * d;
    ref_sq += reference.samples[i] * reference.samples[i];
    max_abs = std::max(max_abs, std::abs(d));
  }
  const auto count = static_cast<double>(n - begin);
  ErrorReport rep;
  rep.rmse = std::sqrt(sq / count);
  rep.max_abs = max_abs;
  if (ref_sq > 0.0) {
    rep.rel_l2 = std::sqrt(sq / ref_sq);
  } else {
    rep.degenerate_reference = true;
    rep.rel_l2 = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

struct AdmissibilityReport {
  double mass = 0.0;
  double l2 = 0.0;
  bool pass = false;
};

inline AdmissibilityReport verify_admissibility(const DiscreteKernel& kernel) {
  kernel.validate();
  AdmissibilityReport rep;
  rep.mass = kernel.mass();
  rep.l2 = kernel.l2_norm();
  rep.pass = std::abs(rep.mass) <= 1e-4 && std::abs(rep.l2 - 1.0) <= 1e-6;
  return rep;
}

inline AdmissibilityReport verify_admissibility(const MotherWavelet& wavelet) {
  AdmissibilityReport rep;
  rep.mass = std::abs(wavelet.mean_mass());
  rep.l2 = wavelet.l2_norm();
  rep.pass = std::abs(rep.mass) <= 1e-4 && std::abs(rep.l2 - 1.0) <= 1e-6;
  return rep;
}

/// One covariance check at scaling factor s. Relabel columns compare the
/// run on the relabeled grid (exact covariance of the discretization);
/// resampled columns compare against the dilated signal regenerated on the
/// original dt, whose deviation measures discretization error and shrinks
/// first order in dt.
struct CovarianceRow {
  double s = 1.0;
  double relabel_trace_dev = 0.0;
  long long relabel_count_delta = 0;
  double resampled_trace_dev = 0.0;
  double resampled_trace_dev_half = 0.0;
  double smoothing_dev = 0.0;
};

struct CovarianceTable {
  std::vector<CovarianceRow> rows;
};

namespace detail {

inline double aligned_max_dev(const std::vector<double>& base,
                              const std::vector<double>& scaled, double s) {
  double dev = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double j_real = s * static_cast<double>(i);
    const auto j = static_cast<long long>(std::llround(j_real));
    if (std::abs(j_real - static_cast<double>(j)) > 1e-9) continue;
    if (j < 0 || j >= static_cast<long long>(scaled.size())) continue;
    dev = std::max(dev, std::abs(scaled[static_cast<std::size_t>(j)] - base[i]));
    any = true;
  }
  if (!any) throw numeric_error("no aligned grid points for this scaling factor");
  return dev;
}

inline double resampled_trace_deviation(const SignalSpec& spec,
                                        const std::vector<double>& mus,
                                        double s, double dt) {
  SignalSpec base_spec = spec;
  base_spec.dt = dt;
  const SampledSignal base = generate(base_spec);
  SignalSpec dilated = dilate_spec(base_spec, s);
  const SampledSignal scaled = generate(dilated);
  const double inf = std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (double mu : mus) {
    const auto t0 = simulate_lif(base, NeuronConfig{mu, inf}).trace;
    const auto t1 = simulate_lif(scaled, NeuronConfig{mu * s, inf}).trace;
    dev = std::max(dev, aligned_max_dev(t0.u, t1.u, s));
  }
  return dev;
}

}  // namespace detail

/// Deviation table for scaling factors s: LIF trace and spike-count checks
/// plus the smoothing-kernel path.
inline CovarianceTable verify_covariance(const SignalSpec& spec,
                                         const ScaleParams& scales,
                                         double theta_thr,
                                         const std::vector<double>& s_values,
                                         bool include_smoothing = true,
                                         double eps_trunc = 1e-6) {
  spec.validate();
  const TimeConstantSchedule schedule = time_constants(scales);
  detail::require(theta_thr > 0.0 && !std::isnan(theta_thr),
                  "theta_thr must be positive");
  const SampledSignal base = generate(spec);
  const double inf = std::numeric_limits<double>::infinity();

  CovarianceTable table;
  for (double s : s_values) {
    detail::require(s > 0.0 && std::isfinite(s), "s must be positive");
    CovarianceRow row;
    row.s = s;

    for (double mu : schedule.mus) {
      // Relabeled grid: identical sample count, dt' = s*dt.
      auto probes = covariance_probe(base, NeuronConfig{mu, inf}, s);
      double dev = 0.0;
      for (std::size_t i = 0; i < probes.first.u.size(); ++i)
        dev = std::max(dev, std::abs(probes.second.u[i] - probes.first.u[i]));
      row.relabel_trace_dev = std::max(row.relabel_trace_dev, dev);

      const auto spikes0 = simulate_lif(base, NeuronConfig{mu, theta_thr});
      const auto spikes1 = simulate_lif(rescale_time(base, s),
                                        NeuronConfig{mu * s, theta_thr});
      row.relabel_count_delta +=
          std::llabs(static_cast<long long>(spikes0.train.count()) -
                     static_cast<long long>(spikes1.train.count()));
    }

    row.resampled_trace_dev =
        detail::resampled_trace_deviation(spec, schedule.mus, s, spec.dt);
    row.resampled_trace_dev_half =
        detail::resampled_trace_deviation(spec, schedule.mus, s, spec.dt / 2.0);

    if (include_smoothing) {
      const DiscreteKernel kernel = compose_cascade(schedule, base.dt, eps_trunc);
      TimeConstantSchedule scaled_schedule = schedule;
      for (double& mu : scaled_schedule.mus) mu *= s;
      const DiscreteKernel scaled_kernel =
          compose_cascade(scaled_schedule, base.dt, eps_trunc);
      SignalSpec dilated = dilate_spec(spec, s);
      const SampledSignal scaled_signal = generate(dilated);
      const auto l0 = scale_space_transform(base, kernel);
      const auto l1 = scale_space_transform(scaled_signal, scaled_kernel);
      row.smoothing_dev = detail::aligned_max_dev(l0.samples, l1.samples, s);
    }
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Method comparison runner
// ---------------------------------------------------------------------------

enum class MethodKind { morlet, limit_kernel, spiking };

struct MethodConfig {
  std::string name;
  MethodKind kind = MethodKind::morlet;
  double sigma = 1.0;            // morlet
  double omega0 = 5.0;           // morlet
  ScaleParams scales{};          // limit_kernel mother / spiking schedule
  int derivative_order = 1;      // limit_kernel
  double theta_thr = 0.1;        // spiking
};

struct CompareConfig {
  double dt = 1e-3;
  std::size_t n_scales = 32;
  double bin_width = 0.05;       // 50 * dt at the default dt
  double skip_transient = -1.0;  // < 0: 3 * max(mu) over the configured schedules
  double eps_trunc = 1e-6;
  CombineMode mode = CombineMode::calibrated;
  // Analysis band as a time-constant range; <= 0 entries derive the band
  // from the configured schedules.
  double band_mu_min = 0.0;
  double band_mu_max = 0.0;
};

struct MethodResult {
  std::string name;
  std::string params;
  ErrorReport report;
  std::string status;  // "ok", "degenerate-reference" or "error: ..."
  SampledSignal reconstruction;
  std::vector<double> weights;
};

struct ComparisonTable {
  std::string signal_name;
  SampledSignal reference;
  double skip_transient = 0.0;
  std::vector<MethodResult> rows;
};

/// The standard experiment method set: a Morlet baseline, the causal
/// cascade-derivative baseline, and spike-count pipelines at three ladder
/// configurations.
inline std::vector<MethodConfig> default_comparison_methods(double tau_max = 3.4,
                                                            double theta_thr = 0.1) {
  std::vector<MethodConfig> methods(5);
  methods[0].name = "morlet";
  methods[0].kind = MethodKind::morlet;
  methods[1].name = "truncexp";
  methods[1].kind = MethodKind::limit_kernel;
  methods[1].scales = {std::numbers::sqrt2, 5, tau_max};
  methods[1].derivative_order = 1;
  methods[2] = {"spiking-k3", MethodKind::spiking, 1.0, 5.0,
                {std::numbers::sqrt2, 3, tau_max}, 1, theta_thr};
  methods[3] = {"spiking-k6", MethodKind::spiking, 1.0, 5.0,
                {3.0, 6, tau_max}, 1, theta_thr};
  methods[4] = {"spiking-k12", MethodKind::spiking, 1.0, 5.0,
                {1.6, 12, tau_max}, 1, theta_thr};
  return methods;
}

/// The two standard experiment signals on the default grid.
inline std::vector<std::pair<std::string, SignalSpec>> experiment_signals(
    double duration = 20.0, double dt = 1e-3) {
  SignalSpec slow;
  slow.kind = SignalKind::sine;
  slow.components = {{1.0, 1.0 / (2.0 * std::numbers::pi), 0.0}};
  slow.duration = duration;
  slow.dt = dt;
  SignalSpec composite;
  composite.kind = SignalKind::composite_sine;
  composite.components = {{1.0, 0.5, 0.0}, {0.5, 2.0, 0.0}, {0.3, 8.0, 0.0}};
  composite.duration = duration;
  composite.dt = dt;
  return {{"sine", slow}, {"composite", composite}};
}

namespace detail {

inline std::string format_params(const MethodConfig& m) {
  char buf[160];
  switch (m.kind) {
    case MethodKind::morlet:
      std::snprintf(buf, sizeof buf, "sigma=%g omega0=%g", m.sigma, m.omega0);
      break;
    case MethodKind::limit_kernel:
      std::snprintf(buf, sizeof buf, "c=%g K=%d tau_max=%g n=%d", m.scales.c,
                    m.scales.levels, m.scales.tau_max, m.derivative_order);
      break;
    case MethodKind::spiking:
      std::snprintf(buf, sizeof buf, "c=%g K=%d tau_max=%g theta=%g", m.scales.c,
                    m.scales.levels, m.scales.tau_max, m.theta_thr);
      break;
  }
  return buf;
}

}  // namespace detail

/// Run every method end-to-end against the generated signal and collect
/// error metrics. Failures are recorded per row; the run continues.
inline ComparisonTable run_comparison(const std::string& signal_name,
                                      const SignalSpec& spec,
                                      const std::vector<MethodConfig>& methods,
                                      const CompareConfig& cfg) {
  detail::require(!methods.empty(), "methods must be non-empty");
  {
    std::set<std::string> names;
    for (const auto& m : methods)
      detail::require(names.insert(m.name).second, "method names must be unique");
  }
  SignalSpec run_spec = spec;
  run_spec.dt = cfg.dt;
  const SampledSignal reference = generate(run_spec);

  // Shared analysis band over scale schedules, mapped per mother wavelet via
  // its measured center frequency.
  double mu_lo = cfg.band_mu_min, mu_hi = cfg.band_mu_max;
  double mu_peak = 0.0;
  if (!(mu_lo > 0.0) || !(mu_hi > mu_lo)) {
    mu_lo = std::numeric_limits<double>::infinity();
    mu_hi = 0.0;
    for (const auto& m : methods) {
      if (m.kind == MethodKind::morlet) continue;
      const auto schedule = time_constants(m.scales);
      mu_lo = std::min(mu_lo, schedule.min_mu());
      mu_hi = std::max(mu_hi, schedule.max_mu());
    }
    if (!(mu_hi > 0.0)) {
      // Morlet-only run: fall back to the standard experiment schedules.
      for (const auto& m : default_comparison_methods()) {
        if (m.kind == MethodKind::morlet) continue;
        const auto schedule = time_constants(m.scales);
        mu_lo = std::min(mu_lo, schedule.min_mu());
        mu_hi = std::max(mu_hi, schedule.max_mu());
      }
    }
  }
  for (const auto& m : methods)
    if (m.kind != MethodKind::morlet)
      mu_peak = std::max(mu_peak, time_constants(m.scales).max_mu());
  if (mu_peak == 0.0) mu_peak = mu_hi;

  ComparisonTable table;
  table.signal_name = signal_name;
  table.reference = reference;
  table.skip_transient =
      cfg.skip_transient >= 0.0 ? cfg.skip_transient : 3.0 * mu_peak;
  detail::require(table.skip_transient < reference.duration(),
                  "skip_transient must stay inside the signal window");

  for (const auto& m : methods) {
    MethodResult row;
    row.name = m.name;
    row.params = detail::format_params(m);
    try {
      SampledSignal recon;
      if (m.kind == MethodKind::spiking) {
        SpikingPipelineConfig pipe;
        pipe.scales = m.scales;
        pipe.theta_thr = m.theta_thr;
        pipe.bin_width = cfg.bin_width;
        pipe.mode = cfg.mode;
        pipe.fit_skip = table.skip_transient;
        auto result = spiking_pipeline(reference, pipe);
        recon = std::move(result.reconstruction.signal);
        row.weights = std::move(result.reconstruction.weights);
      } else {
        const MotherWavelet mother =
            m.kind == MethodKind::morlet
                ? morlet(m.sigma, m.omega0, cfg.dt)
                : limit_kernel_wavelet(m.scales, m.derivative_order, cfg.dt,
                                       cfg.eps_trunc);
        const double omega_c = center_frequency(mother);
        const auto scales = log_spaced_scales(omega_c * mu_lo, omega_c * mu_hi,
                                              cfg.n_scales);
        recon = icwt(cwt(reference, mother, scales), mother);
      }
      row.report = error_report(reference, recon, table.skip_transient);
      row.status = row.report.degenerate_reference ? "degenerate-reference" : "ok";
      row.reconstruction = std::move(recon);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace spikewave
