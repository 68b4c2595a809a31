#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "spikewave/common.hpp"
#include "spikewave/neuron.hpp"
#include "spikewave/scale_space.hpp"
#include "spikewave/signal.hpp"

namespace spikewave {

/// Zero-mean bandpass kernel: normalized difference of two smoothing
/// exponentials with adjacent time constants mu_fast < mu_slow.
struct DifferenceKernel {
  double mu_fast = 0.0;
  double mu_slow = 0.0;
  double normalizer = 0.0;  // (mu_slow - mu_fast) / (mu_fast * mu_slow)
  DiscreteKernel kernel;

  /// Continuous kernel value at t >= 0; value_at(0) is -1 by construction.
  double value_at(double t) const {
    const double fast = std::exp(-t / mu_fast) / mu_fast;
    const double slow = std::exp(-t / mu_slow) / mu_slow;
    return (slow - fast) / normalizer;
  }
};

/// Relative gap below which two time constants are treated as equal and the
/// normalizer degenerates.
inline constexpr double kDegenerateMuGap = 1e-9;

/// Build the difference kernel on a shared horizon chosen from the slow
/// tail. Each exponential factor is normalized to exactly unit discrete
/// mass before differencing, so the result has zero mass up to rounding.
inline DifferenceKernel difference_kernel(double mu_fast, double mu_slow,
                                          double dt, double eps_trunc = 1e-6) {
  detail::require_finite(mu_fast, "mu_fast");
  detail::require_positive(mu_fast, "mu_fast");
  detail::require_finite(mu_slow, "mu_slow");
  detail::require_positive(mu_slow, "mu_slow");
  detail::require(mu_fast <= mu_slow, "mu_fast must not exceed mu_slow");
  detail::require(eps_trunc > 0.0 && eps_trunc < 1.0, "eps_trunc must lie in (0, 1)");
  if (mu_slow / mu_fast - 1.0 <= kDegenerateMuGap)
    throw numeric_error("degenerate difference kernel: adjacent time constants coincide");
  detail::check_kernel_resolution(mu_fast, dt);

  const std::size_t n = detail::exponential_horizon(mu_slow, dt, eps_trunc);
  auto unit_mass_taps = [&](double mu) {
    const double decay = std::exp(-dt / mu);
    std::vector<double> taps(n);
    double cell = (1.0 - decay) / dt;
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      taps[i] = cell;
      mass += cell;
      cell *= decay;
    }
    mass *= dt;
    for (double& v : taps) v /= mass;
    return taps;
  };

  const std::vector<double> fast = unit_mass_taps(mu_fast);
  const std::vector<double> slow = unit_mass_taps(mu_slow);

  DifferenceKernel out;
  out.mu_fast = mu_fast;
  out.mu_slow = mu_slow;
  out.normalizer = (mu_slow - mu_fast) / (mu_fast * mu_slow);
  out.kernel.dt = dt;
  out.kernel.causal = true;
  out.kernel.taps.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.kernel.taps[i] = (slow[i] - fast[i]) / out.normalizer;
  return out;
}

/// Stamp one kernel copy per spike: M(t) = sum_{t_f <= t} kappa(t - t_f).
/// Spikes are unit Dirac masses, so no dt quadrature weight applies.
inline SampledSignal reconstruct_channel(const SpikeTrain& train,
                                         const DifferenceKernel& kappa,
                                         double dt, std::size_t length,
                                         double t0 = 0.0) {
  detail::require_positive(dt, "dt");
  detail::require(length > 0, "length must be positive");
  if (kappa.kernel.dt != dt)
    throw numeric_error("dt mismatch between kernel and output grid");
  SampledSignal out;
  out.dt = dt;
  out.t0 = t0;
  out.samples.assign(length, 0.0);
  const auto& taps = kappa.kernel.taps;
  for (double tf : train.times) {
    const auto idx = std::llround((tf - t0) / dt);
    detail::require(idx >= 0 && static_cast<std::size_t>(idx) < length,
                    "spike time outside the output grid");
    const std::size_t start = static_cast<std::size_t>(idx);
    const std::size_t span = std::min(taps.size(), length - start);
    double* dst = out.samples.data() + start;
    for (std::size_t j = 0; j < span; ++j) dst[j] += taps[j];
  }
  return out;
}

/// M = M_pos - M_neg, pointwise on matching grids.
inline SampledSignal polarity_combine(const SampledSignal& pos,
                                      const SampledSignal& neg) {
  pos.validate();
  neg.validate();
  detail::require(pos.dt == neg.dt && pos.t0 == neg.t0 &&
                      pos.samples.size() == neg.samples.size(),
                  "polarity channels must share the sample grid");
  SampledSignal out = pos;
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = pos.samples[i] - neg.samples[i];
  return out;
}

/// Binned signed spike counts, scaled per channel by 1/sqrt(mu_k).
struct CoefficientGrid {
  double bin_width = 0.0;
  double t0 = 0.0;
  std::vector<double> scale_mus;
  std::size_t bins = 0;
  std::vector<double> values;  // row-major [bin * levels + k]

  std::size_t levels() const { return scale_mus.size(); }
  double at(std::size_t bin, std::size_t k) const {
    return values[bin * levels() + k];
  }
  double bin_center(std::size_t bin) const {
    return t0 + (static_cast<double>(bin) + 0.5) * bin_width;
  }
};

/// Count spikes per (bin, scale, polarity) and form
/// (n_pos - n_neg) / sqrt(mu_k). Bins tile [t0, t0 + duration); a spike on
/// an exact bin boundary belongs to the earlier bin (nearest-center tie rule).
inline CoefficientGrid spike_count_coefficients(const TwoChannelEncoding& enc,
                                                double bin_width) {
  detail::require_finite(bin_width, "bin_width");
  detail::require_positive(bin_width, "bin_width");
  detail::require(bin_width >= enc.dt, "bin_width must be at least the signal dt");
  CoefficientGrid grid;
  grid.bin_width = bin_width;
  grid.t0 = enc.t0;
  grid.scale_mus = enc.mus;
  grid.bins = static_cast<std::size_t>(
      std::max(1.0, std::ceil(enc.duration / bin_width - 1e-12)));
  grid.values.assign(grid.bins * grid.scale_mus.size(), 0.0);

  auto bin_of = [&](double t) {
    const double u = (t - enc.t0) / bin_width;
    double j = std::floor(u);
    if (j == u && j >= 1.0) j -= 1.0;  // boundary tie goes to the earlier bin
    const auto idx = static_cast<long long>(j);
    return static_cast<std::size_t>(
        std::clamp<long long>(idx, 0, static_cast<long long>(grid.bins) - 1));
  };

  const std::size_t levels = grid.scale_mus.size();
  for (std::size_t k = 0; k < levels; ++k) {
    for (double t : enc.positive[k].times)
      grid.values[bin_of(t) * levels + k] += 1.0;
    for (double t : enc.negative[k].times)
      grid.values[bin_of(t) * levels + k] -= 1.0;
  }
  for (std::size_t b = 0; b < grid.bins; ++b)
    for (std::size_t k = 0; k < levels; ++k)
      grid.values[b * levels + k] /= std::sqrt(grid.scale_mus[k]);
  return grid;
}

/// Per-scale reconstructions plus their combination.
struct ScaleBandReconstruction {
  std::vector<double> scale_mus;  // mu_fast of each band's kernel pair
  std::vector<SampledSignal> per_scale;
  SampledSignal combined;
};

enum class CombineMode { band_sum, calibrated };

struct Reconstruction {
  SampledSignal signal;
  std::vector<double> weights;  // one per band (all 1 in band-sum mode)
};

namespace detail {

/// Least-squares weights minimizing || sum_k w_k * band_k - target ||_2 over
/// samples [fit_begin, n). Solved via the normal equations with a tiny ridge
/// so that all-zero bands receive weight zero.
inline std::vector<double> calibrated_weights(
    const std::vector<SampledSignal>& bands, const SampledSignal& target,
    std::size_t fit_begin) {
  const std::size_t m = bands.size();
  const std::size_t n = target.samples.size();
  std::vector<double> gram(m * m, 0.0);
  std::vector<double> rhs(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      double acc = 0.0;
      for (std::size_t i = fit_begin; i < n; ++i)
        acc += bands[a].samples[i] * bands[b].samples[i];
      gram[a * m + b] = acc;
      gram[b * m + a] = acc;
    }
    double acc = 0.0;
    for (std::size_t i = fit_begin; i < n; ++i)
      acc += bands[a].samples[i] * target.samples[i];
    rhs[a] = acc;
  }
  double trace = 0.0;
  for (std::size_t a = 0; a < m; ++a) trace += gram[a * m + a];
  const double ridge = (trace > 0.0 ? trace : 1.0) * 1e-12 / static_cast<double>(m);
  for (std::size_t a = 0; a < m; ++a) gram[a * m + a] += ridge;

  // Cholesky factorization (SPD after the ridge).
  std::vector<double> chol(gram);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double acc = chol[a * m + b];
      for (std::size_t p = 0; p < b; ++p) acc -= chol[a * m + p] * chol[b * m + p];
      if (a == b) {
        if (!(acc > 0.0)) throw numeric_error("calibration system is singular");
        chol[a * m + a] = std::sqrt(acc);
      } else {
        chol[a * m + b] = acc / chol[b * m + b];
      }
    }
  }
  std::vector<double> w(rhs);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t p = 0; p < a; ++p) w[a] -= chol[a * m + p] * w[p];
    w[a] /= chol[a * m + a];
  }
  for (std::size_t a = m; a-- > 0;) {
    for (std::size_t p = a + 1; p < m; ++p) w[a] -= chol[p * m + a] * w[p];
    w[a] /= chol[a * m + a];
  }
  return w;
}

}  // namespace detail

/// Combine per-scale bands into one signal. band_sum adds them; calibrated
/// solves scalar weights by least squares against the calibration signal
/// (fitting samples from fit_skip seconds onward).
inline Reconstruction reconstruct_signal(const std::vector<SampledSignal>& bands,
                                         CombineMode mode,
                                         const SampledSignal* calibration = nullptr,
                                         double fit_skip = 0.0) {
  detail::require(!bands.empty(), "bands must be non-empty");
  for (const auto& b : bands) {
    b.validate();
    detail::require(b.dt == bands.front().dt && b.t0 == bands.front().t0 &&
                        b.samples.size() == bands.front().samples.size(),
                    "bands must share the sample grid");
  }
  Reconstruction out;
  out.signal.dt = bands.front().dt;
  out.signal.t0 = bands.front().t0;
  out.signal.samples.assign(bands.front().samples.size(), 0.0);

  if (mode == CombineMode::band_sum) {
    out.weights.assign(bands.size(), 1.0);
  } else {
    detail::require(calibration != nullptr,
                    "calibrated mode needs a calibration signal");
    detail::require(calibration->dt == out.signal.dt &&
                        calibration->samples.size() == out.signal.samples.size(),
                    "calibration signal must share the band grid");
    detail::require(fit_skip >= 0.0 && fit_skip < bands.front().duration(),
                    "fit_skip must stay inside the signal window");
    const auto fit_begin = static_cast<std::size_t>(
        std::ceil(fit_skip / out.signal.dt - 1e-12));
    out.weights = detail::calibrated_weights(bands, *calibration, fit_begin);
  }
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const double w = out.weights[k];
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < out.signal.samples.size(); ++i)
      out.signal.samples[i] += w * bands[k].samples[i];
  }
  return out;
}

/// Expand a coefficient grid to per-scale signals on a sample grid
/// (zero-order hold over each bin).
inline std::vector<SampledSignal> coefficient_bands(const CoefficientGrid& grid,
                                                    double dt,
                                                    std::size_t length) {
  detail::require_positive(dt, "dt");
  detail::require(length > 0, "length must be positive");
  std::vector<SampledSignal> bands(grid.levels());
  for (std::size_t k = 0; k < grid.levels(); ++k) {
    bands[k].dt = dt;
    bands[k].t0 = grid.t0;
    bands[k].samples.resize(length);
    for (std::size_t i = 0; i < length; ++i) {
      const double t = dt * static_cast<double>(i);
      auto bin = static_cast<std::size_t>(
          std::min(std::floor(t / grid.bin_width),
                   static_cast<double>(grid.bins - 1)));
      bands[k].samples[i] = grid.at(bin, k);
    }
  }
  return bands;
}

/// Per-scale spike-train reconstruction through the difference kernels of
/// adjacent schedule pairs (Dirac stamping, then polarity combination).
/// Pairs whose time constants coincide are skipped.
inline ScaleBandReconstruction kernel_band_reconstruction(
    const TwoChannelEncoding& enc, std::size_t length, double eps_trunc = 1e-6) {
  detail::require(enc.levels() >= 2,
                  "kernel-band reconstruction needs at least two scale levels");
  ScaleBandReconstruction out;
  for (std::size_t k = 0; k + 1 < enc.levels(); ++k) {
    if (enc.mus[k + 1] / enc.mus[k] - 1.0 <= kDegenerateMuGap) continue;
    const DifferenceKernel kappa =
        difference_kernel(enc.mus[k], enc.mus[k + 1], enc.dt, eps_trunc);
    SampledSignal pos =
        reconstruct_channel(enc.positive[k], kappa, enc.dt, length, enc.t0);
    SampledSignal neg =
        reconstruct_channel(enc.negative[k], kappa, enc.dt, length, enc.t0);
    out.per_scale.push_back(polarity_combine(pos, neg));
    out.scale_mus.push_back(enc.mus[k]);
  }
  detail::require(!out.per_scale.empty(),
                  "schedule has no distinct adjacent time constants");
  out.combined = reconstruct_signal(out.per_scale, CombineMode::band_sum).signal;
  return out;
}

/// End-to-end spike-count pipeline: encode, bin, expand, combine.
struct SpikingPipelineConfig {
  ScaleParams scales;
  double theta_thr = 0.1;
  double bin_width = 0.05;
  CombineMode mode = CombineMode::calibrated;
  double fit_skip = 0.0;
};

struct SpikingPipelineResult {
  TwoChannelEncoding encoding;
  CoefficientGrid coefficients;
  Reconstruction reconstruction;
};

inline SpikingPipelineResult spiking_pipeline(const SampledSignal& signal,
                                              const SpikingPipelineConfig& cfg) {
  SpikingPipelineResult out;
  out.encoding = two_channel_encode(signal, EncoderParams{cfg.scales, cfg.theta_thr});
  out.coefficients = spike_count_coefficients(out.encoding, cfg.bin_width);
  const auto bands =
      coefficient_bands(out.coefficients, signal.dt, signal.samples.size());
  out.reconstruction = reconstruct_signal(
      bands, cfg.mode, cfg.mode == CombineMode::calibrated ? &signal : nullptr,
      cfg.fit_skip);
  return out;
}

}  // namespace spikewave
