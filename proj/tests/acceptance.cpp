// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits with the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spikewave/spikewave.hpp"

using namespace spikewave;
namespace fs = std::filesystem;

namespace {

int failures = 0;
int criterion_index = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  ++criterion_index;
  std::printf("[%2d] %s  %-26s %s\n", criterion_index, pass ? "PASS" : "FAIL",
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// 1. Composed kernel and derivative integrals at the reference settings
// (c = sqrt2, K = 7, tau_max = 1, dt = 1e-3, eps_trunc = 1e-6).
void criterion_kernel_integrals() {
  const auto start = std::chrono::steady_clock::now();
  const auto schedule = time_constants({std::numbers::sqrt2, 7, 1.0});
  const DiscreteKernel psi = compose_cascade(schedule, 1e-3, 1e-6);
  const double mass = psi.mass();
  const double d1 = kernel_derivative(psi, 1).mass();
  const double d2 = kernel_derivative(psi, 2).mass();
  const double elapsed = seconds_since(start);
  const bool pass = mass >= 0.99985 && mass <= 1.0 && std::abs(d1) <= 1e-4 &&
                    std::abs(d2) <= 1e-4 && elapsed < 5.0;
  report("kernel-integrals", pass,
         "mass=" + fmt(mass) + " d1=" + fmt(d1) + " d2=" + fmt(d2) +
             " t=" + fmt(elapsed) + "s");
}

// 2. Time-constant schedule against the closed-form values, to 1e-12.
void criterion_mu_schedule() {
  const auto schedule = time_constants({std::numbers::sqrt2, 7, 1.0});
  const std::vector<double> expected = {
      std::exp2(-3.0), std::exp2(-3.0), std::exp2(-2.5), std::exp2(-2.0),
      std::exp2(-1.5), std::exp2(-1.0), std::exp2(-0.5)};
  bool pass = schedule.mus.size() == expected.size();
  double worst = 0.0;
  for (std::size_t i = 0; pass && i < expected.size(); ++i) {
    const double rel = std::abs(schedule.mus[i] - expected[i]) / expected[i];
    worst = std::max(worst, rel);
    if (rel > 1e-12) pass = false;
  }
  const double sum_sq = schedule.sum_squares();
  if (std::abs(sum_sq - 1.0) > 1e-12) pass = false;
  report("mu-schedule", pass, "max_rel=" + fmt(worst) + " sum_sq=" + fmt(sum_sq));
}

// 3. Cascade variance within 1% of the schedule sum of squares on 20 random
// ladders at dt = min(mu)/50.
void criterion_cascade_variance() {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> c_dist(1.2, 2.5);
  std::uniform_int_distribution<int> k_dist(1, 6);
  std::uniform_real_distribution<double> tau_dist(0.25, 4.0);
  bool pass = true;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ScaleParams params{c_dist(rng), k_dist(rng), tau_dist(rng)};
    const auto schedule = time_constants(params);
    const double dt = schedule.min_mu() / 50.0;
    const KernelMoments m = kernel_moments(compose_cascade(schedule, dt));
    const double rel =
        std::abs(m.variance - schedule.sum_squares()) / schedule.sum_squares();
    worst = std::max(worst, rel);
    if (rel > 0.01) pass = false;
  }
  report("cascade-variance", pass, "worst_rel=" + fmt(worst) + " (20 ladders)");
}

// 4. Analytic spike timing for constant drive: first spike within one dt of
// ln 2, inter-spike interval constant across ten spikes.
void criterion_lif_spike_timing() {
  const double dt = 1e-3;
  SampledSignal ones;
  ones.dt = dt;
  ones.samples.assign(10000, 1.0);
  const auto res = simulate_lif(ones, {1.0, 0.5});
  bool pass = res.train.times.size() >= 11;
  double first_err = 1e9, isi_min = 1e9, isi_max = 0.0;
  if (pass) {
    first_err = std::abs(res.train.times[0] - std::numbers::ln2);
    if (first_err > dt) pass = false;
    for (std::size_t i = 1; i <= 10; ++i) {
      const double isi = res.train.times[i] - res.train.times[i - 1];
      isi_min = std::min(isi_min, isi);
      isi_max = std::max(isi_max, isi);
      if (std::abs(isi - std::numbers::ln2) > dt) pass = false;
    }
    if (isi_max - isi_min > dt + 1e-12) pass = false;
  }
  report("lif-spike-timing", pass,
         "|t1-ln2|=" + fmt(first_err) + " isi_spread=" + fmt(isi_max - isi_min));
}

// 5. Temporal scale covariance: sub-threshold trace deviation shrinks by at
// least 1.6x when dt halves, and per-channel spike counts are invariant
// under (t, mu) -> (s t, s mu) on both experiment signals.
void criterion_scale_covariance() {
  const ScaleParams scales{std::numbers::sqrt2, 3, 3.4};
  const std::vector<double> s_values = {0.5, 2.0, 4.0};
  bool pass = true;
  double worst_factor = std::numeric_limits<double>::infinity();
  long long total_delta = 0;

  for (const auto& [name, spec] : experiment_signals(20.0, 1e-3)) {
    const auto table = verify_covariance(spec, scales, 0.1, s_values, false);
    for (const auto& row : table.rows) {
      if (!(row.resampled_trace_dev > 0.0)) {
        pass = false;
        continue;
      }
      const double factor = row.resampled_trace_dev / row.resampled_trace_dev_half;
      worst_factor = std::min(worst_factor, factor);
      if (factor < 1.6) pass = false;
      total_delta += row.relabel_count_delta;
    }
  }
  if (total_delta != 0) pass = false;
  report("scale-covariance", pass,
         "min_shrink=" + fmt(worst_factor) +
             " count_delta=" + std::to_string(total_delta));
}

// 6. Difference-kernel admissibility on every distinct adjacent pair of the
// tested schedules; coincident pairs must raise the degenerate error.
void criterion_difference_kernels() {
  const std::vector<ScaleParams> tested = {{std::numbers::sqrt2, 7, 1.0},
                                           {std::numbers::sqrt2, 3, 3.4},
                                           {3.0, 6, 3.4},
                                           {1.6, 12, 3.4}};
  bool pass = true;
  double worst_mass = 0.0, worst_zero = 0.0;
  int pairs = 0, degenerate = 0;
  for (const auto& params : tested) {
    const auto schedule = time_constants(params);
    for (std::size_t k = 0; k + 1 < schedule.mus.size(); ++k) {
      const double fast = schedule.mus[k], slow = schedule.mus[k + 1];
      const double dt = std::min(1e-3, fast / 50.0);
      if (slow / fast - 1.0 <= kDegenerateMuGap) {
        ++degenerate;
        try {
          difference_kernel(fast, slow, dt);
          pass = false;  // must refuse coincident constants
        } catch (const numeric_error&) {
        }
        continue;
      }
      const DifferenceKernel kappa = difference_kernel(fast, slow, dt);
      ++pairs;
      worst_mass = std::max(worst_mass, std::abs(kappa.kernel.mass()));
      worst_zero = std::max(worst_zero, std::abs(kappa.value_at(0.0) + 1.0));
      if (std::abs(kappa.kernel.mass()) > 1e-6) pass = false;
      if (std::abs(kappa.value_at(0.0) + 1.0) > 1e-9) pass = false;
    }
  }
  report("difference-kernels", pass,
         "pairs=" + std::to_string(pairs) + " degenerate=" +
             std::to_string(degenerate) + " max|mass|=" + fmt(worst_mass) +
             " max|kappa0+1|=" + fmt(worst_zero));
}

// 7. Reconstruction ranking on both experiment signals with the standard
// parameters: truncexp < morlet < spiking-k3 in rel_l2, and the spiking
// errors at K = 6 and K = 12 within 20% of the K = 3 error.
void criterion_reconstruction_ranking() {
  const auto start = std::chrono::steady_clock::now();
  const auto methods = default_comparison_methods(3.4, 0.1);
  CompareConfig cfg;
  bool ordering_ok = true, plateau_ok = true;
  std::string detail;

  for (const auto& [name, spec] : experiment_signals(20.0, 1e-3)) {
    const auto table = run_comparison(name, spec, methods, cfg);
    std::map<std::string, double> err;
    for (const auto& row : table.rows) {
      if (row.status != "ok") ordering_ok = false;
      err[row.name] = row.report.rel_l2;
    }
    if (!(err["truncexp"] < err["morlet"] && err["morlet"] < err["spiking-k3"]))
      ordering_ok = false;
    for (const std::string k : {"spiking-k6", "spiking-k12"})
      if (std::abs(err[k] - err["spiking-k3"]) > 0.20 * err["spiking-k3"])
        plateau_ok = false;
    detail += name + "(te=" + fmt(err["truncexp"]) + " mo=" + fmt(err["morlet"]) +
              " s3=" + fmt(err["spiking-k3"]) + " s6=" + fmt(err["spiking-k6"]) +
              " s12=" + fmt(err["spiking-k12"]) + ") ";
  }
  const double elapsed = seconds_since(start);
  const bool runtime_ok = elapsed < 60.0;
  const bool pass = ordering_ok && plateau_ok && runtime_ok;
  detail += std::string("order=") + (ordering_ok ? "ok" : "VIOLATED") +
            " plateau=" + (plateau_ok ? "ok" : "VIOLATED") + " t=" +
            fmt(elapsed) + "s";
  report("reconstruction-ranking", pass, detail);
}

// 8. Inversion sanity: icwt(cwt(.)) on an in-band sinusoid reaches
// rel_l2 <= 0.05 with 32 log-spaced scales and improves monotonically over
// 8 -> 16 -> 32 scales.
void criterion_cwt_inversion() {
  const SampledSignal f = generate(SignalSpec::sine(1.0, 1.0, 0.0, 12.0, 1e-3));
  const MotherWavelet w = morlet(1.0, 5.0, 1e-3);
  const double a_center = 5.0 / (2.0 * std::numbers::pi);
  const std::size_t edge = 3000;  // keep clear of the zero-padded boundary

  bool pass = true;
  double previous = std::numeric_limits<double>::infinity();
  double final_rel = 0.0;
  std::string detail;
  for (std::size_t n_scales : {8u, 16u, 32u}) {
    const auto scales =
        log_spaced_scales(a_center / 4.0, a_center * 4.0, n_scales);
    const SampledSignal rec = icwt(cwt(f, w, scales), w);
    double err_sq = 0.0, ref_sq = 0.0;
    for (std::size_t i = edge; i + edge < f.size(); ++i) {
      const double d = rec.samples[i] - f.samples[i];
      err_sq += d * d;
      ref_sq += f.samples[i] * f.samples[i];
    }
    const double rel = std::sqrt(err_sq / ref_sq);
    if (!(rel < previous)) pass = false;
    previous = rel;
    final_rel = rel;
    detail += fmt(rel) + " ";
  }
  if (final_rel > 0.05) pass = false;
  report("cwt-inversion", pass, "rel_l2(8,16,32)=" + detail);
}

// 9. End-to-end antisymmetry: the spiking pipeline maps -f to the exact
// negation of its output for f, bit for bit, on ten random composites.
void criterion_pipeline_antisymmetry() {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> amp(0.2, 1.5);
  std::uniform_real_distribution<double> freq(0.2, 4.0);
  std::uniform_real_distribution<double> phase(0.0, 6.28);
  bool pass = true;
  for (int trial = 0; trial < 10; ++trial) {
    SignalSpec spec;
    spec.kind = SignalKind::composite_sine;
    spec.components = {{amp(rng), freq(rng), phase(rng)},
                       {amp(rng), freq(rng), phase(rng)},
                       {amp(rng), freq(rng), phase(rng)}};
    spec.duration = 8.0;
    spec.dt = 1e-3;
    const SampledSignal f = generate(spec);

    SpikingPipelineConfig cfg;
    cfg.scales = {std::numbers::sqrt2, 3, 3.4};
    cfg.theta_thr = 0.1;
    const auto plus = spiking_pipeline(f, cfg);
    const auto minus = spiking_pipeline(negate(f), cfg);
    for (std::size_t i = 0; i < plus.coefficients.values.size(); ++i)
      if (minus.coefficients.values[i] != -plus.coefficients.values[i])
        pass = false;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (minus.reconstruction.signal.samples[i] !=
          -plus.reconstruction.signal.samples[i])
        pass = false;
  }
  report("pipeline-antisymmetry", pass, "10 random composites, bit-exact");
}

// 10. Determinism: the compare command, run twice with an identical
// configuration, produces byte-identical CSV outputs.
void criterion_compare_determinism() {
  const fs::path base = fs::temp_directory_path() / "spikewave_acceptance";
  fs::remove_all(base);
  const fs::path dir_a = base / "run_a";
  const fs::path dir_b = base / "run_b";
  const std::string args =
      " compare --signal sine --methods morlet,spiking-k3 --duration 6"
      " --dt 0.002 --n-scales 12 --skip 1 --out-dir ";
  const std::string quiet = " > /dev/null 2>&1";
  bool pass = true;
  if (std::system((SPIKEWAVE_CLI_PATH + args + dir_a.string() + quiet).c_str()) != 0)
    pass = false;
  if (std::system((SPIKEWAVE_CLI_PATH + args + dir_b.string() + quiet).c_str()) != 0)
    pass = false;

  int compared = 0;
  if (pass) {
    for (const auto& entry : fs::directory_iterator(dir_a)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      std::ifstream fa(entry.path(), std::ios::binary);
      std::ifstream fb(dir_b / entry.path().filename(), std::ios::binary);
      const std::string a{std::istreambuf_iterator<char>(fa),
                          std::istreambuf_iterator<char>()};
      const std::string b{std::istreambuf_iterator<char>(fb),
                          std::istreambuf_iterator<char>()};
      if (a.empty() || a != b) pass = false;
    }
    if (compared == 0) pass = false;
  }
  report("compare-determinism", pass,
         std::to_string(compared) + " csv files byte-compared");
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    const char* name;
    void (*run)();
  };
  const std::vector<Entry> criteria = {
      {"kernel-integrals", criterion_kernel_integrals},
      {"mu-schedule", criterion_mu_schedule},
      {"cascade-variance", criterion_cascade_variance},
      {"lif-spike-timing", criterion_lif_spike_timing},
      {"scale-covariance", criterion_scale_covariance},
      {"difference-kernels", criterion_difference_kernels},
      {"reconstruction-ranking", criterion_reconstruction_ranking},
      {"cwt-inversion", criterion_cwt_inversion},
      {"pipeline-antisymmetry", criterion_pipeline_antisymmetry},
      {"compare-determinism", criterion_compare_determinism},
  };

  const std::string filter = argc > 1 ? argv[1] : "";
  bool matched = false;
  for (const auto& entry : criteria) {
    if (!filter.empty() && filter != entry.name) continue;
    matched = true;
    entry.run();
  }
  if (!matched) {
    std::fprintf(stderr, "unknown criterion: %s\n", filter.c_str());
    return 64;
  }
  std::printf("RESULT: %d of %d criteria passed\n", criterion_index - failures,
              criterion_index);
  return failures;
}
