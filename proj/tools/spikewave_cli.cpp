// Command-line front end: kernel construction, spike encoding, spiking
// reconstruction, baseline comparison and covariance checks, all emitting
// plain CSV designed for plotting.
//
// Exit codes: 0 success, 2 validation error, 3 runtime/numerical error,
// 4 I/O error.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikewave/spikewave.hpp"

namespace fs = std::filesystem;
using namespace spikewave;

namespace {

struct SignalOptions {
  std::string preset = "sine";  // sine | composite | zero
  std::string input_path;       // overrides the preset when set
  double amplitude = 1.0;
  double frequency_hz = 1.0 / (2.0 * std::numbers::pi);
  double duration = 10.0;
  double dt = 1e-3;
};

void add_signal_options(CLI::App* cmd, SignalOptions& opts) {
  cmd->add_option("--signal", opts.preset, "Signal preset: sine, composite or zero")
      ->check(CLI::IsMember({"sine", "composite", "zero"}));
  cmd->add_option("--input", opts.input_path,
                  "Read the input signal from a t,value CSV instead");
  cmd->add_option("--amplitude", opts.amplitude, "Sine preset amplitude");
  cmd->add_option("--frequency", opts.frequency_hz, "Sine preset frequency (Hz)");
  cmd->add_option("--duration", opts.duration, "Signal duration (s)");
  cmd->add_option("--dt", opts.dt, "Sample step (s)");
}

SampledSignal make_signal(const SignalOptions& opts) {
  if (!opts.input_path.empty()) return read_signal_csv(opts.input_path);
  SignalSpec spec;
  spec.duration = opts.duration;
  spec.dt = opts.dt;
  if (opts.preset == "sine") {
    spec.kind = SignalKind::sine;
    spec.components = {{opts.amplitude, opts.frequency_hz, 0.0}};
  } else if (opts.preset == "composite") {
    spec.kind = SignalKind::composite_sine;
    spec.components = {{1.0, 0.5, 0.0}, {0.5, 2.0, 0.0}, {0.3, 8.0, 0.0}};
  } else {
    spec.kind = SignalKind::custom_sum;
    spec.components = {};
  }
  return generate(spec);
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory: " + dir);
  if (!fs::is_directory(dir)) throw io_error("not a directory: " + dir);
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) { return detail::format_double(v); }

// --- kernels ---------------------------------------------------------------

struct KernelsArgs {
  double c = std::numbers::sqrt2;
  int levels = 7;
  double tau_max = 1.0;
  double dt = 1e-3;
  double eps_trunc = 1e-6;
  std::string out_dir = "out";
};

int run_kernels(const KernelsArgs& args) {
  const ScaleParams params{args.c, args.levels, args.tau_max};
  const TimeConstantSchedule schedule = time_constants(params);
  const DiscreteKernel psi = compose_cascade(schedule, args.dt, args.eps_trunc);
  const DiscreteKernel dpsi = kernel_derivative(psi, 1);
  const DiscreteKernel ddpsi = kernel_derivative(psi, 2);
  const KernelMoments moments = kernel_moments(psi);
  const auto taus = tau_levels(params);

  prepare_out_dir(args.out_dir);
  write_kernel_csv(out_path(args.out_dir, "kernels.csv"), psi, dpsi, ddpsi);

  std::vector<std::pair<std::string, std::string>> report;
  report.emplace_back("c", fmt(args.c));
  report.emplace_back("levels", std::to_string(args.levels));
  report.emplace_back("tau_max", fmt(args.tau_max));
  report.emplace_back("dt", fmt(args.dt));
  report.emplace_back("eps_trunc", fmt(args.eps_trunc));
  for (std::size_t k = 0; k < schedule.mus.size(); ++k)
    report.emplace_back("mu_" + std::to_string(k), fmt(schedule.mus[k]));
  for (std::size_t k = 0; k < taus.size(); ++k)
    report.emplace_back("tau_" + std::to_string(k), fmt(taus[k]));
  report.emplace_back("mass", fmt(moments.mass));
  report.emplace_back("mean", fmt(moments.mean));
  report.emplace_back("variance", fmt(moments.variance));
  report.emplace_back("sum_mu_squares", fmt(schedule.sum_squares()));
  report.emplace_back("d1_mass", fmt(dpsi.mass()));
  report.emplace_back("d1_l2", fmt(dpsi.l2_norm()));
  report.emplace_back("d2_mass", fmt(ddpsi.mass()));
  report.emplace_back("d2_l2", fmt(ddpsi.l2_norm()));
  write_key_values(out_path(args.out_dir, "kernel_report.txt"), report);
  std::cout << "kernels: mass=" << moments.mass << " d1_mass=" << dpsi.mass()
            << " d2_mass=" << ddpsi.mass() << "\n";
  return 0;
}

// --- encode ----------------------------------------------------------------

struct EncodeArgs {
  SignalOptions signal;
  double c = std::numbers::sqrt2;
  int levels = 2;
  double tau_max = 1.0;
  double theta = 0.5;
  bool traces = false;
  std::string out_dir = "out";
};

int run_encode(const EncodeArgs& args) {
  const SampledSignal input = make_signal(args.signal);
  EncoderParams params;
  params.scales = {args.c, args.levels, args.tau_max};
  params.theta_thr = args.theta;
  params.record_traces = args.traces;
  const TwoChannelEncoding enc = two_channel_encode(input, params);

  prepare_out_dir(args.out_dir);
  write_signal_csv(out_path(args.out_dir, "input.csv"), input);
  write_spikes_csv(out_path(args.out_dir, "spikes.csv"), enc);
  if (args.traces)
    write_membrane_csv(out_path(args.out_dir, "membrane.csv"), enc);
  std::cout << "encode: " << enc.total_spikes() << " spikes across "
            << 2 * enc.levels() << " channels\n";
  return 0;
}

// --- reconstruct -----------------------------------------------------------

struct ReconstructArgs {
  SignalOptions signal = [] {
    SignalOptions s;
    s.duration = 20.0;
    return s;
  }();
  double c = std::numbers::sqrt2;
  int levels = 3;
  double tau_max = 3.4;
  double theta = 0.1;
  double bin_width = 0.05;
  std::string mode = "calibrated";  // calibrated | band-sum
  std::string path = "count";       // count | kernel
  double skip = -1.0;
  std::string out_dir = "out";
};

int run_reconstruct(const ReconstructArgs& args) {
  const SampledSignal input = make_signal(args.signal);
  const ScaleParams scales{args.c, args.levels, args.tau_max};
  const double skip = args.skip >= 0.0
                          ? args.skip
                          : 3.0 * time_constants(scales).max_mu();
  const CombineMode mode = args.mode == "band-sum" ? CombineMode::band_sum
                                                   : CombineMode::calibrated;

  TwoChannelEncoding enc =
      two_channel_encode(input, EncoderParams{scales, args.theta, false});
  CoefficientGrid grid = spike_count_coefficients(enc, args.bin_width);
  Reconstruction recon;
  if (args.path == "kernel") {
    const auto bands = kernel_band_reconstruction(enc, input.size());
    recon = reconstruct_signal(bands.per_scale, mode,
                               mode == CombineMode::calibrated ? &input : nullptr,
                               skip);
  } else {
    const auto bands = coefficient_bands(grid, input.dt, input.size());
    recon = reconstruct_signal(bands, mode,
                               mode == CombineMode::calibrated ? &input : nullptr,
                               skip);
  }
  const ErrorReport report = error_report(input, recon.signal, skip);

  prepare_out_dir(args.out_dir);
  write_signal_csv(out_path(args.out_dir, "input.csv"), input);
  write_coefficients_csv(out_path(args.out_dir, "coefficients.csv"), grid);
  write_signal_csv(out_path(args.out_dir, "reconstruction.csv"), recon.signal);

  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("timestamp", timestamp_utc());
  meta.emplace_back("c", fmt(args.c));
  meta.emplace_back("levels", std::to_string(args.levels));
  meta.emplace_back("tau_max", fmt(args.tau_max));
  meta.emplace_back("theta_thr", fmt(args.theta));
  meta.emplace_back("bin_width", fmt(args.bin_width));
  meta.emplace_back("mode", args.mode);
  meta.emplace_back("path", args.path);
  meta.emplace_back("skip_transient", fmt(skip));
  for (std::size_t k = 0; k < recon.weights.size(); ++k)
    meta.emplace_back("weight_" + std::to_string(k), fmt(recon.weights[k]));
  meta.emplace_back("rmse", fmt(report.rmse));
  meta.emplace_back("rel_l2", fmt(report.rel_l2));
  meta.emplace_back("max_abs", fmt(report.max_abs));
  write_key_values(out_path(args.out_dir, "run_meta.txt"), meta);
  std::cout << "reconstruct: rel_l2=" << report.rel_l2 << " over "
            << recon.weights.size() << " bands\n";
  return 0;
}

// --- compare ---------------------------------------------------------------

struct CompareArgs {
  std::string signal = "both";  // both | sine | composite
  std::vector<std::string> methods;
  double duration = 20.0;
  double dt = 1e-3;
  double tau_max = 3.4;
  double theta = 0.1;
  double bin_width = 0.05;
  std::size_t n_scales = 32;
  double skip = -1.0;
  std::string out_dir = "out";
};

int run_compare(const CompareArgs& args) {
  auto all_methods = default_comparison_methods(args.tau_max, args.theta);
  std::vector<MethodConfig> methods;
  if (args.methods.empty()) {
    methods = all_methods;
  } else {
    for (const auto& name : args.methods) {
      bool found = false;
      for (const auto& m : all_methods)
        if (m.name == name) {
          methods.push_back(m);
          found = true;
        }
      if (!found)
        throw validation_error("unknown method: " + name +
                               " (expected morlet, truncexp, spiking-k3, "
                               "spiking-k6 or spiking-k12)");
    }
  }
  CompareConfig cfg;
  cfg.dt = args.dt;
  cfg.n_scales = args.n_scales;
  cfg.bin_width = args.bin_width;
  cfg.skip_transient = args.skip;

  std::vector<std::pair<std::string, SignalSpec>> signals;
  for (auto& [name, spec] : experiment_signals(args.duration, args.dt))
    if (args.signal == "both" || args.signal == name)
      signals.emplace_back(name, spec);
  detail::require(!signals.empty(), "signal must be both, sine or composite");

  std::vector<ComparisonTable> tables;
  for (const auto& [name, spec] : signals)
    tables.push_back(run_comparison(name, spec, methods, cfg));

  prepare_out_dir(args.out_dir);
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("timestamp", timestamp_utc());
  meta.emplace_back("duration", fmt(args.duration));
  meta.emplace_back("dt", fmt(args.dt));
  meta.emplace_back("tau_max", fmt(args.tau_max));
  meta.emplace_back("theta_thr", fmt(args.theta));
  meta.emplace_back("bin_width", fmt(args.bin_width));
  meta.emplace_back("n_scales", std::to_string(args.n_scales));
  bool any_failed = true;
  for (const auto& table : tables) {
    write_comparison_csv(out_path(args.out_dir, "compare_" + table.signal_name + ".csv"),
                         table);
    write_signal_csv(out_path(args.out_dir, "reference_" + table.signal_name + ".csv"),
                     table.reference);
    meta.emplace_back("skip_transient_" + table.signal_name,
                      fmt(table.skip_transient));
    for (const auto& row : table.rows) {
      if (!row.reconstruction.samples.empty())
        write_signal_csv(out_path(args.out_dir, "recon_" + table.signal_name + "_" +
                                                    row.name + ".csv"),
                         row.reconstruction);
      if (row.status.rfind("error", 0) != 0) any_failed = false;
      for (std::size_t k = 0; k < row.weights.size(); ++k)
        meta.emplace_back("weight_" + table.signal_name + "_" + row.name + "_" +
                              std::to_string(k),
                          fmt(row.weights[k]));
      std::cout << table.signal_name << '/' << row.name
                << ": rel_l2=" << row.report.rel_l2 << " [" << row.status << "]\n";
    }
  }
  write_key_values(out_path(args.out_dir, "run_meta.txt"), meta);
  if (any_failed) throw numeric_error("every method failed");
  return 0;
}

// --- covariance ------------------------------------------------------------

struct CovarianceArgs {
  std::string signal = "sine";
  std::vector<double> s_values = {0.5, 1.0, 2.0, 4.0};
  double duration = 6.0;
  double dt = 1e-3;
  double c = std::numbers::sqrt2;
  int levels = 2;
  double tau_max = 0.25;
  double theta = 0.5;
  bool no_smoothing = false;
  std::string out_dir = "out";
};

int run_covariance(const CovarianceArgs& args) {
  SignalSpec spec;
  for (auto& [name, s] : experiment_signals(args.duration, args.dt))
    if (name == args.signal) spec = s;
  detail::require(!spec.components.empty(), "signal must be sine or composite");
  const ScaleParams scales{args.c, args.levels, args.tau_max};
  const CovarianceTable table = verify_covariance(
      spec, scales, args.theta, args.s_values, !args.no_smoothing);

  prepare_out_dir(args.out_dir);
  write_covariance_csv(out_path(args.out_dir, "covariance.csv"), table);
  for (const auto& row : table.rows)
    std::cout << "s=" << row.s << ": relabel_dev=" << row.relabel_trace_dev
              << " count_delta=" << row.relabel_count_delta
              << " resampled_dev=" << row.resampled_trace_dev << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-causal spiking wavelet analysis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a key-value config file");

  KernelsArgs kernels_args;
  auto* kernels = app.add_subcommand(
      "kernels", "Compose the smoothing cascade and its derivative kernels");
  kernels->add_option("--c", kernels_args.c, "Scale distribution ratio (> 1)");
  kernels->add_option("--k", kernels_args.levels, "Number of scale levels");
  kernels->add_option("--tau-max", kernels_args.tau_max, "Maximum scale variance");
  kernels->add_option("--dt", kernels_args.dt, "Kernel sample step (s)");
  kernels->add_option("--eps-trunc", kernels_args.eps_trunc, "Tail truncation budget");
  kernels->add_option("--out-dir", kernels_args.out_dir, "Output directory");

  EncodeArgs encode_args;
  auto* encode = app.add_subcommand(
      "encode", "Encode a signal into polarity-split spike trains");
  add_signal_options(encode, encode_args.signal);
  encode->add_option("--c", encode_args.c, "Scale distribution ratio (> 1)");
  encode->add_option("--k", encode_args.levels, "Number of scale levels");
  encode->add_option("--tau-max", encode_args.tau_max, "Maximum scale variance");
  encode->add_option("--theta", encode_args.theta, "Firing threshold");
  encode->add_flag("--traces", encode_args.traces, "Also write membrane traces");
  encode->add_option("--out-dir", encode_args.out_dir, "Output directory");

  ReconstructArgs recon_args;
  auto* reconstruct = app.add_subcommand(
      "reconstruct", "Run the spiking pipeline and reconstruct the signal");
  add_signal_options(reconstruct, recon_args.signal);
  reconstruct->add_option("--c", recon_args.c, "Scale distribution ratio (> 1)");
  reconstruct->add_option("--k", recon_args.levels, "Number of scale levels");
  reconstruct->add_option("--tau-max", recon_args.tau_max, "Maximum scale variance");
  reconstruct->add_option("--theta", recon_args.theta, "Firing threshold");
  reconstruct->add_option("--bin-width", recon_args.bin_width,
                          "Coefficient bin width (s)");
  reconstruct->add_option("--mode", recon_args.mode, "calibrated or band-sum")
      ->check(CLI::IsMember({"calibrated", "band-sum"}));
  reconstruct->add_option("--path", recon_args.path, "count or kernel")
      ->check(CLI::IsMember({"count", "kernel"}));
  reconstruct->add_option("--skip", recon_args.skip,
                          "Transient skip for fitting/metrics (s; negative = auto)");
  reconstruct->add_option("--out-dir", recon_args.out_dir, "Output directory");

  CompareArgs compare_args;
  auto* compare = app.add_subcommand(
      "compare", "Compare wavelet reconstruction methods on the experiment signals");
  compare->add_option("--signal", compare_args.signal, "both, sine or composite")
      ->check(CLI::IsMember({"both", "sine", "composite"}));
  compare->add_option("--methods", compare_args.methods,
                      "Subset of: morlet truncexp spiking-k3 spiking-k6 spiking-k12")
      ->delimiter(',');
  compare->add_option("--duration", compare_args.duration, "Signal duration (s)");
  compare->add_option("--dt", compare_args.dt, "Sample step (s)");
  compare->add_option("--tau-max", compare_args.tau_max, "Maximum scale variance");
  compare->add_option("--theta", compare_args.theta, "Firing threshold");
  compare->add_option("--bin-width", compare_args.bin_width, "Coefficient bin width (s)");
  compare->add_option("--n-scales", compare_args.n_scales, "Scales in the baseline grids");
  compare->add_option("--skip", compare_args.skip,
                      "Transient skip (s; negative = auto)");
  compare->add_option("--out-dir", compare_args.out_dir, "Output directory");

  CovarianceArgs cov_args;
  auto* covariance = app.add_subcommand(
      "covariance", "Temporal scale covariance deviation table");
  covariance->add_option("--s", cov_args.s_values, "Scaling factors")->delimiter(',');
  covariance->add_option("--signal", cov_args.signal, "sine or composite")
      ->check(CLI::IsMember({"sine", "composite"}));
  covariance->add_option("--duration", cov_args.duration, "Signal duration (s)");
  covariance->add_option("--dt", cov_args.dt, "Sample step (s)");
  covariance->add_option("--c", cov_args.c, "Scale distribution ratio (> 1)");
  covariance->add_option("--k", cov_args.levels, "Number of scale levels");
  covariance->add_option("--tau-max", cov_args.tau_max, "Maximum scale variance");
  covariance->add_option("--theta", cov_args.theta, "Firing threshold");
  covariance->add_flag("--no-smoothing", cov_args.no_smoothing,
                       "Skip the smoothing-kernel path");
  covariance->add_option("--out-dir", cov_args.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (kernels->parsed()) return run_kernels(kernels_args);
    if (encode->parsed()) return run_encode(encode_args);
    if (reconstruct->parsed()) return run_reconstruct(recon_args);
    if (compare->parsed()) return run_compare(compare_args);
    if (covariance->parsed()) return run_covariance(cov_args);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
