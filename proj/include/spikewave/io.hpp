#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spikewave/analysis.hpp"
#include "spikewave/classical_wavelet.hpp"
#include "spikewave/common.hpp"
#include "spikewave/neuron.hpp"
#include "spikewave/scale_space.hpp"
#include "spikewave/signal.hpp"
#include "spikewave/spiking_wavelet.hpp"

namespace spikewave {

namespace detail {

/// Locale-independent shortest-exact formatting via %.17g.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  return in;
}

inline double parse_double(const std::string& token, const std::string& path) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw io_error("malformed number '" + token + "' in " + path);
  return v;
}

inline std::vector<std::vector<std::string>> read_csv_rows(
    const std::string& path, const std::string& expected_header) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw io_error("unexpected header in " + path + ": '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace detail

// --- signal CSV: header "t,value", one row per sample ---

inline void write_signal_csv(const std::string& path, const SampledSignal& signal) {
  signal.validate();
  auto out = detail::open_output(path);
  out << "t,value\n";
  for (std::size_t i = 0; i < signal.samples.size(); ++i)
    out << detail::format_double(signal.time_at(i)) << ','
        << detail::format_double(signal.samples[i]) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline SampledSignal read_signal_csv(const std::string& path) {
  const auto rows = detail::read_csv_rows(path, "t,value");
  if (rows.size() < 2) throw io_error("signal needs at least two samples: " + path);
  SampledSignal signal;
  std::vector<double> times;
  for (const auto& fields : rows) {
    if (fields.size() != 2) throw io_error("expected two columns in " + path);
    times.push_back(detail::parse_double(fields[0], path));
    signal.samples.push_back(detail::parse_double(fields[1], path));
  }
  signal.t0 = times.front();
  signal.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(signal.dt > 0.0)) throw io_error("non-increasing time column in " + path);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = signal.t0 + signal.dt * static_cast<double>(i);
    if (std::abs(times[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw io_error("non-uniform time column in " + path);
  }
  signal.validate();
  return signal;
}

// --- kernel CSV: header "t,psi,dpsi,ddpsi" ---

inline void write_kernel_csv(const std::string& path, const DiscreteKernel& psi,
                             const DiscreteKernel& dpsi,
                             const DiscreteKernel& ddpsi) {
  auto out = detail::open_output(path);
  out << "t,psi,dpsi,ddpsi\n";
  for (std::size_t i = 0; i < psi.taps.size(); ++i) {
    const double t = psi.dt * static_cast<double>(i);
    out << detail::format_double(t) << ',' << detail::format_double(psi.taps[i])
        << ',' << detail::format_double(i < dpsi.taps.size() ? dpsi.taps[i] : 0.0)
        << ',' << detail::format_double(i < ddpsi.taps.size() ? ddpsi.taps[i] : 0.0)
        << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

// --- spike events CSV: header "time,scale_index,polarity" ---

inline void write_spikes_csv(const std::string& path,
                             const TwoChannelEncoding& enc) {
  auto out = detail::open_output(path);
  out << "time,scale_index,polarity\n";
  // Events ordered by time, then scale, then polarity (+ before -).
  struct Event {
    double t;
    int k;
    int pol;
  };
  std::vector<Event> events;
  for (std::size_t k = 0; k < enc.levels(); ++k) {
    for (double t : enc.positive[k].times)
      events.push_back({t, static_cast<int>(k), +1});
    for (double t : enc.negative[k].times)
      events.push_back({t, static_cast<int>(k), -1});
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.k != b.k) return a.k < b.k;
    return a.pol > b.pol;
  });
  for (const auto& e : events)
    out << detail::format_double(e.t) << ',' << e.k << ',' << e.pol << '\n';
  if (!out) throw io_error("write failed: " + path);
}

struct SpikeEventRow {
  double time;
  int scale_index;
  int polarity;
};

inline std::vector<SpikeEventRow> read_spikes_csv(const std::string& path) {
  const auto rows = detail::read_csv_rows(path, "time,scale_index,polarity");
  std::vector<SpikeEventRow> events;
  for (const auto& fields : rows) {
    if (fields.size() != 3) throw io_error("expected three columns in " + path);
    events.push_back({detail::parse_double(fields[0], path),
                      static_cast<int>(detail::parse_double(fields[1], path)),
                      static_cast<int>(detail::parse_double(fields[2], path))});
  }
  return events;
}

// --- membrane traces CSV: header "t,scale_index,polarity,u" ---

inline void write_membrane_csv(const std::string& path,
                               const TwoChannelEncoding& enc) {
  detail::require(!enc.positive_traces.empty(),
                  "encoding was produced without traces");
  auto out = detail::open_output(path);
  out << "t,scale_index,polarity,u\n";
  for (std::size_t k = 0; k < enc.positive_traces.size(); ++k) {
    const auto& pos = enc.positive_traces[k];
    const auto& neg = enc.negative_traces[k];
    for (std::size_t i = 0; i < pos.u.size(); ++i) {
      const double t = pos.t0 + pos.dt * static_cast<double>(i);
      out << detail::format_double(t) << ',' << k << ",1,"
          << detail::format_double(pos.u[i]) << '\n';
      out << detail::format_double(t) << ',' << k << ",-1,"
          << detail::format_double(neg.u[i]) << '\n';
    }
  }
  if (!out) throw io_error("write failed: " + path);
}

// --- spike-count coefficients CSV: header "t_bin,k,mu,w" ---

inline void write_coefficients_csv(const std::string& path,
                                   const CoefficientGrid& grid) {
  auto out = detail::open_output(path);
  out << "t_bin,k,mu,w\n";
  for (std::size_t b = 0; b < grid.bins; ++b)
    for (std::size_t k = 0; k < grid.levels(); ++k)
      out << detail::format_double(grid.bin_center(b)) << ',' << k << ','
          << detail::format_double(grid.scale_mus[k]) << ','
          << detail::format_double(grid.at(b, k)) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

// --- classical coefficients CSV: header "a,b,re,im" ---

inline void write_cwt_csv(const std::string& path, const CwtGrid& grid) {
  auto out = detail::open_output(path);
  out << "a,b,re,im\n";
  for (std::size_t si = 0; si < grid.scales.size(); ++si)
    for (std::size_t bi = 0; bi < grid.shifts; ++bi) {
      const auto v = grid.at(si, bi);
      out << detail::format_double(grid.scales[si]) << ','
          << detail::format_double(grid.b0 + grid.dt * static_cast<double>(bi))
          << ',' << detail::format_double(v.real()) << ','
          << detail::format_double(v.imag()) << '\n';
    }
  if (!out) throw io_error("write failed: " + path);
}

// --- comparison table CSV: header "method,params,rmse,rel_l2,max_abs,status" ---

inline void write_comparison_csv(const std::string& path,
                                 const ComparisonTable& table) {
  auto out = detail::open_output(path);
  out << "method,params,rmse,rel_l2,max_abs,status\n";
  for (const auto& row : table.rows)
    out << row.name << ',' << row.params << ','
        << detail::format_double(row.report.rmse) << ','
        << detail::format_double(row.report.rel_l2) << ','
        << detail::format_double(row.report.max_abs) << ',' << row.status << '\n';
  if (!out) throw io_error("write failed: " + path);
}

// --- covariance table CSV ---

inline void write_covariance_csv(const std::string& path,
                                 const CovarianceTable& table) {
  auto out = detail::open_output(path);
  out << "s,relabel_trace_dev,relabel_count_delta,resampled_trace_dev,"
         "resampled_trace_dev_half,smoothing_dev\n";
  for (const auto& row : table.rows)
    out << detail::format_double(row.s) << ','
        << detail::format_double(row.relabel_trace_dev) << ','
        << row.relabel_count_delta << ','
        << detail::format_double(row.resampled_trace_dev) << ','
        << detail::format_double(row.resampled_trace_dev_half) << ','
        << detail::format_double(row.smoothing_dev) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

// --- key-value run metadata ---

inline void write_key_values(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = detail::open_output(path);
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace spikewave
