#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "spikewave/io.hpp"

using namespace spikewave;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "spikewave_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("signal csv round trip is lossless") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  SampledSignal sig;
  sig.dt = 1.0 / 3.0;  // not exactly representable
  sig.t0 = -2.5;
  sig.samples.resize(200);
  for (auto& v : sig.samples) v = dist(rng) * std::pow(10.0, dist(rng));

  const auto path = temp_file("roundtrip.csv");
  write_signal_csv(path.string(), sig);
  const SampledSignal back = read_signal_csv(path.string());
  REQUIRE(back.samples == sig.samples);
  REQUIRE(back.t0 == sig.t0);
  REQUIRE(back.dt == Catch::Approx(sig.dt).epsilon(1e-14));
}

TEST_CASE("signal csv layout is stable") {
  SampledSignal sig;
  sig.dt = 0.5;
  sig.samples = {1.0, -0.25};
  const auto path = temp_file("layout.csv");
  write_signal_csv(path.string(), sig);
  REQUIRE(slurp(path) == "t,value\n0,1\n0.5,-0.25\n");
}

TEST_CASE("reading rejects missing files, bad headers and ragged grids") {
  REQUIRE_THROWS_AS(read_signal_csv("/nonexistent/file.csv"), io_error);

  const auto bad_header = temp_file("bad_header.csv");
  std::ofstream(bad_header) << "time,val\n0,1\n1,2\n";
  REQUIRE_THROWS_AS(read_signal_csv(bad_header.string()), io_error);

  const auto ragged = temp_file("ragged.csv");
  std::ofstream(ragged) << "t,value\n0,1\n0.1,2\n0.35,3\n";
  REQUIRE_THROWS_AS(read_signal_csv(ragged.string()), io_error);

  const auto garbage = temp_file("garbage.csv");
  std::ofstream(garbage) << "t,value\n0,one\n0.1,2\n";
  REQUIRE_THROWS_AS(read_signal_csv(garbage.string()), io_error);
}

TEST_CASE("spike csv orders events by time with polarity column") {
  TwoChannelEncoding enc;
  enc.mus = {0.25};
  enc.t0 = 0.0;
  enc.dt = 0.01;
  enc.duration = 1.0;
  enc.positive.resize(1);
  enc.negative.resize(1);
  enc.positive[0].times = {0.25, 0.75};
  enc.negative[0].times = {0.5};

  const auto path = temp_file("spikes.csv");
  write_spikes_csv(path.string(), enc);
  REQUIRE(slurp(path) ==
          "time,scale_index,polarity\n0.25,0,1\n0.5,0,-1\n0.75,0,1\n");

  const auto events = read_spikes_csv(path.string());
  REQUIRE(events.size() == 3);
  REQUIRE(events[1].polarity == -1);
  REQUIRE(events[2].time == 0.75);
}

TEST_CASE("coefficient csv carries bin centers and scale labels") {
  CoefficientGrid grid;
  grid.bin_width = 0.5;
  grid.t0 = 0.0;
  grid.scale_mus = {0.25};
  grid.bins = 2;
  grid.values = {2.0, -4.0};
  const auto path = temp_file("coeffs.csv");
  write_coefficients_csv(path.string(), grid);
  REQUIRE(slurp(path) == "t_bin,k,mu,w\n0.25,0,0.25,2\n0.75,0,0.25,-4\n");
}

TEST_CASE("cwt grid csv lists scale rows with real and imaginary parts") {
  CwtGrid grid;
  grid.scales = {0.5, 1.0};
  grid.dt = 0.25;
  grid.b0 = 0.0;
  grid.shifts = 2;
  grid.coefficients = {{1.0, -2.0}, {0.0, 0.5}, {3.0, 0.0}, {-1.0, 4.0}};
  const auto path = temp_file("cwt.csv");
  write_cwt_csv(path.string(), grid);
  REQUIRE(slurp(path) ==
          "a,b,re,im\n0.5,0,1,-2\n0.5,0.25,0,0.5\n1,0,3,0\n1,0.25,-1,4\n");
}

TEST_CASE("key-value files are plain lines") {
  const auto path = temp_file("meta.txt");
  write_key_values(path.string(), {{"alpha", "1"}, {"beta", "two"}});
  REQUIRE(slurp(path) == "alpha = 1\nbeta = two\n");
}
