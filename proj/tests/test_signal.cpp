#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "spikewave/signal.hpp"

using namespace spikewave;

TEST_CASE("generate samples a unit sine at angular frequency 1") {
  // f(t) = sin(t): amplitude 1, frequency 1/(2*pi) Hz.
  SignalSpec spec = SignalSpec::sine(1.0, 1.0 / (2.0 * std::numbers::pi), 0.0,
                                     1.0, 0.01);
  const SampledSignal sig = generate(spec);
  REQUIRE(sig.size() == 100);
  for (std::size_t i = 0; i < sig.size(); ++i)
    REQUIRE(sig.samples[i] ==
            Catch::Approx(std::sin(0.01 * static_cast<double>(i))).margin(1e-12));
}

TEST_CASE("generate of an empty custom sum is the zero signal") {
  SignalSpec spec;
  spec.kind = SignalKind::custom_sum;
  spec.duration = 0.5;
  spec.dt = 0.01;
  const SampledSignal sig = generate(spec);
  REQUIRE(sig.size() == 50);
  for (double v : sig.samples) REQUIRE(v == 0.0);
}

TEST_CASE("composite experiment signal starts at zero") {
  SignalSpec spec;
  spec.kind = SignalKind::composite_sine;
  spec.components = {{1.0, 0.5, 0.0}, {0.5, 2.0, 0.0}, {0.3, 8.0, 0.0}};
  spec.duration = 2.0;
  spec.dt = 1e-3;
  const SampledSignal sig = generate(spec);
  REQUIRE(sig.samples[0] == 0.0);
}

TEST_CASE("generate is pure") {
  SignalSpec spec;
  spec.kind = SignalKind::composite_sine;
  spec.components = {{1.0, 0.5, 0.3}, {0.5, 2.0, -1.1}};
  spec.duration = 1.0;
  spec.dt = 1e-3;
  const SampledSignal a = generate(spec);
  const SampledSignal b = generate(spec);
  REQUIRE(a.samples == b.samples);
}

TEST_CASE("spec validation names the violated field") {
  SignalSpec spec = SignalSpec::sine(1.0, 10.0, 0.0, 1.0, 0.05);
  // dt = 0.05 >= period/8 = 0.0125
  REQUIRE_THROWS_MATCHES(generate(spec), validation_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("dt")));
  spec.dt = -1.0;
  REQUIRE_THROWS_AS(generate(spec), validation_error);
  spec.dt = 1e-3;
  spec.duration = 0.0;
  REQUIRE_THROWS_MATCHES(generate(spec), validation_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("duration")));
  spec.duration = 1.0;
  spec.components.clear();
  REQUIRE_THROWS_MATCHES(generate(spec), validation_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("components")));
}

TEST_CASE("rescale_time relabels the grid") {
  SignalSpec spec = SignalSpec::sine(1.0, 1.0, 0.0, 1.0, 0.01);
  const SampledSignal sig = generate(spec);

  SECTION("identity at s = 1") {
    const SampledSignal same = rescale_time(sig, 1.0);
    REQUIRE(same.dt == sig.dt);
    REQUIRE(same.t0 == sig.t0);
    REQUIRE(same.samples == sig.samples);
  }
  SECTION("s = 2 doubles dt and keeps samples") {
    const SampledSignal wide = rescale_time(sig, 2.0);
    REQUIRE(wide.dt == 0.02);
    REQUIRE(wide.samples == sig.samples);
  }
  SECTION("rejects non-positive factors") {
    REQUIRE_THROWS_AS(rescale_time(sig, 0.0), validation_error);
    REQUIRE_THROWS_AS(rescale_time(sig, -2.0), validation_error);
  }
}

TEST_CASE("rescale round trip is exact for power-of-two factors") {
  SignalSpec spec = SignalSpec::sine(0.7, 1.3, 0.4, 1.0, 0.001);
  const SampledSignal sig = generate(spec);
  for (double s : {0.25, 0.5, 2.0, 4.0}) {
    const SampledSignal back = rescale_time(rescale_time(sig, s), 1.0 / s);
    REQUIRE(back.dt == sig.dt);
    REQUIRE(back.t0 == sig.t0);
    REQUIRE(back.samples == sig.samples);
  }
}

TEST_CASE("rescale round trip stays within rounding for arbitrary factors") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.25, 4.0);
  SignalSpec spec = SignalSpec::sine(1.0, 2.0, 0.0, 0.5, 0.001);
  const SampledSignal sig = generate(spec);
  for (int trial = 0; trial < 50; ++trial) {
    const double s = dist(rng);
    const SampledSignal back = rescale_time(rescale_time(sig, s), 1.0 / s);
    REQUIRE(back.dt == Catch::Approx(sig.dt).epsilon(1e-14));
    REQUIRE(back.samples == sig.samples);
  }
}
