#include <doctest.h>

#include <cmath>

#include "ecgsynth/error.hpp"
#include "ecgsynth/rhythm.hpp"
#include "ecgsynth/spectral.hpp"
#include "support.hpp"

using namespace ecgsynth;

namespace {

// Intervals whose 4 Hz tachogram is a sum of sinusoids around `base`.
RhythmSeries modulated(double base, std::initializer_list<std::pair<double, double>> tones, std::size_t count = 300) {
  std::vector<double> rr;
  double t = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double v = base;
    for (auto [f, a] : tones) v += a * std::sin(2.0 * M_PI * f * t);
    rr.push_back(v);
    t += v;
  }
  return RhythmSeries::from_intervals(rr);
}

}  // namespace

TEST_CASE("onsets are cumulative sums") {
  const auto s = RhythmSeries::from_intervals({0.8, 0.9, 1.0});
  CHECK(s.onsets == std::vector<double>{0.8, 0.8 + 0.9, 0.8 + 0.9 + 1.0});
  CHECK(s.mean_rr() == doctest::Approx(0.9));
  CHECK_THROWS_AS(RhythmSeries::from_intervals({0.8, -0.1}), InvalidInput);
}

TEST_CASE("sample_rr_series: zero log-sd gives a constant 70 bpm rhythm") {
  RhythmConfig cfg;
  cfg.log_mean = std::log(0.857);
  cfg.log_sd = 0.0;
  SeededRng rng(1);
  const auto s = sample_rr_series(cfg, 10.0, rng);
  for (double v : s.rr) CHECK(v == doctest::Approx(0.857).epsilon(1e-12));
  CHECK(s.degenerate_spectrum);
}

TEST_CASE("sample_rr_series: deterministic under a fixed seed") {
  RhythmConfig cfg;
  SeededRng a(77), b(77);
  const auto x = sample_rr_series(cfg, 10.0, a);
  const auto y = sample_rr_series(cfg, 10.0, b);
  CHECK(x.rr == y.rr);
  CHECK(x.onsets == y.onsets);
}

TEST_CASE("sample_rr_series: median of 10^4 intervals matches the log-normal median") {
  RhythmConfig cfg;
  cfg.log_mean = std::log(0.8);
  cfg.log_sd = 0.1;
  cfg.min_intervals = 10000;
  SeededRng rng(31);
  const auto s = sample_rr_series(cfg, 10.0, rng);
  REQUIRE(s.size() >= 10000);
  CHECK(std::abs(oracle::median(s.rr) - 0.8) < 0.01);
}

TEST_CASE("sample_rr_series: clamped, covering, increasing (10^4 seeds)") {
  RhythmConfig cfg;
  cfg.log_sd = 0.6;  // wide enough that clamping is exercised
  cfg.min_intervals = 32;
  bool hit_lo = false, hit_hi = false;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    SeededRng rng(seed);
    const auto s = sample_rr_series(cfg, 10.0, rng);
    for (double v : s.rr) {
      REQUIRE(v >= cfg.min_rr);
      REQUIRE(v <= cfg.max_rr);
      hit_lo |= v == cfg.min_rr;
      hit_hi |= v == cfg.max_rr;
    }
    REQUIRE(s.onsets.back() >= 10.0 - cfg.max_rr);
    for (std::size_t k = 1; k < s.size(); ++k) REQUIRE(s.onsets[k] > s.onsets[k - 1]);
  }
  CHECK(hit_lo);
  CHECK(hit_hi);
}

TEST_CASE("sample_rr_series: bad config and duration") {
  RhythmConfig cfg;
  SeededRng rng(0);
  cfg.log_sd = -0.1;
  CHECK_THROWS_AS(sample_rr_series(cfg, 10.0, rng), InvalidInput);
  cfg = {};
  cfg.min_rr = 2.0;
  cfg.max_rr = 1.0;
  CHECK_THROWS_AS(sample_rr_series(cfg, 10.0, rng), InvalidInput);
  CHECK_THROWS_AS(sample_rr_series(RhythmConfig{}, 0.0, rng), InvalidInput);
}

TEST_CASE("resample_tachogram: 4 Hz linear interpolation") {
  const auto s = RhythmSeries::from_intervals({1.0, 2.0, 1.0});
  const auto t = resample_tachogram(s);
  // onsets 1, 3, 4 with values 1, 2, 1
  REQUIRE(t.size() == 13);
  CHECK(t[0] == 1.0);
  CHECK(t[4] == doctest::Approx(1.5));
  CHECK(t[8] == doctest::Approx(2.0));
  CHECK(t[10] == doctest::Approx(1.5));
  CHECK(t[12] == doctest::Approx(1.0));
}

TEST_CASE("lf_hf_ratio: single-band and balanced modulation") {
  const RhythmConfig cfg;
  CHECK(lf_hf_ratio(modulated(0.8, {{0.1, 0.03}}), cfg) > 20.0);
  CHECK(lf_hf_ratio(modulated(0.8, {{0.3, 0.03}}), cfg) < 0.05);
  const auto both = modulated(0.8, {{0.1, 0.03}, {0.3, 0.03}});
  CHECK(lf_hf_ratio(both, cfg) == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("lf_hf_ratio: balanced case against a direct-DFT oracle") {
  const RhythmConfig cfg;
  const auto s = modulated(0.8, {{0.1, 0.03}, {0.3, 0.03}});
  const auto tach = resample_tachogram(s);
  const double df = kTachogramRate / static_cast<double>(tach.size());
  double lf = 0.0, hf = 0.0;
  for (std::size_t k = 0; k <= tach.size() / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f >= 0.04 && f < 0.15) lf += oracle::dft_power(tach, kTachogramRate, k);
    if (f >= 0.15 && f < 0.40) hf += oracle::dft_power(tach, kTachogramRate, k);
  }
  CHECK(lf_hf_ratio(s, cfg) == doctest::Approx(lf / hf).epsilon(1e-9));
}

TEST_CASE("lf_hf_ratio: errors") {
  const RhythmConfig cfg;
  CHECK_THROWS_AS(lf_hf_ratio(RhythmSeries::from_intervals(std::vector<double>(31, 0.8)), cfg), InsufficientData);
  CHECK_THROWS_AS(lf_hf_ratio(RhythmSeries::from_intervals(std::vector<double>(100, 0.8)), cfg),
                  DegenerateComputation);
}

TEST_CASE("lf_hf_shape: series already in band is returned untouched") {
  const RhythmConfig cfg;
  const auto s = modulated(0.8, {{0.1, 0.03}, {0.3, 0.03}});
  const auto out = lf_hf_shape(s, cfg);
  CHECK(out.rr == s.rr);
  CHECK(std::abs(out.mean_rr() - s.mean_rr()) <= 1e-9);
  CHECK_FALSE(out.shaping_incomplete);
}

TEST_CASE("lf_hf_shape: constant series is flagged and unchanged") {
  const auto s = RhythmSeries::from_intervals(std::vector<double>(64, 0.9));
  const auto out = lf_hf_shape(s, RhythmConfig{});
  CHECK(out.degenerate_spectrum);
  CHECK(out.rr == s.rr);
}

TEST_CASE("lf_hf_shape: too short") {
  CHECK_THROWS_AS(lf_hf_shape(RhythmSeries::from_intervals(std::vector<double>(20, 0.9)), RhythmConfig{}),
                  InsufficientData);
}

TEST_CASE("lf_hf_shape: white tachograms land in [0.5, 2] of the target, mean kept") {
  RhythmConfig cfg;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SeededRng rng(seed);
    const auto s = RhythmSeries::from_intervals(draw_rr_intervals(cfg, 200, rng));
    const auto out = lf_hf_shape(s, cfg);
    REQUIRE(out.size() == s.size());
    CHECK(std::abs(out.mean_rr() / s.mean_rr() - 1.0) < 0.01);
    for (double v : out.rr) REQUIRE((v >= cfg.min_rr && v <= cfg.max_rr));
    if (!out.shaping_incomplete) {
      const double r = lf_hf_ratio(out, cfg);
      CHECK((r >= 0.5 && r <= 2.0));
      ++checked;
    }
  }
  CHECK(checked >= 195);
}

TEST_CASE("lf_hf_shape: moves a pure-HF rhythm toward a higher target") {
  RhythmConfig cfg;
  cfg.target_lf_hf_ratio = 2.0;
  SeededRng rng(4);
  std::vector<double> base;
  double t = 0.0;
  for (int k = 0; k < 300; ++k) {
    base.push_back(0.857 + 0.04 * std::sin(2.0 * M_PI * 0.3 * t) + rng.normal(0.0, 0.005));
    t += base.back();
  }
  const auto s = RhythmSeries::from_intervals(base);
  REQUIRE(lf_hf_ratio(s, cfg) < 1.0);
  const auto out = lf_hf_shape(s, cfg);
  const double r = lf_hf_ratio(out, cfg);
  CHECK((r >= 1.0 && r <= 4.0));
}
