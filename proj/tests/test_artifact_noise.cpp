#include <doctest.h>

#include <cmath>

#include "ecgsynth/artifact_noise.hpp"
#include "ecgsynth/config.hpp"
#include "ecgsynth/error.hpp"
#include "ecgsynth/pipeline.hpp"
#include "ecgsynth/spectral.hpp"
#include "support.hpp"

using namespace ecgsynth;

namespace {

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

NoiseConfig only(auto&& tweak) {
  NoiseConfig c = NoiseConfig::silent();
  tweak(c);
  return c;
}

}  // namespace

TEST_CASE("every stage is the identity at zero amplitude") {
  gen::Source src(1);
  const auto rec = gen::random_record(src);
  const auto silent = NoiseConfig::silent();
  const std::vector<std::size_t> peaks{100, 300, 500, 700};
  SeededRng rng(2);
  CHECK(add_baseline_wander(rec, silent, rng).leads == rec.leads);
  CHECK(add_mains(rec, silent, rng).leads == rec.leads);
  CHECK(add_emg(rec, Label::MI, silent, rng).leads == rec.leads);
  CHECK(add_motion_bursts(rec, peaks, Label::MI, silent, rng).leads == rec.leads);
  CHECK(apply_fade_in(rec, Label::MI, silent, rng).leads == rec.leads);
  CHECK(normalize_and_scale(rec, silent, rng).leads == rec.leads);
}

TEST_CASE("baseline wander: amplitude and spectral peak") {
  const auto cfg = only([](NoiseConfig& c) { c.wander_amp = 0.1; c.wander_freq = 0.2; });
  gen::Source src(3);
  const auto rec = gen::random_record(src);
  SeededRng rng(4);
  const auto out = add_baseline_wander(rec, cfg, rng);
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    const auto d = diff(out.leads[l], rec.leads[l]);
    const auto [mn, mx] = std::minmax_element(d.begin(), d.end());
    // 10 s hold two full periods, so the sampled extremes come within 1%.
    CHECK(*mx - *mn == doctest::Approx(0.2).epsilon(0.01));
    const auto s = periodogram(d, 100.0, Taper::Hann, true);
    CHECK(std::abs(s.peak_frequency() - 0.2) <= 0.02);
  }
}

TEST_CASE("baseline wander: phases differ between leads") {
  const auto cfg = only([](NoiseConfig& c) { c.wander_amp = 0.1; });
  MultiLeadRecord rec(TimeGrid{});
  SeededRng rng(4);
  const auto out = add_baseline_wander(rec, cfg, rng);
  CHECK(out[Lead::I] != out[Lead::II]);
}

TEST_CASE("mains: 60 Hz aliases to 40 Hz; RMS of the difference") {
  const auto cfg = only([](NoiseConfig& c) { c.mains_amp = 0.02; c.mains_freq = 60.0; });
  gen::Source src(5);
  const auto rec = gen::random_record(src);
  SeededRng rng(6);
  const auto out = add_mains(rec, cfg, rng);
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    const auto d = diff(out.leads[l], rec.leads[l]);
    double ss = 0.0;
    for (double v : d) ss += v * v;
    CHECK(std::sqrt(ss / 1000.0) == doctest::Approx(0.02 / std::sqrt(2.0)).epsilon(0.01));
    CHECK(std::abs(periodogram(d, 100.0).peak_frequency() - 40.0) <= 0.5);
  }
  // One phase for all leads: the added signal is identical.
  const auto a = diff(out[Lead::I], rec[Lead::I]), b = diff(out[Lead::V6], rec[Lead::V6]);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-12);
}

TEST_CASE("mains: only 50 or 60 Hz") {
  auto cfg = NoiseConfig{};
  cfg.mains_freq = 55.0;
  MultiLeadRecord rec(TimeGrid{});
  SeededRng rng(0);
  CHECK_THROWS_AS(add_mains(rec, cfg, rng), InvalidInput);
}

TEST_CASE("EMG: sd of the difference and MI/Normal ratio") {
  const auto cfg = only([](NoiseConfig& c) { c.emg_sd = 0.02; });
  const MultiLeadRecord rec(TimeGrid{});
  SeededRng rng(7);
  const auto normal = add_emg(rec, Label::Normal, cfg, rng).flatten();
  const auto mi = add_emg(rec, Label::MI, cfg, rng).flatten();
  const double sn = oracle::sample_sd(normal);
  CHECK(std::abs(sn - 0.02) <= 0.002);
  CHECK(std::abs(oracle::sample_sd(mi) / sn - 1.5) <= 0.1);
  CHECK(std::abs(oracle::sample_mean(normal)) < 0.002);
}

TEST_CASE("EMG: no power outside the band") {
  const auto cfg = only([](NoiseConfig& c) { c.emg_sd = 0.02; });
  const MultiLeadRecord rec(TimeGrid{});
  SeededRng rng(8);
  const auto out = add_emg(rec, Label::Normal, cfg, rng);
  const auto bins = rfft(out[Lead::II]);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double f = static_cast<double>(k) * 0.1;
    if (f < 5.0 || f > 45.0) CHECK(std::abs(bins[k]) < 1e-10);
  }
}

TEST_CASE("motion bursts: Normal untouched, MI bounded near R peaks") {
  const auto cfg = only([](NoiseConfig& c) { c.motion_burst_amp = 0.15; c.motion_burst_prob = 1.0; });
  const MultiLeadRecord rec(TimeGrid{});
  const std::vector<std::size_t> peaks{80, 250, 420, 600, 790, 960};
  SeededRng rng(9);
  CHECK(add_motion_bursts(rec, peaks, Label::Normal, cfg, rng).leads == rec.leads);
  for (std::uint64_t s = 0; s < 50; ++s) {
    SeededRng r(s);
    const auto out = add_motion_bursts(rec, peaks, Label::MI, cfg, r);
    for (const auto& lead : out.leads) {
      for (std::size_t i = 0; i < 1000; ++i) {
        const bool near = std::any_of(peaks.begin(), peaks.end(), [&](std::size_t p) {
          return std::abs(static_cast<long>(i) - static_cast<long>(p)) <= 10;
        });
        if (!near) REQUIRE(lead[i] == 0.0);
        REQUIRE(std::abs(lead[i]) <= 0.15);
      }
      for (std::size_t p : peaks) {
        double m = 0.0;
        for (std::size_t i = p - 10; i <= std::min<std::size_t>(999, p + 10); ++i) m = std::max(m, std::abs(lead[i]));
        REQUIRE(m > 0.0);
      }
    }
  }
  auto never = cfg;
  never.motion_burst_prob = 0.0;
  CHECK(add_motion_bursts(rec, peaks, Label::MI, never, rng).leads == rec.leads);
}

TEST_CASE("fade-in: quadratic for Normal, untouched after the ramp") {
  const auto cfg = only([](NoiseConfig& c) { c.fade_duration = 0.5; });
  MultiLeadRecord rec(TimeGrid{});
  for (auto& l : rec.leads) std::fill(l.begin(), l.end(), 2.0);
  SeededRng rng(0);
  const auto out = apply_fade_in(rec, Label::Normal, cfg, rng);
  CHECK(out[Lead::I][0] == 0.0);
  CHECK(out[Lead::I][25] == doctest::Approx(2.0 * 0.25));
  for (std::size_t i = 50; i < 1000; ++i) REQUIRE(out[Lead::V2][i] == 2.0);
  for (std::size_t i = 1; i < 50; ++i) REQUIRE(out[Lead::V2][i] > out[Lead::V2][i - 1]);
  CHECK(out.provenance.fade_exponent == 2.0);
}

TEST_CASE("fade-in: MI exponents over 10^3 seeds stay in range") {
  const NoiseConfig cfg;
  double lo = 10.0, hi = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    SeededRng rng(s);
    const double p = draw_fade_exponent(Label::MI, cfg, rng);
    REQUIRE((p >= 1.5 && p <= 3.0));
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  CHECK(hi - lo > 1.0);  // actually random
}

TEST_CASE("fade-in: longer than the record is rejected") {
  const auto cfg = only([](NoiseConfig& c) { c.fade_duration = 20.0; });
  MultiLeadRecord rec(TimeGrid{});
  SeededRng rng(0);
  CHECK_THROWS_AS(apply_fade_in(rec, Label::Normal, cfg, rng), InvalidInput);
}

TEST_CASE("normalize: unit range untouched, zero lead flagged") {
  auto cfg = NoiseConfig::silent();
  cfg.normalize = true;
  MultiLeadRecord rec(TimeGrid{100.0, 4});
  for (auto& l : rec.leads) l = {-1.0, 1.0, 0.5, -0.5};
  rec[Lead::aVL] = {0, 0, 0, 0};
  SeededRng rng(0);
  const auto out = normalize_and_scale(rec, cfg, rng);
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(out.leads[l][i] - rec.leads[l][i]) <= 1e-12);
  }
  CHECK(out.provenance.flat_lead[idx(Lead::aVL)]);
  CHECK_FALSE(out.provenance.flat_lead[idx(Lead::I)]);
}

TEST_CASE("normalize: per-lead peak inside the calibration range (10^3 seeds)") {
  const NoiseConfig cfg;
  gen::Source src(10);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    MultiLeadRecord rec(TimeGrid{100.0, 200});
    for (auto& l : rec.leads) {
      const double scale = std::exp(src.range(-5, 5)), offset = src.range(-3, 3);
      for (auto& v : l) v = offset + scale * src.gauss();
    }
    SeededRng rng(s);
    const auto out = normalize_and_scale(rec, cfg, rng);
    for (const auto& l : out.leads) {
      double peak = 0.0;
      for (double v : l) peak = std::max(peak, std::abs(v));
      REQUIRE(peak <= 1.1 + 1e-12);
      REQUIRE(peak >= 0.9 - 1e-12);
    }
  }
}

TEST_CASE("full pipeline: finite and deterministic (10^4 seeds)") {
  GenerationConfig cfg;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto label = seed % 2 ? Label::MI : Label::Normal;
    const auto r = synthesize_record(cfg, label, seed);
    for (const auto& l : r.record.leads) {
      for (double v : l) REQUIRE(std::isfinite(v));
    }
    if (seed % 1000 == 0) CHECK(synthesize_record(cfg, label, seed).record.leads == r.record.leads);
  }
}
