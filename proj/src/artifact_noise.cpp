#include "ecgsynth/artifact_noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "ecgsynth/error.hpp"
#include "ecgsynth/spectral.hpp"

namespace ecgsynth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBurstHalfWindowS = 0.100;
constexpr double kBurstDecayS = 0.030;

}  // namespace

NoiseConfig NoiseConfig::silent() {
  NoiseConfig c;
  c.wander_amp = 0.0;
  c.mains_amp = 0.0;
  c.emg_sd = 0.0;
  c.motion_burst_amp = 0.0;
  c.motion_burst_prob = 0.0;
  c.fade_duration = 0.0;
  c.calib_scale = {1.0, 1.0};
  c.normalize = false;
  return c;
}

void NoiseConfig::validate() const {
  for (double v : {wander_amp, wander_freq, mains_amp, emg_sd, emg_mi_multiplier, motion_burst_amp, fade_duration}) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("noise config: amplitudes and durations must be >= 0");
  }
  if (mains_freq != 50.0 && mains_freq != 60.0) throw InvalidInput("noise config: mains_freq must be 50 or 60");
  if (!(motion_burst_prob >= 0.0 && motion_burst_prob <= 1.0)) {
    throw InvalidInput("noise config: motion_burst_prob outside [0,1]");
  }
  if (!(emg_band.lo >= 0.0 && emg_band.lo < emg_band.hi)) throw InvalidInput("noise config: bad EMG band");
  if (!(fade_mi_exponent.lo > 0.0 && fade_mi_exponent.lo <= fade_mi_exponent.hi)) {
    throw InvalidInput("noise config: bad fade exponent range");
  }
  if (!(calib_scale.lo > 0.0 && calib_scale.lo <= calib_scale.hi)) throw InvalidInput("noise config: bad calibration range");
}

MultiLeadRecord add_baseline_wander(const MultiLeadRecord& rec, const NoiseConfig& cfg, SeededRng& rng) {
  cfg.validate();
  MultiLeadRecord out = rec;
  if (cfg.wander_amp == 0.0) return out;
  for (auto& lead : out.leads) {
    const double phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = 0; i < lead.size(); ++i) {
      lead[i] += cfg.wander_amp * std::sin(kTwoPi * cfg.wander_freq * rec.grid.time_at(i) + phase);
    }
  }
  return out;
}

MultiLeadRecord add_mains(const MultiLeadRecord& rec, const NoiseConfig& cfg, SeededRng& rng) {
  cfg.validate();
  MultiLeadRecord out = rec;
  if (cfg.mains_amp == 0.0) return out;
  const double phase = rng.uniform(0.0, kTwoPi);
  for (auto& lead : out.leads) {
    for (std::size_t i = 0; i < lead.size(); ++i) {
      lead[i] += cfg.mains_amp * std::sin(kTwoPi * cfg.mains_freq * rec.grid.time_at(i) + phase);
    }
  }
  return out;
}

MultiLeadRecord add_emg(const MultiLeadRecord& rec, Label label, const NoiseConfig& cfg, SeededRng& rng) {
  cfg.validate();
  MultiLeadRecord out = rec;
  const double sd = cfg.emg_sd * (label == Label::MI ? cfg.emg_mi_multiplier : 1.0);
  if (sd == 0.0) return out;
  const std::size_t n = rec.n_samples();
  const double df = rec.grid.sampling_rate() / static_cast<double>(n);

  // Fraction of white-noise variance surviving the ideal band-pass; real
  // spectra count interior bins twice.
  std::vector<bool> keep(n / 2 + 1);
  double kept = 0.0;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const double f = static_cast<double>(k) * df;
    keep[k] = f >= cfg.emg_band.lo && f <= cfg.emg_band.hi;
    if (keep[k]) kept += (k == 0 || (n % 2 == 0 && k == n / 2)) ? 1.0 : 2.0;
  }
  const double fraction = kept / static_cast<double>(n);
  if (fraction == 0.0) return out;
  const double gain = sd / std::sqrt(fraction);

  std::vector<double> white(n);
  for (auto& lead : out.leads) {
    for (double& v : white) v = rng.normal();
    auto bins = rfft(white);
    for (std::size_t k = 0; k < bins.size(); ++k) {
      if (!keep[k]) bins[k] = 0.0;
    }
    const auto band = irfft(bins, n);
    for (std::size_t i = 0; i < n; ++i) lead[i] += gain * band[i];
  }
  return out;
}

MultiLeadRecord add_motion_bursts(const MultiLeadRecord& rec, std::span<const std::size_t> r_peaks, Label label,
                                  const NoiseConfig& cfg, SeededRng& rng) {
  cfg.validate();
  MultiLeadRecord out = rec;
  if (label != Label::MI || cfg.motion_burst_amp == 0.0 || cfg.motion_burst_prob == 0.0) return out;
  const std::size_t n = rec.n_samples();
  const double fs = rec.grid.sampling_rate();
  const auto half = static_cast<long>(std::floor(kBurstHalfWindowS * fs + 1e-9));
  for (std::size_t r : r_peaks) {
    if (r >= n) throw InvalidInput("motion bursts: R peak index outside record");
    if (!rng.bernoulli(cfg.motion_burst_prob)) continue;
    const double offset = rng.uniform(-0.5, 0.5) * kBurstHalfWindowS;
    for (auto& lead : out.leads) {
      const double amp = cfg.motion_burst_amp * rng.uniform(0.5, 1.0);
      const double freq = rng.uniform(4.0, 12.0);
      const double phase = rng.uniform(0.0, kTwoPi);
      for (long k = -half; k <= half; ++k) {
        const long i = static_cast<long>(r) + k;
        if (i < 0 || i >= static_cast<long>(n)) continue;
        const double t = static_cast<double>(k) / fs - offset;
        lead[static_cast<std::size_t>(i)] += amp * std::exp(-std::abs(t) / kBurstDecayS) * std::sin(kTwoPi * freq * t + phase);
      }
    }
  }
  return out;
}

double draw_fade_exponent(Label label, const NoiseConfig& cfg, SeededRng& rng) {
  if (label == Label::MI) return cfg.fade_mi_exponent.draw(rng);
  return NoiseConfig::kNormalFadeExponent;
}

MultiLeadRecord apply_fade_in(const MultiLeadRecord& rec, Label label, const NoiseConfig& cfg, SeededRng& rng) {
  cfg.validate();
  MultiLeadRecord out = rec;
  const double p = draw_fade_exponent(label, cfg, rng);
  out.provenance.fade_exponent = p;
  if (cfg.fade_duration == 0.0) return out;
  if (cfg.fade_duration >= rec.grid.duration()) throw InvalidInput("fade_duration must be shorter than the record");
  for (std::size_t i = 0; i < rec.n_samples(); ++i) {
    const double t = rec.grid.time_at(i);
    if (t >= cfg.fade_duration) break;
    const double g = std::pow(t / cfg.fade_duration, p);
    for (auto& lead : out.leads) lead[i] *= g;
  }
  return out;
}

MultiLeadRecord normalize_and_scale(const MultiLeadRecord& rec, const NoiseConfig& cfg, SeededRng& rng) {
  cfg.validate();
  MultiLeadRecord out = rec;
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    auto& lead = out.leads[l];
    const double gain = cfg.calib_scale.draw(rng);
    if (cfg.normalize && !lead.empty()) {
      double mean = 0.0;
      for (double v : lead) mean += v;
      mean /= static_cast<double>(lead.size());
      double peak = 0.0;
      for (double& v : lead) {
        v -= mean;
        peak = std::max(peak, std::abs(v));
      }
      if (peak == 0.0) {
        out.provenance.flat_lead[l] = true;
        continue;
      }
      for (double& v : lead) v /= peak;
    }
    if (gain != 1.0) {
      for (double& v : lead) v *= gain;
    }
  }
  return out;
}

}  // namespace ecgsynth
