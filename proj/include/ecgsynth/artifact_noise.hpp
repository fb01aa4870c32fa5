#pragma once

#include <span>

#include "ecgsynth/pathology_mi.hpp"
#include "ecgsynth/record.hpp"
#include "ecgsynth/rhythm.hpp"
#include "ecgsynth/rng.hpp"

namespace ecgsynth {

struct NoiseConfig {
  double wander_amp = 0.1;   // mV
  double wander_freq = 0.2;  // Hz
  double mains_freq = 50.0;  // 50 or 60 Hz; 50 Hz sits on Nyquist at 100 Hz
  double mains_amp = 0.02;
  double emg_sd = 0.02;
  double emg_mi_multiplier = 1.5;
  Band emg_band{5.0, 45.0};
  double motion_burst_amp = 0.15;  // MI records only
  double motion_burst_prob = 0.1;  // per beat
  double fade_duration = 0.5;      // s
  Range fade_mi_exponent{1.5, 3.0};
  Range calib_scale{0.9, 1.1};
  bool normalize = true;

  static constexpr double kNormalFadeExponent = 2.0;

  /// Every additive stage off, ramp and scaling disabled.
  static NoiseConfig silent();
  void validate() const;
  bool operator==(const NoiseConfig&) const = default;
};

/// wander_amp * sin(2 pi f t + phi), phi drawn per lead.
MultiLeadRecord add_baseline_wander(const MultiLeadRecord& rec, const NoiseConfig& cfg, SeededRng& rng);

/// Powerline sinusoid with one random phase shared by all leads. Above
/// Nyquist it aliases (60 Hz -> 40 Hz at 100 Hz sampling).
MultiLeadRecord add_mains(const MultiLeadRecord& rec, const NoiseConfig& cfg, SeededRng& rng);

/// Gaussian noise band-limited to cfg.emg_band, with expected sd emg_sd
/// (times emg_mi_multiplier for MI).
MultiLeadRecord add_emg(const MultiLeadRecord& rec, Label label, const NoiseConfig& cfg, SeededRng& rng);

/// MI only: damped oscillations of at most motion_burst_amp within
/// +-100 ms of R peaks, each beat hit with motion_burst_prob.
MultiLeadRecord add_motion_bursts(const MultiLeadRecord& rec, std::span<const std::size_t> r_peaks, Label label,
                                  const NoiseConfig& cfg, SeededRng& rng);

/// Ramp exponent: fixed for Normal, drawn from fade_mi_exponent for MI.
double draw_fade_exponent(Label label, const NoiseConfig& cfg, SeededRng& rng);

/// Multiplies samples with t < fade_duration by (t / fade_duration)^p.
MultiLeadRecord apply_fade_in(const MultiLeadRecord& rec, Label label, const NoiseConfig& cfg, SeededRng& rng);

/// Per lead: optional zero-mean / unit-max normalization, then one
/// calibration gain from calib_scale. All-zero leads are left zero and
/// flagged in provenance.
MultiLeadRecord normalize_and_scale(const MultiLeadRecord& rec, const NoiseConfig& cfg, SeededRng& rng);

}  // namespace ecgsynth
