#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ecgsynth/rng.hpp"
#include "ecgsynth/spectral.hpp"

namespace ecgsynth {

struct RhythmConfig {
  double log_mean = -0.15432;  // ln(0.857 s), ~70 bpm
  double log_sd = 0.05;
  double target_lf_hf_ratio = 1.0;
  Band lf_band{0.04, 0.15};
  Band hf_band{0.15, 0.40};
  double min_rr = 0.4;
  double max_rr = 2.0;
  /// Lower bound on the number of drawn intervals. Short records still get a
  /// tachogram long enough to resolve the LF band.
  std::size_t min_intervals = 128;

  void validate() const;
  bool operator==(const RhythmConfig&) const = default;
};

struct RhythmSeries {
  std::vector<double> rr;
  std::vector<double> onsets;  // onsets[k] = rr[0] + ... + rr[k]
  /// Set when the tachogram had no LF/HF content to re-weight.
  bool degenerate_spectrum = false;
  /// Set when shaping ran out of iterations outside the target band.
  bool shaping_incomplete = false;

  static RhythmSeries from_intervals(std::vector<double> rr);
  std::size_t size() const noexcept { return rr.size(); }
  double mean_rr() const;
};

inline constexpr std::size_t kMinSpectralIntervals = 32;
inline constexpr double kTachogramRate = 4.0;

/// Clamped log-normal draws (no spectral shaping).
std::vector<double> draw_rr_intervals(const RhythmConfig& cfg, std::size_t count, SeededRng& rng);

/// Draws enough intervals to cover `duration` (and at least
/// cfg.min_intervals), then applies lf_hf_shape.
RhythmSeries sample_rr_series(const RhythmConfig& cfg, double duration, SeededRng& rng);

/// Linearly interpolated tachogram sampled at `rate` Hz, from the first to
/// the last onset.
std::vector<double> resample_tachogram(const RhythmSeries& rr, double rate = kTachogramRate);

/// LF band power over HF band power of the 4 Hz tachogram periodogram.
double lf_hf_ratio(const RhythmSeries& rr, const RhythmConfig& cfg);

/// Frequency-domain re-weighting of LF and HF bands toward
/// cfg.target_lf_hf_ratio; keeps interval count, clamps and restores the mean.
RhythmSeries lf_hf_shape(const RhythmSeries& rr, const RhythmConfig& cfg);

}  // namespace ecgsynth
