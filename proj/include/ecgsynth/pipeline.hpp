#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ecgsynth/config.hpp"
#include "ecgsynth/record.hpp"
#include "ecgsynth/rhythm.hpp"
#include "ecgsynth/signal_core.hpp"

namespace ecgsynth {

/// Intermediate signals, all in millivolts before noise.
struct SynthesisStages {
  MultiLeadRecord projected;  // straight out of the lead matrix
  MultiLeadRecord pre_st;     // same as projected (kept for symmetry with post_st)
  MultiLeadRecord post_st;    // after ST elevation (MI); equals pre_st for Normal
  MultiLeadRecord clean;      // after every MI transform, before artifacts
};

struct SynthesizedRecord {
  MultiLeadRecord record;
  /// Ground-truth R samples before lead shifts, beats whose R centre falls
  /// inside the record.
  std::vector<std::size_t> r_peaks;
  RhythmSeries rhythm;
  std::vector<ScheduledBeat> beats;
  std::optional<SynthesisStages> stages;

  /// Ground truth for one lead after its circular time shift, sorted.
  std::vector<std::size_t> r_peaks_for_lead(Lead l) const;
};

/// RNG sub-stream ids under the record seed.
enum class Stream : std::uint64_t {
  Rhythm = 1, Beats, MiParams, StElevation, Acute, Wander, Mains, Emg, Motion, Fade, Calibration
};

/// Full pipeline for one record: rhythm -> beat params (+ MI alteration) ->
/// beat train -> lead projection -> ST elevation -> acute variability ->
/// wander, mains, EMG, motion -> fade-in -> normalization and calibration.
SynthesizedRecord synthesize_record(const GenerationConfig& cfg, Label label, std::uint64_t seed,
                                    bool keep_stages = false);

/// Record `index` of the dataset described by cfg.
inline SynthesizedRecord synthesize_dataset_record(const GenerationConfig& cfg, std::size_t index,
                                                   bool keep_stages = false) {
  return synthesize_record(cfg, cfg.label_of(index), cfg.record_seed(index), keep_stages);
}

}  // namespace ecgsynth
