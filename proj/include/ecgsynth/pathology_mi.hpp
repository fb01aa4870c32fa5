#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ecgsynth/record.hpp"
#include "ecgsynth/rng.hpp"
#include "ecgsynth/signal_core.hpp"

namespace ecgsynth {

/// Closed interval for uniform draws; lo == hi pins the value.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double draw(SeededRng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  bool operator==(const Range&) const = default;
};

using LeadSet = std::array<bool, kNumLeads>;

/// V1-V6 plus II, III, aVF.
LeadSet default_affected_leads();

struct MiConfig {
  Range q_deepening{1.5, 3.0};
  Range st_elevation_mv{0.1, 0.3};
  Range st_window_s{0.04, 0.12};  // relative to the R peak
  double st_ramp_s = 0.03;        // raised-cosine edge outside the window
  double t_inversion_prob = 0.5;
  Range t_scale{0.5, 1.5};
  Range qrs_broadening{1.2, 1.6};
  double amp_jitter_sd = 0.05;
  double r_distortion_mv = 0.05;
  double lead_time_shift_ms = 10.0;
  LeadSet affected_leads = default_affected_leads();

  /// Every effect disabled.
  static MiConfig identity();
  void validate() const;
  bool operator==(const MiConfig&) const = default;
};

/// Per-record draws that apply_mi_alteration applies to every beat.
struct MiAlteration {
  double q_factor = 1.0;
  double broadening = 1.0;
  bool invert_t = false;
  double t_scale = 1.0;
};

MiAlteration draw_mi_alteration(const MiConfig& cfg, SeededRng& rng);

/// Deterministic part of apply_mi_to_params. Throws InvalidInput if the
/// result breaks beat invariants.
BeatParams apply_mi_alteration(const BeatParams& p, const MiAlteration& alt);

/// Draws an alteration and applies it, redrawing up to 100 times while the
/// result is invalid (DegenerateDistribution afterwards).
BeatParams apply_mi_to_params(const BeatParams& p, const MiConfig& cfg, SeededRng& rng);

/// Plateau shape in [0, 1] at `t_after_r` seconds after an R peak.
double st_envelope(double t_after_r, const MiConfig& cfg);

/// Adds a raised-cosine-edged plateau after every R peak on the affected
/// leads. Height is one draw from cfg.st_elevation_mv per record; windows
/// running past the end are truncated and flagged in provenance.
MultiLeadRecord apply_st_elevation(const MultiLeadRecord& rec, std::span<const std::size_t> r_peaks,
                                   const MiConfig& cfg, SeededRng& rng);

/// Samples corresponding to a shift in milliseconds (rounded).
int shift_samples(double ms, const TimeGrid& grid);

/// out[(i + shift) mod n] = in[i].
std::vector<double> circular_shift(std::span<const double> in, int shift);

struct AcuteVariability {
  MultiLeadRecord record;
  std::vector<double> beat_scales;  // one per R peak, shared by all leads
  std::array<int, kNumLeads> lead_shifts{};
};

/// Per-beat amplitude jitter, zero-mean bumps within +-40 ms of each R
/// peak, then an independent circular time shift per lead.
AcuteVariability apply_acute_variability(const MultiLeadRecord& rec, std::span<const std::size_t> r_peaks,
                                         const MiConfig& cfg, SeededRng& rng);

}  // namespace ecgsynth
