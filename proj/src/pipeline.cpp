#include "ecgsynth/pipeline.hpp"

#include <algorithm>

#include "ecgsynth/artifact_noise.hpp"
#include "ecgsynth/leads.hpp"
#include "ecgsynth/pathology_mi.hpp"

namespace ecgsynth {

std::vector<std::size_t> SynthesizedRecord::r_peaks_for_lead(Lead l) const {
  const long n = static_cast<long>(record.n_samples());
  const long s = record.provenance.lead_shift_samples[idx(l)];
  std::vector<std::size_t> out;
  out.reserve(r_peaks.size());
  for (std::size_t r : r_peaks) out.push_back(static_cast<std::size_t>(((static_cast<long>(r) + s) % n + n) % n));
  std::sort(out.begin(), out.end());
  return out;
}

SynthesizedRecord synthesize_record(const GenerationConfig& cfg, Label label, std::uint64_t seed, bool keep_stages) {
  cfg.validate();
  const SeededRng root(seed);
  auto stream = [&](Stream s) { return root.child(static_cast<std::uint64_t>(s)); };
  const TimeGrid& grid = cfg.grid;

  SynthesizedRecord out;
  auto rhythm_rng = stream(Stream::Rhythm);
  out.rhythm = sample_rr_series(cfg.rhythm, grid.duration(), rhythm_rng);

  auto beat_rng = stream(Stream::Beats);
  auto mi_rng = stream(Stream::MiParams);
  MiAlteration alteration;
  const bool mi = label == Label::MI;
  if (mi) alteration = draw_mi_alteration(cfg.mi, mi_rng);
  const auto& class_dist = cfg.params_for(label);
  const auto beat_dist = centered_on(sample_beat_params(class_dist, beat_rng), class_dist, cfg.beat_sd_scale);
  for (double onset : out.rhythm.onsets) {
    if (onset >= grid.duration()) break;
    BeatParams p = sample_beat_params(beat_dist, beat_rng);
    if (mi) {
      // Broadening only scales widths, so a valid beat stays valid.
      p = apply_mi_alteration(p, alteration);
    }
    out.beats.push_back({onset, p});
    const long r = grid.nearest_index(onset + p[Wave::R].center);
    if (r >= 0 && r < static_cast<long>(grid.n_samples())) out.r_peaks.push_back(static_cast<std::size_t>(r));
  }

  const auto components = assemble_beat_train(out.beats, grid);
  MultiLeadRecord rec = project_to_leads(components, cfg.matrix(), grid);
  rec.label = label;
  rec.seed = seed;
  rec.source = Source::Synthetic;
  rec.provenance.config_digest = cfg.digest();
  rec.provenance.t_inverted = mi && alteration.invert_t;

  SynthesisStages stages;
  if (keep_stages) {
    stages.projected = rec;
    stages.pre_st = rec;
  }
  if (mi) {
    auto st_rng = stream(Stream::StElevation);
    rec = apply_st_elevation(rec, out.r_peaks, cfg.mi, st_rng);
    if (keep_stages) stages.post_st = rec;
    auto acute_rng = stream(Stream::Acute);
    rec = apply_acute_variability(rec, out.r_peaks, cfg.mi, acute_rng).record;
  } else if (keep_stages) {
    stages.post_st = rec;
  }
  if (keep_stages) stages.clean = rec;

  auto wander_rng = stream(Stream::Wander);
  auto mains_rng = stream(Stream::Mains);
  auto emg_rng = stream(Stream::Emg);
  auto motion_rng = stream(Stream::Motion);
  auto fade_rng = stream(Stream::Fade);
  auto calib_rng = stream(Stream::Calibration);
  rec = add_baseline_wander(rec, cfg.noise, wander_rng);
  rec = add_mains(rec, cfg.noise, mains_rng);
  rec = add_emg(rec, label, cfg.noise, emg_rng);
  rec = add_motion_bursts(rec, out.r_peaks, label, cfg.noise, motion_rng);
  rec = apply_fade_in(rec, label, cfg.noise, fade_rng);
  rec = normalize_and_scale(rec, cfg.noise, calib_rng);

  out.record = std::move(rec);
  if (keep_stages) out.stages = std::move(stages);
  return out;
}

}  // namespace ecgsynth
