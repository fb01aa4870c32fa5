#include "ecgsynth/pathology_mi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ecgsynth/error.hpp"

namespace ecgsynth {
namespace {

constexpr double kBumpHalfWindowS = 0.040;
constexpr double kBumpWidthS = 0.012;
constexpr double kTimeTol = 1e-9;

void check_peaks(std::span<const std::size_t> r_peaks, std::size_t n) {
  for (std::size_t p : r_peaks) {
    if (p >= n) throw InvalidInput("R peak index outside record");
  }
}

void check_range(const Range& r, const char* what, bool positive) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi || (positive && r.lo <= 0.0) ||
      (!positive && r.lo < 0.0)) {
    throw InvalidInput(std::string("MI config: bad range for ") + what);
  }
}

}  // namespace

LeadSet default_affected_leads() {
  LeadSet s{};
  for (Lead l : {Lead::II, Lead::III, Lead::aVF, Lead::V1, Lead::V2, Lead::V3, Lead::V4, Lead::V5, Lead::V6}) {
    s[idx(l)] = true;
  }
  return s;
}

MiConfig MiConfig::identity() {
  MiConfig c;
  c.q_deepening = {1.0, 1.0};
  c.st_elevation_mv = {0.0, 0.0};
  c.t_inversion_prob = 0.0;
  c.t_scale = {1.0, 1.0};
  c.qrs_broadening = {1.0, 1.0};
  c.amp_jitter_sd = 0.0;
  c.r_distortion_mv = 0.0;
  c.lead_time_shift_ms = 0.0;
  return c;
}

void MiConfig::validate() const {
  check_range(q_deepening, "q_deepening", true);
  check_range(st_elevation_mv, "st_elevation_mv", false);
  check_range(st_window_s, "st_window_s", false);
  check_range(t_scale, "t_scale", true);
  check_range(qrs_broadening, "qrs_broadening", true);
  if (!(st_window_s.hi > st_window_s.lo)) throw InvalidInput("MI config: empty ST window");
  if (!(st_ramp_s > 0.0) || st_ramp_s > st_window_s.lo) {
    throw InvalidInput("MI config: ST ramp must be positive and end before the R peak");
  }
  if (!(t_inversion_prob >= 0.0 && t_inversion_prob <= 1.0)) throw InvalidInput("MI config: probability outside [0,1]");
  for (double v : {amp_jitter_sd, r_distortion_mv, lead_time_shift_ms}) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("MI config: negative variability parameter");
  }
}

MiAlteration draw_mi_alteration(const MiConfig& cfg, SeededRng& rng) {
  cfg.validate();
  MiAlteration a;
  a.q_factor = cfg.q_deepening.draw(rng);
  a.broadening = cfg.qrs_broadening.draw(rng);
  a.invert_t = cfg.t_inversion_prob > 0.0 && rng.bernoulli(cfg.t_inversion_prob);
  a.t_scale = cfg.t_scale.draw(rng);
  return a;
}

BeatParams apply_mi_alteration(const BeatParams& p, const MiAlteration& alt) {
  if (!p.valid()) throw InvalidInput("apply_mi_alteration: invalid input beat");
  BeatParams out = p;
  out[Wave::Q].amplitude *= alt.q_factor;
  for (Wave w : {Wave::Q, Wave::R, Wave::S}) out[w].width *= alt.broadening;
  if (alt.invert_t) out[Wave::T].amplitude = -out[Wave::T].amplitude;
  out[Wave::T].amplitude *= alt.t_scale;
  if (!out.valid()) throw InvalidInput("apply_mi_alteration: result violates beat invariants");
  return out;
}

BeatParams apply_mi_to_params(const BeatParams& p, const MiConfig& cfg, SeededRng& rng) {
  if (!p.valid()) throw InvalidInput("apply_mi_to_params: invalid input beat");
  for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    const auto alt = draw_mi_alteration(cfg, rng);
    try {
      return apply_mi_alteration(p, alt);
    } catch (const InvalidInput&) {
    }
  }
  throw DegenerateDistribution("apply_mi_to_params: no valid alteration after 100 draws");
}

double st_envelope(double t, const MiConfig& cfg) {
  const double w0 = cfg.st_window_s.lo;
  const double w1 = cfg.st_window_s.hi;
  const double ramp = cfg.st_ramp_s;
  if (t >= w0 - kTimeTol && t <= w1 + kTimeTol) return 1.0;
  if (t > w0 - ramp && t < w0) return 0.5 * (1.0 - std::cos(std::numbers::pi * (t - (w0 - ramp)) / ramp));
  if (t > w1 && t < w1 + ramp) return 0.5 * (1.0 + std::cos(std::numbers::pi * (t - w1) / ramp));
  return 0.0;
}

MultiLeadRecord apply_st_elevation(const MultiLeadRecord& rec, std::span<const std::size_t> r_peaks,
                                   const MiConfig& cfg, SeededRng& rng) {
  cfg.validate();
  const std::size_t n = rec.n_samples();
  check_peaks(r_peaks, n);
  MultiLeadRecord out = rec;
  const double height = cfg.st_elevation_mv.draw(rng);
  out.provenance.st_elevation_mv = height;
  if (height == 0.0 || r_peaks.empty()) return out;

  const double fs = rec.grid.sampling_rate();
  std::vector<double> env(n, 0.0);
  const auto reach = static_cast<std::size_t>(std::ceil((cfg.st_window_s.hi + cfg.st_ramp_s) * fs));
  for (std::size_t r : r_peaks) {
    if (static_cast<double>(r) + cfg.st_window_s.hi * fs > static_cast<double>(n - 1) + kTimeTol) {
      out.provenance.st_window_truncated = true;
    }
    for (std::size_t i = r; i <= std::min(n - 1, r + reach); ++i) {
      env[i] = std::max(env[i], st_envelope(static_cast<double>(i - r) / fs, cfg));
    }
  }
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    if (!cfg.affected_leads[l]) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (env[i] > 0.0) out.leads[l][i] += height * env[i];
    }
  }
  return out;
}

int shift_samples(double ms, const TimeGrid& grid) {
  return static_cast<int>(std::lround(ms * grid.sampling_rate() / 1000.0));
}

std::vector<double> circular_shift(std::span<const double> in, int shift) {
  const auto n = static_cast<long>(in.size());
  std::vector<double> out(in.size());
  if (n == 0) return out;
  const long s = ((shift % n) + n) % n;
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>((i + s) % n)] = in[static_cast<std::size_t>(i)];
  return out;
}

AcuteVariability apply_acute_variability(const MultiLeadRecord& rec, std::span<const std::size_t> r_peaks,
                                         const MiConfig& cfg, SeededRng& rng) {
  cfg.validate();
  rec.validate();
  const std::size_t n = rec.n_samples();
  check_peaks(r_peaks, n);
  const double fs = rec.grid.sampling_rate();
  AcuteVariability res{rec, {}, {}};
  auto& out = res.record;

  // Beat windows split at midpoints between consecutive R peaks.
  res.beat_scales.resize(r_peaks.size(), 1.0);
  if (cfg.amp_jitter_sd > 0.0) {
    for (auto& s : res.beat_scales) s = rng.normal(1.0, cfg.amp_jitter_sd);
    for (std::size_t b = 0; b < r_peaks.size(); ++b) {
      const std::size_t begin = b == 0 ? 0 : (r_peaks[b - 1] + r_peaks[b] + 1) / 2;
      const std::size_t end = b + 1 == r_peaks.size() ? n : (r_peaks[b] + r_peaks[b + 1] + 1) / 2;
      for (auto& lead : out.leads) {
        for (std::size_t i = begin; i < end; ++i) lead[i] *= res.beat_scales[b];
      }
    }
  }

  if (cfg.r_distortion_mv > 0.0) {
    const auto half = static_cast<long>(std::floor(kBumpHalfWindowS * fs + kTimeTol));
    for (auto& lead : out.leads) {
      for (std::size_t r : r_peaks) {
        const double amp = rng.uniform(-cfg.r_distortion_mv, cfg.r_distortion_mv);
        const double center = rng.uniform(-0.5, 0.5) * kBumpHalfWindowS;
        for (long k = -half; k <= half; ++k) {
          const long i = static_cast<long>(r) + k;
          if (i < 0 || i >= static_cast<long>(n)) continue;
          const double d = static_cast<double>(k) / fs - center;
          lead[static_cast<std::size_t>(i)] += amp * std::exp(-(d * d) / (2.0 * kBumpWidthS * kBumpWidthS));
        }
      }
    }
  }

  if (cfg.lead_time_shift_ms > 0.0) {
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      const int s = shift_samples(rng.uniform(-cfg.lead_time_shift_ms, cfg.lead_time_shift_ms), rec.grid);
      res.lead_shifts[l] = s;
      if (s != 0) out.leads[l] = circular_shift(out.leads[l], s);
    }
  }
  out.provenance.lead_shift_samples = res.lead_shifts;
  return res;
}

}  // namespace ecgsynth
