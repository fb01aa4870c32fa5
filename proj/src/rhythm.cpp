#include "ecgsynth/rhythm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecgsynth/error.hpp"
#include "ecgsynth/spectral.hpp"

namespace ecgsynth {
namespace {

constexpr int kShapeIterations = 12;

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void rebuild_onsets(RhythmSeries& s) {
  s.onsets.resize(s.rr.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < s.rr.size(); ++k) {
    acc += s.rr[k];
    s.onsets[k] = acc;
  }
}

struct BandPowers {
  double lf = 0.0;
  double hf = 0.0;
};

BandPowers band_powers(const RhythmSeries& rr, const RhythmConfig& cfg) {
  if (rr.size() < kMinSpectralIntervals) {
    throw InsufficientData("LF/HF analysis needs at least 32 intervals");
  }
  const auto tach = resample_tachogram(rr);
  const auto [lo, hi] = std::minmax_element(tach.begin(), tach.end());
  // A constant rhythm leaves only rounding residue after detrending.
  if (*hi - *lo <= 1e-12 * std::abs(*hi)) return {};
  const auto psd = periodogram(tach, kTachogramRate, Taper::Hann, true);
  return {psd.band_power(cfg.lf_band.lo, cfg.lf_band.hi), psd.band_power(cfg.hf_band.lo, cfg.hf_band.hi)};
}

bool within_target(double ratio, double target) { return ratio >= 0.5 * target && ratio <= 2.0 * target; }

// Linear interpolation of (xs, ys) at x; xs strictly increasing, x clamped to range.
double interp(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double f = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + f * (ys[hi] - ys[lo]);
}

void clamp_and_restore_mean(std::vector<double>& rr, double target_mean, double lo, double hi) {
  for (int pass = 0; pass < 8; ++pass) {
    for (double& v : rr) v = std::clamp(v, lo, hi);
    const double shift = target_mean - mean_of(rr);
    if (std::abs(shift) < 1e-12) break;
    for (double& v : rr) v += shift;
  }
  for (double& v : rr) v = std::clamp(v, lo, hi);
}

}  // namespace

void RhythmConfig::validate() const {
  if (!std::isfinite(log_mean) || !std::isfinite(log_sd) || log_sd < 0.0) {
    throw InvalidInput("rhythm: log_sd must be finite and non-negative");
  }
  if (!(min_rr > 0.0) || !(min_rr < max_rr)) throw InvalidInput("rhythm: need 0 < min_rr < max_rr");
  if (!(lf_band.lo > 0.0) || !(lf_band.lo < lf_band.hi) || !(hf_band.lo < hf_band.hi) ||
      lf_band.hi > hf_band.lo) {
    throw InvalidInput("rhythm: LF/HF bands must be positive, ordered and non-overlapping");
  }
  if (!(target_lf_hf_ratio > 0.0)) throw InvalidInput("rhythm: target LF/HF ratio must be positive");
}

RhythmSeries RhythmSeries::from_intervals(std::vector<double> rr) {
  for (double v : rr) {
    if (!std::isfinite(v) || v <= 0.0) throw InvalidInput("RR intervals must be positive and finite");
  }
  RhythmSeries s;
  s.rr = std::move(rr);
  rebuild_onsets(s);
  return s;
}

double RhythmSeries::mean_rr() const {
  if (rr.empty()) throw InsufficientData("empty RR series");
  return mean_of(rr);
}

std::vector<double> draw_rr_intervals(const RhythmConfig& cfg, std::size_t count, SeededRng& rng) {
  cfg.validate();
  std::vector<double> rr(count);
  for (double& v : rr) v = std::clamp(std::exp(rng.normal(cfg.log_mean, cfg.log_sd)), cfg.min_rr, cfg.max_rr);
  return rr;
}

RhythmSeries sample_rr_series(const RhythmConfig& cfg, double duration, SeededRng& rng) {
  cfg.validate();
  if (!std::isfinite(duration) || duration <= 0.0) throw InvalidInput("rhythm: duration must be positive");
  std::vector<double> rr;
  double total = 0.0;
  while (total < duration || rr.size() < cfg.min_intervals) {
    const double v = draw_rr_intervals(cfg, 1, rng).front();
    rr.push_back(v);
    total += v;
  }
  auto series = RhythmSeries::from_intervals(std::move(rr));
  if (series.size() >= kMinSpectralIntervals) series = lf_hf_shape(series, cfg);
  // Shaping may trim total length slightly; top up unshaped draws.
  while (series.onsets.back() < duration) {
    series.rr.push_back(draw_rr_intervals(cfg, 1, rng).front());
    series.onsets.push_back(series.onsets.back() + series.rr.back());
  }
  return series;
}

std::vector<double> resample_tachogram(const RhythmSeries& rr, double rate) {
  if (rr.size() < 2) throw InsufficientData("tachogram needs at least two intervals");
  const double t0 = rr.onsets.front();
  const double t1 = rr.onsets.back();
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * rate)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = interp(rr.onsets, rr.rr, t0 + static_cast<double>(i) / rate);
  return out;
}

double lf_hf_ratio(const RhythmSeries& rr, const RhythmConfig& cfg) {
  const auto p = band_powers(rr, cfg);
  if (!(p.hf > 0.0)) throw DegenerateComputation("LF/HF ratio: no HF power");
  return p.lf / p.hf;
}

RhythmSeries lf_hf_shape(const RhythmSeries& input, const RhythmConfig& cfg) {
  cfg.validate();
  auto p = band_powers(input, cfg);
  RhythmSeries best = input;
  const double target = cfg.target_lf_hf_ratio;
  if (!(p.lf > 0.0) || !(p.hf > 0.0)) {
    best.degenerate_spectrum = true;
    return best;
  }
  if (within_target(p.lf / p.hf, target)) return best;

  const double mean = input.mean_rr();
  double best_err = std::abs(std::log(p.lf / p.hf / target));
  RhythmSeries cur = input;
  for (int it = 0; it < kShapeIterations; ++it) {
    auto tach = resample_tachogram(cur);
    const double tmean = mean_of(tach);
    for (double& v : tach) v -= tmean;
    auto bins = rfft(tach);
    const double df = kTachogramRate / static_cast<double>(tach.size());
    double lf = 0.0, hf = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double f = static_cast<double>(k) * df;
      if (f >= cfg.lf_band.lo && f < cfg.lf_band.hi) lf += std::norm(bins[k]);
      if (f >= cfg.hf_band.lo && f < cfg.hf_band.hi) hf += std::norm(bins[k]);
    }
    if (!(lf > 0.0) || !(hf > 0.0)) break;
    // Keep LF + HF power fixed while moving their ratio to the target.
    const double total = lf + hf;
    const double g_lf = std::sqrt(total * target / (1.0 + target) / lf);
    const double g_hf = std::sqrt(total / (1.0 + target) / hf);
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double f = static_cast<double>(k) * df;
      if (f >= cfg.lf_band.lo && f < cfg.lf_band.hi) bins[k] *= g_lf;
      if (f >= cfg.hf_band.lo && f < cfg.hf_band.hi) bins[k] *= g_hf;
    }
    const auto shaped = irfft(bins, tach.size());
    std::vector<double> grid_t(shaped.size());
    for (std::size_t i = 0; i < grid_t.size(); ++i) grid_t[i] = cur.onsets.front() + static_cast<double>(i) / kTachogramRate;

    std::vector<double> rr(cur.size());
    for (std::size_t k = 0; k < rr.size(); ++k) rr[k] = tmean + interp(grid_t, shaped, cur.onsets[k]);
    clamp_and_restore_mean(rr, mean, cfg.min_rr, cfg.max_rr);
    cur = RhythmSeries::from_intervals(std::move(rr));

    p = band_powers(cur, cfg);
    if (!(p.hf > 0.0) || !(p.lf > 0.0)) break;
    const double ratio = p.lf / p.hf;
    const double err = std::abs(std::log(ratio / target));
    if (err < best_err) {
      best = cur;
      best_err = err;
    }
    if (within_target(ratio, target)) return best;
  }
  best.shaping_incomplete = true;
  return best;
}

}  // namespace ecgsynth
