#include "ecgsynth/signal_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecgsynth/error.hpp"

namespace ecgsynth {

TimeGrid::TimeGrid(double sampling_rate, std::size_t n_samples)
    : sampling_rate_(sampling_rate), n_samples_(n_samples) {
  if (!std::isfinite(sampling_rate) || sampling_rate <= 0.0) {
    throw InvalidInput("sampling_rate must be positive and finite");
  }
  if (n_samples == 0) throw InvalidInput("n_samples must be positive");
}

TimeGrid TimeGrid::from_duration(double sampling_rate, double duration) {
  if (!std::isfinite(duration) || duration <= 0.0) throw InvalidInput("duration must be positive");
  const double n = std::round(sampling_rate * duration);
  if (!(n >= 1.0)) throw InvalidInput("grid has no samples");
  return TimeGrid(sampling_rate, static_cast<std::size_t>(n));
}

long TimeGrid::nearest_index(double t) const noexcept {
  return static_cast<long>(std::lround(t * sampling_rate_));
}

std::string_view wave_name(Wave w) noexcept {
  switch (w) {
    case Wave::P: return "P";
    case Wave::Q: return "Q";
    case Wave::R: return "R";
    case Wave::S: return "S";
    case Wave::T: return "T";
  }
  return "?";
}

std::string_view label_name(Label l) noexcept { return l == Label::MI ? "MI" : "Normal"; }

Label parse_label(std::string_view s) {
  if (s == "Normal" || s == "normal" || s == "0") return Label::Normal;
  if (s == "MI" || s == "mi" || s == "1") return Label::MI;
  throw InvalidInput("unknown label '" + std::string(s) + "'");
}

bool BeatParams::valid() const noexcept {
  for (std::size_t i = 0; i < kNumWaves; ++i) {
    const auto& k = kernels[i];
    if (k.wave != kWaves[i]) return false;
    if (!std::isfinite(k.center) || !std::isfinite(k.amplitude) || !std::isfinite(k.width)) return false;
    if (k.width <= 0.0) return false;
    if (i > 0 && !(kernels[i - 1].center < k.center)) return false;
  }
  return true;
}

void ParamDistribution::validate() const {
  for (const auto& w : waves) {
    for (const Moments* m : {&w.center, &w.amplitude, &w.width}) {
      if (!std::isfinite(m->mean) || !std::isfinite(m->sd) || m->sd < 0.0) {
        throw InvalidInput("parameter distribution has negative or non-finite entries");
      }
    }
  }
}

BeatParams ParamDistribution::means() const {
  BeatParams p;
  for (std::size_t i = 0; i < kNumWaves; ++i) {
    p.kernels[i] = {kWaves[i], waves[i].center.mean, waves[i].amplitude.mean, waves[i].width.mean};
  }
  return p;
}

ParamDistribution default_param_distribution(Label label) {
  ParamDistribution d;
  d.label = label;
  // {center}, {amplitude}, {width}; centers are seconds after beat onset.
  if (label == Label::Normal) {
    d[Wave::P] = {{0.10, 0.008}, {0.15, 0.03}, {0.025, 0.003}};
    d[Wave::Q] = {{0.23, 0.004}, {-0.10, 0.02}, {0.010, 0.0015}};
    d[Wave::R] = {{0.25, 0.003}, {1.20, 0.10}, {0.012, 0.0015}};
    d[Wave::S] = {{0.27, 0.004}, {-0.25, 0.04}, {0.012, 0.0015}};
    d[Wave::T] = {{0.45, 0.015}, {0.30, 0.05}, {0.060, 0.006}};
  } else {
    d[Wave::P] = {{0.10, 0.010}, {0.14, 0.04}, {0.025, 0.004}};
    d[Wave::Q] = {{0.23, 0.005}, {-0.12, 0.03}, {0.012, 0.002}};
    d[Wave::R] = {{0.25, 0.004}, {1.00, 0.15}, {0.013, 0.002}};
    d[Wave::S] = {{0.27, 0.005}, {-0.30, 0.06}, {0.013, 0.002}};
    d[Wave::T] = {{0.45, 0.020}, {0.30, 0.07}, {0.065, 0.008}};
  }
  return d;
}

ParamDistribution centered_on(const BeatParams& center, const ParamDistribution& spread, double sd_scale) {
  if (!std::isfinite(sd_scale) || sd_scale < 0.0) throw InvalidInput("centered_on: sd_scale must be >= 0");
  ParamDistribution d = spread;
  for (std::size_t i = 0; i < kNumWaves; ++i) {
    const auto& k = center.kernels[i];
    auto& w = d.waves[i];
    w.center = {k.center, w.center.sd * sd_scale};
    w.amplitude = {k.amplitude, w.amplitude.sd * sd_scale};
    w.width = {k.width, w.width.sd * sd_scale};
  }
  return d;
}

double gaussian_kernel_value(double t, const WaveKernel& k) {
  if (!std::isfinite(t) || !std::isfinite(k.center) || !std::isfinite(k.amplitude) ||
      !std::isfinite(k.width)) {
    throw InvalidInput("gaussian_kernel_value: non-finite input");
  }
  if (k.width <= 0.0) throw InvalidInput("gaussian_kernel_value: width must be positive");
  const double d = t - k.center;
  return k.amplitude * std::exp(-(d * d) / (2.0 * k.width * k.width));
}

BeatParams sample_beat_params(const ParamDistribution& dist, SeededRng& rng) {
  dist.validate();
  for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    BeatParams p;
    for (std::size_t i = 0; i < kNumWaves; ++i) {
      const auto& w = dist.waves[i];
      p.kernels[i].wave = kWaves[i];
      p.kernels[i].center = rng.normal(w.center.mean, w.center.sd);
      p.kernels[i].amplitude = rng.normal(w.amplitude.mean, w.amplitude.sd);
      p.kernels[i].width = rng.normal(w.width.mean, w.width.sd);
    }
    if (p.valid() && p[Wave::R].amplitude > 0.0) return p;
  }
  throw DegenerateDistribution("sample_beat_params: " + std::to_string(kMaxRejectionAttempts) +
                               " consecutive draws violated beat invariants");
}

ComponentTraces::ComponentTraces(std::size_t n) {
  for (auto& t : traces) t.assign(n, 0.0);
}

std::vector<double> ComponentTraces::sum() const {
  std::vector<double> out(n_samples(), 0.0);
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += t[i];
  }
  return out;
}

ComponentTraces& ComponentTraces::operator+=(const ComponentTraces& other) {
  if (other.n_samples() != n_samples()) throw InvalidInput("component trace length mismatch");
  for (std::size_t w = 0; w < kNumWaves; ++w) {
    for (std::size_t i = 0; i < traces[w].size(); ++i) traces[w][i] += other.traces[w][i];
  }
  return *this;
}

namespace {

void check_onset(double onset, const TimeGrid& grid) {
  if (!std::isfinite(onset) || onset < 0.0 || onset >= grid.duration()) {
    throw InvalidInput("beat onset outside grid");
  }
}

// Beyond 12 widths a kernel is below 1e-31 of its amplitude.
constexpr double kKernelSupport = 12.0;

void add_beat(ComponentTraces& out, const BeatParams& params, const TimeGrid& grid, double onset) {
  const double fs = grid.sampling_rate();
  const auto n = static_cast<long>(grid.n_samples());
  for (std::size_t w = 0; w < kNumWaves; ++w) {
    WaveKernel k = params.kernels[w];
    k.center += onset;
    const long lo = std::max(0L, static_cast<long>(std::floor((k.center - kKernelSupport * k.width) * fs)));
    const long hi = std::min(n - 1, static_cast<long>(std::ceil((k.center + kKernelSupport * k.width) * fs)));
    auto& trace = out.traces[w];
    for (long i = lo; i <= hi; ++i) {
      trace[static_cast<std::size_t>(i)] += gaussian_kernel_value(grid.time_at(static_cast<std::size_t>(i)), k);
    }
  }
}

}  // namespace

ComponentTraces synth_beat(const BeatParams& params, const TimeGrid& grid, double beat_onset) {
  check_onset(beat_onset, grid);
  if (!params.valid()) throw InvalidInput("synth_beat: invalid beat parameters");
  ComponentTraces out(grid.n_samples());
  add_beat(out, params, grid, beat_onset);
  return out;
}

ComponentTraces assemble_beat_train(std::span<const ScheduledBeat> beats, const TimeGrid& grid) {
  ComponentTraces out(grid.n_samples());
  for (std::size_t b = 0; b < beats.size(); ++b) {
    check_onset(beats[b].onset, grid);
    if (b > 0 && !(beats[b - 1].onset < beats[b].onset)) {
      throw InvalidInput("assemble_beat_train: onsets must be strictly increasing");
    }
    if (!beats[b].params.valid()) throw InvalidInput("assemble_beat_train: invalid beat parameters");
  }
  for (const auto& b : beats) add_beat(out, b.params, grid, b.onset);
  return out;
}

}  // namespace ecgsynth
