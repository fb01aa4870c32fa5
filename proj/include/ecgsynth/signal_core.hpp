#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ecgsynth/rng.hpp"

namespace ecgsynth {

/// Uniform sampling grid. n_samples = round(sampling_rate * duration).
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double sampling_rate, std::size_t n_samples);
  static TimeGrid from_duration(double sampling_rate, double duration);

  double sampling_rate() const noexcept { return sampling_rate_; }
  std::size_t n_samples() const noexcept { return n_samples_; }
  double duration() const noexcept { return static_cast<double>(n_samples_) / sampling_rate_; }
  double dt() const noexcept { return 1.0 / sampling_rate_; }
  double time_at(std::size_t i) const noexcept { return static_cast<double>(i) / sampling_rate_; }
  /// Nearest sample index to time t (may be out of range).
  long nearest_index(double t) const noexcept;

  bool operator==(const TimeGrid&) const = default;

 private:
  double sampling_rate_ = 100.0;
  std::size_t n_samples_ = 1000;
};

enum class Wave : std::size_t { P = 0, Q = 1, R = 2, S = 3, T = 4 };
inline constexpr std::size_t kNumWaves = 5;
inline constexpr std::array<Wave, kNumWaves> kWaves = {Wave::P, Wave::Q, Wave::R, Wave::S, Wave::T};
std::string_view wave_name(Wave w) noexcept;

/// One Gaussian deflection: center (s, relative to beat onset), signed
/// amplitude (mV) and width (s).
struct WaveKernel {
  Wave wave = Wave::P;
  double center = 0.0;
  double amplitude = 0.0;
  double width = 0.01;

  bool operator==(const WaveKernel&) const = default;
};

/// Five kernels, indexed by Wave.
struct BeatParams {
  std::array<WaveKernel, kNumWaves> kernels{};

  WaveKernel& operator[](Wave w) noexcept { return kernels[static_cast<std::size_t>(w)]; }
  const WaveKernel& operator[](Wave w) const noexcept { return kernels[static_cast<std::size_t>(w)]; }

  /// Widths positive, all finite, centers strictly increasing P<Q<R<S<T.
  bool valid() const noexcept;

  bool operator==(const BeatParams&) const = default;
};

enum class Label : std::uint8_t { Normal = 0, MI = 1 };
std::string_view label_name(Label l) noexcept;
Label parse_label(std::string_view s);

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  bool operator==(const Moments&) const = default;
};

/// Per-wave normal distributions for center, amplitude and width.
struct WaveDistribution {
  Moments center;
  Moments amplitude;
  Moments width;
  bool operator==(const WaveDistribution&) const = default;
};

struct ParamDistribution {
  Label label = Label::Normal;
  std::array<WaveDistribution, kNumWaves> waves{};

  const WaveDistribution& operator[](Wave w) const noexcept { return waves[static_cast<std::size_t>(w)]; }
  WaveDistribution& operator[](Wave w) noexcept { return waves[static_cast<std::size_t>(w)]; }

  /// Throws InvalidInput on negative or non-finite entries.
  void validate() const;
  BeatParams means() const;

  bool operator==(const ParamDistribution&) const = default;
};

/// Distribution centred on `center` with every sd of `spread` scaled by
/// `sd_scale`. Used for beat-to-beat variation around a record template.
ParamDistribution centered_on(const BeatParams& center, const ParamDistribution& spread, double sd_scale);

/// Shipped physiological defaults. These are implementation defaults, not
/// fitted to any dataset.
ParamDistribution default_param_distribution(Label label);

inline constexpr int kMaxRejectionAttempts = 100;

/// a * exp(-(t - center)^2 / (2 width^2)).
double gaussian_kernel_value(double t, const WaveKernel& k);

/// Draws every field from its normal; redraws the whole beat until valid.
/// Throws DegenerateDistribution after kMaxRejectionAttempts failures.
BeatParams sample_beat_params(const ParamDistribution& dist, SeededRng& rng);

/// Five component traces (P,Q,R,S,T), each n_samples long.
struct ComponentTraces {
  std::array<std::vector<double>, kNumWaves> traces;

  explicit ComponentTraces(std::size_t n = 0);
  std::size_t n_samples() const noexcept { return traces[0].size(); }
  std::vector<double>& operator[](Wave w) noexcept { return traces[static_cast<std::size_t>(w)]; }
  const std::vector<double>& operator[](Wave w) const noexcept { return traces[static_cast<std::size_t>(w)]; }
  /// Scalar source: sum over the five components.
  std::vector<double> sum() const;
  ComponentTraces& operator+=(const ComponentTraces& other);
};

/// Samples one beat's kernels, shifted by `beat_onset`, on `grid`.
ComponentTraces synth_beat(const BeatParams& params, const TimeGrid& grid, double beat_onset);

struct ScheduledBeat {
  double onset = 0.0;
  BeatParams params;
};

/// Linear superposition of beats. Onsets must be strictly increasing and
/// lie in [0, duration).
ComponentTraces assemble_beat_train(std::span<const ScheduledBeat> beats, const TimeGrid& grid);

}  // namespace ecgsynth
