#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ecgsynth {

/// Frequency interval in Hz, [lo, hi).
struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Band&) const = default;
};

/// Real-to-complex DFT; returns n/2 + 1 bins, unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> x);

/// Inverse of rfft, normalized so irfft(rfft(x), n) == x.
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// One-sided power spectral density (units^2 / Hz).
struct Spectrum {
  std::vector<double> freq;
  std::vector<double> power;
  double df = 0.0;

  /// Sum of power * df over bins with lo <= f < hi.
  double band_power(double lo, double hi) const;
  /// Bin with maximum power (first on ties).
  std::size_t peak_index() const;
  double peak_frequency() const { return freq.at(peak_index()); }
};

enum class Taper { Rectangular, Hann };

/// Single-segment periodogram with density scaling. If `detrend` the
/// segment mean is removed before tapering.
Spectrum periodogram(std::span<const double> x, double fs, Taper taper = Taper::Hann, bool detrend = true);

}  // namespace ecgsynth
