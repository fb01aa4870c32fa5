#include "ecgsynth/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <cmath>
#include <mutex>
#include <numbers>

#include "ecgsynth/error.hpp"

namespace ecgsynth {
namespace {

// FFTW's planner is not thread-safe; executing a finished plan on new
// arrays is. Plans are cached per length and never destroyed.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan cached_plan(std::size_t n, bool forward) {
  static std::map<std::pair<std::size_t, bool>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({n, forward});
  if (it != cache.end()) return it->second;
  std::vector<double> real(n);
  std::vector<std::complex<double>> cplx(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan p = forward
                    ? fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(),
                                           reinterpret_cast<fftw_complex*>(cplx.data()), flags)
                    : fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(cplx.data()),
                                           real.data(), flags);
  if (!p) throw Error("FFTW planning failed");
  cache.emplace(std::make_pair(n, forward), p);
  return p;
}

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidInput("rfft: empty input");
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_execute_dft_r2c(cached_plan(n, true), in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n) {
  if (n == 0 || bins.size() != n / 2 + 1) throw InvalidInput("irfft: bin count does not match length");
  // c2r destroys its input.
  std::vector<std::complex<double>> in(bins.begin(), bins.end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(cached_plan(n, false), reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

double Spectrum::band_power(double lo, double hi) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < freq.size(); ++k) {
    if (freq[k] >= lo && freq[k] < hi) acc += power[k] * df;
  }
  return acc;
}

std::size_t Spectrum::peak_index() const {
  if (power.empty()) throw InvalidInput("empty spectrum");
  return static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
}

Spectrum periodogram(std::span<const double> x, double fs, Taper taper, bool detrend) {
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientData("periodogram needs at least two samples");
  if (!(fs > 0.0)) throw InvalidInput("periodogram: sampling rate must be positive");
  std::vector<double> seg(x.begin(), x.end());
  if (detrend) {
    double mean = 0.0;
    for (double v : seg) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : seg) v -= mean;
  }
  std::vector<double> w = taper == Taper::Hann ? hann_window(n) : std::vector<double>(n, 1.0);
  double wss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    seg[i] *= w[i];
    wss += w[i] * w[i];
  }
  const auto bins = rfft(seg);
  Spectrum s;
  s.df = fs / static_cast<double>(n);
  s.freq.resize(bins.size());
  s.power.resize(bins.size());
  const double scale = 1.0 / (fs * wss);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    s.freq[k] = static_cast<double>(k) * s.df;
    double p = std::norm(bins[k]) * scale;
    const bool nyquist = (n % 2 == 0) && k == n / 2;
    if (k != 0 && !nyquist) p *= 2.0;
    s.power[k] = p;
  }
  return s;
}

}  // namespace ecgsynth
