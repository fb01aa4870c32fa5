#pragma once

// Independent reference implementations and generators shared by the tests.
// Deliberately naive: quadratic loops, no sorting tricks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ecgsynth/config.hpp"
#include "ecgsynth/record.hpp"
#include "ecgsynth/signal_core.hpp"

namespace oracle {

// sup |F_x - F_y| evaluated at every observed value.
inline double ks_brute(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> grid = x;
  grid.insert(grid.end(), y.begin(), y.end());
  double best = 0.0;
  for (double t : grid) {
    std::size_t cx = 0, cy = 0;
    for (double v : x) cx += v <= t;
    for (double v : y) cy += v <= t;
    best = std::max(best, std::abs(static_cast<double>(cx) / static_cast<double>(x.size()) -
                                   static_cast<double>(cy) / static_cast<double>(y.size())));
  }
  return best;
}

// Fraction of (positive, negative) pairs ordered correctly, ties count half.
inline double auroc_pairs(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline double gauss_k(const std::vector<double>& a, const std::vector<double>& b, double s) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-d2 / (2.0 * s * s));
}

// Textbook three-term biased estimator.
inline double mmd2_direct(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y,
                          double s) {
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (const auto& a : x) for (const auto& b : x) xx += gauss_k(a, b, s);
  for (const auto& a : y) for (const auto& b : y) yy += gauss_k(a, b, s);
  for (const auto& a : x) for (const auto& b : y) xy += gauss_k(a, b, s);
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  return xx / (n * n) + yy / (m * m) - 2.0 * xy / (n * m);
}

inline double median_pairwise(const std::vector<std::vector<double>>& v) {
  std::vector<double> d;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < v[i].size(); ++k) s += (v[i][k] - v[j][k]) * (v[i][k] - v[j][k]);
      d.push_back(std::sqrt(s));
    }
  }
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  return n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

// Direct O(n^2) DFT power at bin k, density scaled with a Hann window.
inline double dft_power(const std::vector<double>& x, double fs, std::size_t k) {
  const std::size_t n = x.size();
  double re = 0.0, im = 0.0, w2 = 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
    const double ang = -2.0 * M_PI * static_cast<double>(k * i) / static_cast<double>(n);
    re += w * (x[i] - mean) * std::cos(ang);
    im += w * (x[i] - mean) * std::sin(ang);
    w2 += w * w;
  }
  double p = (re * re + im * im) / (fs * w2);
  if (k != 0 && !(n % 2 == 0 && k == n / 2)) p *= 2.0;
  return p;
}

inline double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Upper tail P(X >= k) for X ~ Binomial(n, 1/2).
inline double sign_test_p(int k, int n) {
  double p = 0.0;
  for (int i = k; i <= n; ++i) p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                                             n * std::log(2.0));
  return p;
}

}  // namespace oracle

namespace gen {

// Hand-rolled generators for property tests; std::mt19937_64 so they are
// independent of the library's own stream.
struct Source {
  std::mt19937_64 eng;
  explicit Source(std::uint64_t s) : eng(s) {}
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(eng); }

  // Small values drawn from a coarse lattice so ties are common.
  std::vector<double> tied_sample(int max_n) {
    std::vector<double> v(static_cast<std::size_t>(integer(1, max_n)));
    for (auto& x : v) x = integer(0, 8) * 0.5;
    return v;
  }

  std::vector<double> vec(std::size_t n, double sd = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = sd * gauss();
    return v;
  }
};

inline ecgsynth::MultiLeadRecord random_record(Source& src, const ecgsynth::TimeGrid& g = {100.0, 1000}) {
  ecgsynth::MultiLeadRecord r(g);
  for (auto& lead : r.leads) {
    for (auto& v : lead) v = src.gauss();
  }
  r.seed = src.eng();
  r.label = src.unit() < 0.5 ? ecgsynth::Label::Normal : ecgsynth::Label::MI;
  return r;
}

}  // namespace gen

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("ecgsynth_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};
