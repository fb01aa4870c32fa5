#include "ecgsynth/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "ecgsynth/error.hpp"

namespace ecgsynth {
namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidInput("vectors differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw InsufficientData("median of empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double kernel_mean(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b, double two_s2) {
  std::vector<double> k;
  k.reserve(a.size() * b.size());
  for (const auto& u : a) {
    for (const auto& v : b) k.push_back(std::exp(-squared_distance(u, v) / two_s2));
  }
  return sorted_mean(std::move(k));
}

std::vector<double> moving_median(std::span<const double> x, std::size_t half) {
  std::vector<double> out(x.size());
  std::vector<double> buf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(x.size() - 1, i + half);
    buf.assign(x.begin() + static_cast<long>(lo), x.begin() + static_cast<long>(hi) + 1);
    const std::size_t mid = buf.size() / 2;
    std::nth_element(buf.begin(), buf.begin() + static_cast<long>(mid), buf.end());
    out[i] = buf[mid];
  }
  return out;
}

double mean_sd(std::span<const double> v, double* sd) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  if (sd) *sd = std::sqrt(ss / static_cast<double>(v.size()));
  return m;
}

// Mean over samples r + [w.lo, w.hi] seconds; nullopt if outside the record.
std::optional<double> window_mean(std::span<const double> x, long r, const Range& w, double fs) {
  const long a = r + static_cast<long>(std::lround(w.lo * fs));
  const long b = r + static_cast<long>(std::lround(w.hi * fs));
  if (a < 0 || b >= static_cast<long>(x.size()) || b < a) return std::nullopt;
  double acc = 0.0;
  for (long i = a; i <= b; ++i) acc += x[static_cast<std::size_t>(i)];
  return acc / static_cast<double>(b - a + 1);
}

double fwhm(std::span<const double> x, std::size_t p, double iso, double fs, double max_half_s) {
  const double v = x[p] - iso;
  if (v == 0.0) return 0.0;
  const double sgn = v > 0 ? 1.0 : -1.0;
  const double half = std::abs(v) / 2.0;
  const auto limit = static_cast<long>(std::lround(max_half_s * fs));
  auto level = [&](long i) { return sgn * (x[static_cast<std::size_t>(i)] - iso); };
  const long n = static_cast<long>(x.size());
  const long pi = static_cast<long>(p);

  double left = static_cast<double>(std::max(0L, pi - limit));
  for (long i = pi; i > std::max(0L, pi - limit); --i) {
    if (level(i - 1) <= half) {
      const double f = (level(i) - half) / (level(i) - level(i - 1));
      left = static_cast<double>(i) - f;
      break;
    }
  }
  double right = static_cast<double>(std::min(n - 1, pi + limit));
  for (long i = pi; i < std::min(n - 1, pi + limit); ++i) {
    if (level(i + 1) <= half) {
      const double f = (level(i) - half) / (level(i) - level(i + 1));
      right = static_cast<double>(i) + f;
      break;
    }
  }
  return (right - left) / fs;
}

std::vector<double> pooled_lead(const Cohort& c, std::size_t lead) {
  std::vector<double> out;
  out.reserve(c.records.size() * c.grid().n_samples());
  for (const auto& r : c.records) out.insert(out.end(), r.leads[lead].begin(), r.leads[lead].end());
  return out;
}

std::vector<double> pooled_flat(std::span<const MultiLeadRecord> recs) {
  std::vector<double> out;
  for (const auto& r : recs) {
    for (const auto& l : r.leads) out.insert(out.end(), l.begin(), l.end());
  }
  return out;
}

std::optional<double> intra_ks(const Cohort& c, SeededRng& rng) {
  if (c.records.size() < 2) return std::nullopt;
  std::vector<std::size_t> order(c.records.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  const std::size_t half = order.size() / 2;
  std::vector<MultiLeadRecord> a, b;
  for (std::size_t i = 0; i < order.size(); ++i) (i < half ? a : b).push_back(c.records[order[i]]);
  return ks_distance(pooled_flat(a), pooled_flat(b));
}

std::array<LeadSummary, kNumLeads> summarize(const Cohort& c, const std::vector<RecordFeatures>& feats) {
  std::array<LeadSummary, kNumLeads> s{};
  const double n = static_cast<double>(c.records.size());
  for (std::size_t r = 0; r < c.records.size(); ++r) {
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      s[l].mean += feats[r].leads[l].mean / n;
      s[l].sd += feats[r].leads[l].sd / n;
      s[l].peak_to_peak += feats[r].leads[l].peak_to_peak / n;
      s[l].clinical_band_power += clinical_band_power(psd_welch(c.records[r].leads[l], c.records[r].grid)) / n;
    }
  }
  return s;
}

}  // namespace

double median_bandwidth(std::span<const std::vector<double>> vectors) {
  if (vectors.size() < 2) throw InsufficientData("median_bandwidth needs at least two vectors");
  std::vector<double> d;
  d.reserve(vectors.size() * (vectors.size() - 1) / 2);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) d.push_back(std::sqrt(squared_distance(vectors[i], vectors[j])));
  }
  const double m = median_of(std::move(d));
  if (!(m > 0.0)) throw DegenerateComputation("median_bandwidth: median pairwise distance is zero");
  return m;
}

double mmd2(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw InvalidInput("mmd2: bandwidth must be positive");
  if (x.empty() || y.empty()) throw InvalidInput("mmd2: both samples must be non-empty");
  const double two_s2 = 2.0 * bandwidth * bandwidth;
  const double kxx = kernel_mean(x, x, two_s2);
  const double kyy = kernel_mean(y, y, two_s2);
  // Cross term summed in sorted order; identical for (x, y) and (y, x).
  const double kxy = kernel_mean(x, y, two_s2);
  return (kxx + kyy) - 2.0 * kxy;
}

double ks_distance_sorted(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw InvalidInput("ks_distance: both samples must be non-empty");
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_distance(std::span<const double> x, std::span<const double> y) {
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  for (const auto* v : {&a, &b}) {
    if (std::any_of(v->begin(), v->end(), [](double t) { return std::isnan(t); })) {
      throw InvalidInput("ks_distance: NaN in sample");
    }
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return ks_distance_sorted(a, b);
}

std::vector<std::size_t> detect_r_peaks(std::span<const double> lead, const TimeGrid& grid,
                                        const PeakDetectorOptions& opts) {
  const long n = static_cast<long>(lead.size());
  if (n < 5) return {};
  const double fs = grid.sampling_rate();
  const auto base = moving_median(lead, static_cast<std::size_t>(std::lround(opts.baseline_window_s * fs / 2.0)));
  std::vector<double> y(lead.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = lead[i] - base[i];

  auto at = [&](long i) { return y[static_cast<std::size_t>(std::clamp(i, 0L, n - 1))]; };
  std::vector<double> energy(y.size());
  for (long i = 0; i < n; ++i) {
    const double d = (2.0 * at(i + 1) + at(i + 2) - at(i - 2) - 2.0 * at(i - 1)) * fs / 8.0;
    energy[static_cast<std::size_t>(i)] = d * d;
  }
  const long ihalf = std::max(0L, std::lround(opts.integration_window_s * fs / 2.0));
  std::vector<double> env(y.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = std::max(0L, i - ihalf); k <= std::min(n - 1, i + ihalf); ++k) acc += energy[static_cast<std::size_t>(k)];
    env[static_cast<std::size_t>(i)] = acc / static_cast<double>(2 * ihalf + 1);
  }

  const long max_half = std::lround(opts.max_window_s * fs / 2.0);
  std::vector<long> cand;
  for (long i = 1; i + 1 < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (!(env[u] > 0.0 && env[u] > env[u - 1] && env[u] >= env[u + 1])) continue;
    const auto lo = env.begin() + std::max(0L, i - max_half);
    const auto hi = env.begin() + std::min(n - 1, i + max_half) + 1;
    if (env[u] > opts.threshold_fraction * *std::max_element(lo, hi)) cand.push_back(i);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](long a, long b) {
    return env[static_cast<std::size_t>(a)] > env[static_cast<std::size_t>(b)];
  });

  const long gap = static_cast<long>(std::ceil(opts.refractory_s * fs - 1e-9));
  const long refine = std::lround(opts.refine_window_s * fs);
  std::vector<long> kept;
  for (long c : cand) {
    long p = c;
    for (long i = std::max(1L, c - refine); i <= std::min(n - 2, c + refine); ++i) {
      if (y[static_cast<std::size_t>(i)] > y[static_cast<std::size_t>(p)]) p = i;
    }
    if (p <= 0 || p >= n - 1) continue;  // interior maxima only
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](long k) { return std::abs(p - k) < gap; });
    if (clear) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return {kept.begin(), kept.end()};
}

RecordFeatures basic_features(const MultiLeadRecord& rec, const FeatureOptions& opts) {
  rec.validate();
  RecordFeatures out;
  const double fs = rec.grid.sampling_rate();
  out.r_peaks = detect_r_peaks(rec[opts.reference_lead], rec.grid, opts.detector);
  const auto refine = static_cast<long>(std::lround(opts.peak_refine_s * fs));
  const long n = static_cast<long>(rec.n_samples());

  for (std::size_t l = 0; l < kNumLeads; ++l) {
    const auto& x = rec.leads[l];
    auto& f = out.leads[l];
    f.mean = mean_sd(x, &f.sd);
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    f.peak_to_peak = *mx - *mn;

    double st_acc = 0.0, w_acc = 0.0, t_acc = 0.0;
    std::size_t st_n = 0, t_n = 0;
    for (std::size_t r : out.r_peaks) {
      const auto iso = window_mean(x, static_cast<long>(r), opts.iso_window_s, fs);
      if (!iso) continue;
      // Lead-specific peak: largest deflection from the PR level near r.
      long p = static_cast<long>(r);
      for (long i = std::max(0L, p - refine); i <= std::min(n - 1, static_cast<long>(r) + refine); ++i) {
        if (std::abs(x[static_cast<std::size_t>(i)] - *iso) > std::abs(x[static_cast<std::size_t>(p)] - *iso)) p = i;
      }
      f.r_amplitudes.push_back(x[static_cast<std::size_t>(p)] - *iso);
      w_acc += fwhm(x, static_cast<std::size_t>(p), *iso, fs, 0.1);
      if (const auto st = window_mean(x, static_cast<long>(r), opts.st_window_s, fs)) {
        st_acc += *st - *iso;
        ++st_n;
      }
      const long a = static_cast<long>(r) + std::lround(opts.t_window_s.lo * fs);
      const long b = static_cast<long>(r) + std::lround(opts.t_window_s.hi * fs);
      if (b < n) {
        double best = 0.0;
        for (long i = a; i <= b; ++i) {
          const double v = x[static_cast<std::size_t>(i)] - *iso;
          if (std::abs(v) > std::abs(best)) best = v;
        }
        t_acc += best;
        ++t_n;
      }
    }
    if (!f.r_amplitudes.empty()) {
      f.r_amplitude_mean = std::accumulate(f.r_amplitudes.begin(), f.r_amplitudes.end(), 0.0) /
                           static_cast<double>(f.r_amplitudes.size());
      f.qrs_width_s = w_acc / static_cast<double>(f.r_amplitudes.size());
    }
    if (st_n) f.st_level = st_acc / static_cast<double>(st_n);
    if (t_n) f.t_amplitude = t_acc / static_cast<double>(t_n);
  }
  return out;
}

Spectrum psd_welch(std::span<const double> lead, const TimeGrid& grid, std::size_t segment_len, double overlap) {
  if (segment_len < 2 || segment_len > lead.size()) throw InvalidInput("psd_welch: segment length must be in [2, n_samples]");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw InvalidInput("psd_welch: overlap must be in [0, 1)");
  const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(segment_len) * (1.0 - overlap))));
  Spectrum avg;
  std::size_t count = 0;
  for (std::size_t start = 0; start + segment_len <= lead.size(); start += step) {
    auto s = periodogram(lead.subspan(start, segment_len), grid.sampling_rate(), Taper::Hann, true);
    if (count == 0) {
      avg = std::move(s);
    } else {
      for (std::size_t k = 0; k < avg.power.size(); ++k) avg.power[k] += s.power[k];
    }
    ++count;
  }
  for (double& p : avg.power) p /= static_cast<double>(count);
  return avg;
}

void Cohort::validate() const {
  if (records.empty()) throw InvalidInput("cohort is empty");
  for (const auto& r : records) {
    if (!(r.grid == records.front().grid)) throw InvalidInput("cohort records are on different grids");
  }
}

FidelityReport fidelity_report(const Cohort& real, const Cohort& synthetic, std::uint64_t seed) {
  real.validate();
  synthetic.validate();
  if (!(real.grid() == synthetic.grid())) throw InvalidInput("fidelity_report: cohorts are on different grids");

  FidelityReport rep;
  rep.n_real = real.records.size();
  rep.n_synthetic = synthetic.records.size();

  std::vector<std::vector<double>> xr, xs;
  for (const auto& r : real.records) xr.push_back(r.flatten());
  for (const auto& r : synthetic.records) xs.push_back(r.flatten());
  std::vector<std::vector<double>> pooled = xr;
  pooled.insert(pooled.end(), xs.begin(), xs.end());
  rep.kernel_bandwidth = median_bandwidth(pooled);
  rep.mmd2 = mmd2(xr, xs, rep.kernel_bandwidth);

  rep.ks_flat = ks_distance(pooled_flat(real.records), pooled_flat(synthetic.records));

  for (std::size_t l = 0; l < kNumLeads; ++l) rep.ks_per_lead[l] = ks_distance(pooled_lead(real, l), pooled_lead(synthetic, l));
  rep.ks_per_lead_mean = mean_sd(rep.ks_per_lead, &rep.ks_per_lead_sd);

  std::vector<RecordFeatures> fr, fs;
  for (const auto& r : real.records) fr.push_back(basic_features(r));
  for (const auto& r : synthetic.records) fs.push_back(basic_features(r));
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    std::vector<double> a, b;
    for (const auto& f : fr) a.insert(a.end(), f.leads[l].r_amplitudes.begin(), f.leads[l].r_amplitudes.end());
    for (const auto& f : fs) b.insert(b.end(), f.leads[l].r_amplitudes.begin(), f.leads[l].r_amplitudes.end());
    rep.ks_r_amplitude[l] = (a.empty() || b.empty()) ? 1.0 : ks_distance(a, b);
  }
  auto feature_ks = [&](auto field) {
    std::vector<double> a, b;
    for (const auto& f : fr) for (const auto& lf : f.leads) a.push_back(field(lf));
    for (const auto& f : fs) for (const auto& lf : f.leads) b.push_back(field(lf));
    return ks_distance(a, b);
  };
  rep.ks_feature_mean = feature_ks([](const LeadFeatures& f) { return f.mean; });
  rep.ks_feature_sd = feature_ks([](const LeadFeatures& f) { return f.sd; });
  rep.ks_feature_p2p = feature_ks([](const LeadFeatures& f) { return f.peak_to_peak; });

  SeededRng rng(seed);
  auto rng_real = rng.child(0);
  auto rng_syn = rng.child(1);
  rep.intra_ks_real = intra_ks(real, rng_real);
  rep.intra_ks_synthetic = intra_ks(synthetic, rng_syn);

  rep.real_summary = summarize(real, fr);
  rep.synthetic_summary = summarize(synthetic, fs);
  return rep;
}

void to_json(nlohmann::json& j, const FidelityReport& r) {
  auto lead_table = [](const std::array<LeadSummary, kNumLeads>& s) {
    nlohmann::json t = nlohmann::json::object();
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      t[std::string(kLeadNames[l])] = {{"mean", s[l].mean},
                                       {"sd", s[l].sd},
                                       {"peak_to_peak", s[l].peak_to_peak},
                                       {"clinical_band_power", s[l].clinical_band_power}};
    }
    return t;
  };
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j = nlohmann::json{
      {"mmd2", r.mmd2},
      {"kernel_bandwidth", r.kernel_bandwidth},
      {"ks_flat", r.ks_flat},
      {"ks_per_lead", r.ks_per_lead},
      {"ks_per_lead_mean", r.ks_per_lead_mean},
      {"ks_per_lead_sd", r.ks_per_lead_sd},
      {"ks_r_amplitude", r.ks_r_amplitude},
      {"ks_features", {{"mean", r.ks_feature_mean}, {"sd", r.ks_feature_sd}, {"peak_to_peak", r.ks_feature_p2p}}},
      {"intra_ks", {{"real", opt(r.intra_ks_real)}, {"synthetic", opt(r.intra_ks_synthetic)}}},
      {"feature_stats", {{"real", lead_table(r.real_summary)}, {"synthetic", lead_table(r.synthetic_summary)}}},
      {"psd_band_hz", {kClinicalBand.lo, kClinicalBand.hi}},
      {"n_real", r.n_real},
      {"n_synthetic", r.n_synthetic},
  };
}

void from_json(const nlohmann::json& j, FidelityReport& r) {
  auto lead_table = [](const nlohmann::json& t, std::array<LeadSummary, kNumLeads>& s) {
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      const auto& e = t.at(std::string(kLeadNames[l]));
      s[l] = {e.at("mean").get<double>(), e.at("sd").get<double>(), e.at("peak_to_peak").get<double>(),
              e.at("clinical_band_power").get<double>()};
    }
  };
  auto opt = [](const nlohmann::json& v) { return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()); };
  r.mmd2 = j.at("mmd2").get<double>();
  r.kernel_bandwidth = j.at("kernel_bandwidth").get<double>();
  r.ks_flat = j.at("ks_flat").get<double>();
  r.ks_per_lead = j.at("ks_per_lead").get<std::array<double, kNumLeads>>();
  r.ks_per_lead_mean = j.at("ks_per_lead_mean").get<double>();
  r.ks_per_lead_sd = j.at("ks_per_lead_sd").get<double>();
  r.ks_r_amplitude = j.at("ks_r_amplitude").get<std::array<double, kNumLeads>>();
  r.ks_feature_mean = j.at("ks_features").at("mean").get<double>();
  r.ks_feature_sd = j.at("ks_features").at("sd").get<double>();
  r.ks_feature_p2p = j.at("ks_features").at("peak_to_peak").get<double>();
  r.intra_ks_real = opt(j.at("intra_ks").at("real"));
  r.intra_ks_synthetic = opt(j.at("intra_ks").at("synthetic"));
  lead_table(j.at("feature_stats").at("real"), r.real_summary);
  lead_table(j.at("feature_stats").at("synthetic"), r.synthetic_summary);
  r.n_real = j.at("n_real").get<std::size_t>();
  r.n_synthetic = j.at("n_synthetic").get<std::size_t>();
}

}  // namespace ecgsynth
