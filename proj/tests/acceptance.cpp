// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Pass criterion numbers as arguments to run a
// subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ecgsynth/artifact_noise.hpp"
#include "ecgsynth/config.hpp"
#include "ecgsynth/dataset.hpp"
#include "ecgsynth/error.hpp"
#include "ecgsynth/fidelity.hpp"
#include "ecgsynth/pipeline.hpp"
#include "ecgsynth/probe.hpp"
#include "ecgsynth/spectral.hpp"
#include "support.hpp"

using namespace ecgsynth;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 1 -------------------------------------------------------------------------
Outcome determinism() {
  GenerationConfig cfg;
  cfg.n_normal = 50;
  cfg.n_mi = 50;
  const auto t0 = Clock::now();
  bool same = true;
  std::size_t files = 0;
  for (auto fmt_ : {OutputFormat::Csv, OutputFormat::Bin}) {
    cfg.format = fmt_;
    TempDir a("acc1"), b("acc4");
    generate_dataset(cfg, a.path, 1);
    generate_dataset(cfg, b.path, 4);
    std::set<std::string> names_a, names_b;
    for (const auto& e : fs::directory_iterator(a.path)) names_a.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b.path)) names_b.insert(e.path().filename().string());
    same &= names_a == names_b;
    for (const auto& n : names_a) {
      same &= slurp(a.path / n) == slurp(b.path / n);
      ++files;
    }
  }
  const double dt = seconds_since(t0);
  return {same && dt < 10.0, fmt("%zu files byte-identical at 1 vs 4 threads: %s; %.2f s (limit 10 s)", files,
                                 same ? "yes" : "no", dt)};
}

// 2 -------------------------------------------------------------------------
Outcome lead_algebra() {
  GenerationConfig cfg;
  double worst = 0.0;
  for (std::size_t k = 0; k < 100; ++k) {
    const auto s = synthesize_record(cfg, k % 2 ? Label::MI : Label::Normal, child_seed(2, k), true);
    const auto& p = s.stages->projected;
    for (std::size_t i = 0; i < p.n_samples(); ++i) {
      const double a = p[Lead::I][i], b = p[Lead::II][i];
      worst = std::max({worst, std::abs(p[Lead::III][i] - (b - a)), std::abs(p[Lead::aVR][i] + (a + b) / 2.0),
                        std::abs(p[Lead::aVL][i] - (a - b / 2.0)), std::abs(p[Lead::aVF][i] - (b - a / 2.0))});
    }
  }
  return {worst <= 1e-9, fmt("max identity residual %.3g mV over 100 records (limit 1e-9)", worst)};
}

// 3 -------------------------------------------------------------------------
Outcome st_calibration() {
  GenerationConfig cfg;
  const double fs = cfg.grid.sampling_rate();
  const auto lo = static_cast<std::size_t>(std::lround(cfg.mi.st_window_s.lo * fs));
  const auto hi = static_cast<std::size_t>(std::lround(cfg.mi.st_window_s.hi * fs));
  double min_off = 1e9, max_off = -1e9, worst_gap = 0.0;
  std::size_t windows = 0;
  for (std::size_t k = 0; k < 100; ++k) {
    const auto s = synthesize_record(cfg, Label::MI, child_seed(3, k), true);
    const auto& st = *s.stages;
    const double target = s.record.provenance.st_elevation_mv;
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      if (!cfg.mi.affected_leads[l]) continue;
      for (std::size_t r : s.r_peaks) {
        if (r + hi >= cfg.grid.n_samples()) continue;
        double acc = 0.0;
        for (std::size_t i = r + lo; i <= r + hi; ++i) acc += st.post_st.leads[l][i] - st.pre_st.leads[l][i];
        const double off = acc / static_cast<double>(hi - lo + 1);
        min_off = std::min(min_off, off);
        max_off = std::max(max_off, off);
        worst_gap = std::max(worst_gap, std::abs(off - target));
        ++windows;
      }
    }
  }
  const bool ok = min_off >= 0.08 && max_off <= 0.32 && worst_gap <= 0.02;
  return {ok, fmt("%zu windows, offsets in [%.4f, %.4f] mV (limit [0.08, 0.32]), max |offset - sampled height| "
                  "%.2g (limit 0.02)",
                  windows, min_off, max_off, worst_gap)};
}

// 4 -------------------------------------------------------------------------
Outcome metric_oracles() {
  gen::Source src(4);
  int ks_bad = 0, auc_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto x = src.tied_sample(20), y = src.tied_sample(20);
    ks_bad += ks_distance(x, y) != oracle::ks_brute(x, y);
  }
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(src.integer(2, 50));
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = src.integer(0, 12) * 0.5;
      y[i] = src.integer(0, 1);
    }
    y[0] = 0;
    y[1] = 1;
    auc_bad += auroc(s, y) != oracle::auroc_pairs(s, y);
  }
  const std::vector<std::vector<double>> zero{{0.0}}, one{{1.0}};
  const double err = std::abs(mmd2(zero, one, 1.0) - (2.0 - 2.0 * std::exp(-0.5)));
  return {ks_bad == 0 && auc_bad == 0 && err <= 1e-12,
          fmt("ks mismatches %d/1000, auroc mismatches %d/1000, |mmd2({0},{1}) - (2-2e^-0.5)| = %.2g (limit 1e-12)",
              ks_bad, auc_bad, err)};
}

// 5 -------------------------------------------------------------------------
Outcome mmd_properties() {
  GenerationConfig cfg;
  std::vector<std::vector<double>> cohort, other;
  for (std::size_t k = 0; k < 30; ++k) {
    cohort.push_back(synthesize_record(cfg, Label::Normal, child_seed(51, k)).record.flatten());
    other.push_back(synthesize_record(cfg, Label::MI, child_seed(52, k)).record.flatten());
  }
  auto pooled = cohort;
  pooled.insert(pooled.end(), other.begin(), other.end());
  const double bw = median_bandwidth(pooled);
  const double self = mmd2(cohort, cohort, bw);
  const bool symmetric = mmd2(cohort, other, bw) == mmd2(other, cohort, bw);

  gen::Source src(5);
  int wins = 0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::vector<double>> base, near, far;
    for (int i = 0; i < 60; ++i) {
      base.push_back({src.gauss()});
      near.push_back({src.gauss() + 0.25});
      far.push_back({src.gauss() + 0.75});
    }
    wins += mmd2(base, far, 1.0) > mmd2(base, near, 1.0);
  }
  const double p = oracle::sign_test_p(wins, 50);
  return {std::abs(self) < 1e-12 && symmetric && p < 0.01,
          fmt("mmd2(X,X) = %.2g (limit 1e-12), symmetric: %s, shift 0.75 beats 0.25 in %d/50 (sign test p = %.2g, "
              "limit 0.01)",
              self, symmetric ? "yes" : "no", wins, p)};
}

// 6 -------------------------------------------------------------------------
std::vector<double> pooled_sorted(const GenerationConfig& cfg, Label label, std::uint64_t seed, std::size_t n) {
  std::vector<double> v;
  v.reserve(n * kNumLeads * cfg.grid.n_samples());
  for (std::size_t k = 0; k < n; ++k) {
    const auto r = synthesize_record(cfg, label, child_seed(seed, k)).record;
    for (const auto& l : r.leads) v.insert(v.end(), l.begin(), l.end());
  }
  std::sort(v.begin(), v.end());
  return v;
}

Outcome cohort_coherence() {
  GenerationConfig cfg;
  int ok = 0;
  double intra_sum = 0.0, inter_sum = 0.0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const std::uint64_t base = child_seed(600, trial);
    const auto a = pooled_sorted(cfg, Label::Normal, child_seed(base, 0), 200);
    const auto b = pooled_sorted(cfg, Label::Normal, child_seed(base, 1), 200);
    const auto m = pooled_sorted(cfg, Label::MI, child_seed(base, 2), 200);
    const double intra = ks_distance_sorted(a, b);
    const double inter = ks_distance_sorted(a, m);
    ok += intra < inter;
    intra_sum += intra;
    inter_sum += inter;
  }
  return {ok >= 95, fmt("intra < inter in %d/100 trials (need 95); mean intra KS %.4f, mean inter KS %.4f", ok,
                        intra_sum / 100.0, inter_sum / 100.0)};
}

// 7 -------------------------------------------------------------------------
struct Match {
  std::size_t truth = 0, hit = 0, found = 0, correct = 0;
};

// Peaks ramped away by the fade-in or on the first/last two samples are not
// scored; the detector only reports interior maxima.
void score(Match& m, const std::vector<std::size_t>& truth, const std::vector<std::size_t>& found, long tol,
           std::size_t skip_before, std::size_t n) {
  auto scored = [&](std::size_t i) { return i >= std::max<std::size_t>(skip_before, 2) && i + 2 < n; };
  auto near = [&](std::size_t a, const std::vector<std::size_t>& set) {
    return std::any_of(set.begin(), set.end(),
                       [&](std::size_t b) { return std::abs(static_cast<long>(a) - static_cast<long>(b)) <= tol; });
  };
  for (std::size_t r : truth) {
    if (!scored(r)) continue;
    ++m.truth;
    m.hit += near(r, found);
  }
  for (std::size_t p : found) {
    if (!scored(p)) continue;
    ++m.found;
    m.correct += near(p, truth);
  }
}

Outcome detector() {
  GenerationConfig noisy;
  GenerationConfig clean;
  clean.noise = NoiseConfig::silent();
  Match c, d;
  const std::size_t n = noisy.grid.n_samples();
  const auto fade = static_cast<std::size_t>(std::ceil(noisy.noise.fade_duration * noisy.grid.sampling_rate()));
  for (std::size_t k = 0; k < 500; ++k) {
    const auto label = k % 2 ? Label::MI : Label::Normal;
    const auto seed = child_seed(7, k);
    const auto sc = synthesize_record(clean, label, seed);
    score(c, sc.r_peaks_for_lead(Lead::II), detect_r_peaks(sc.record[Lead::II], clean.grid), 1, 0, n);
    const auto sn = synthesize_record(noisy, label, seed);
    score(d, sn.r_peaks_for_lead(Lead::II), detect_r_peaks(sn.record[Lead::II], noisy.grid), 5, fade, n);
  }
  auto ratio = [](std::size_t a, std::size_t b) { return static_cast<double>(a) / static_cast<double>(b); };
  const double cr = ratio(c.hit, c.truth), cp = ratio(c.correct, c.found);
  const double nr = ratio(d.hit, d.truth), np = ratio(d.correct, d.found);
  return {cr >= 0.95 && cp >= 0.95 && nr >= 0.90 && np >= 0.90,
          fmt("clean recall %.4f precision %.4f (limit 0.95, +-1 sample); noisy recall %.4f precision %.4f (limit "
              "0.90, +-5 samples); 500 records, lead II",
              cr, cp, nr, np)};
}

// 8 -------------------------------------------------------------------------
void features_for(const GenerationConfig& cfg, std::uint64_t seed, std::size_t per_class,
                  std::vector<FeatureVector>& x, std::vector<int>& y) {
  for (std::size_t k = 0; k < 2 * per_class; ++k) {
    const auto label = k < per_class ? Label::Normal : Label::MI;
    x.push_back(extract_features(synthesize_record(cfg, label, child_seed(seed, k)).record));
    y.push_back(label == Label::MI);
  }
}

Outcome separability() {
  const auto t0 = Clock::now();
  GenerationConfig cfg;
  std::vector<FeatureVector> xtr, xte;
  std::vector<int> ytr, yte;
  features_for(cfg, 81, 200, xtr, ytr);
  features_for(cfg, 82, 100, xte, yte);
  SeededRng rng(8);
  const auto model = train_probe(xtr, ytr, {}, rng);
  const double auc = auroc(model.scores(xte), yte);
  const double dt = seconds_since(t0);

  // Permutation control: labels on both splits are shuffled so they carry no
  // information about the features.
  auto ptr = ytr, pte = yte;
  std::mt19937_64 eng(808);
  std::shuffle(ptr.begin(), ptr.end(), eng);
  std::shuffle(pte.begin(), pte.end(), eng);
  SeededRng rng2(8);
  const auto control = train_probe(xtr, ptr, {}, rng2);
  const double null_auc = auroc(control.scores(xte), pte);
  return {auc >= 0.95 && dt < 60.0 && null_auc >= 0.4 && null_auc <= 0.6,
          fmt("held-out AUC %.4f (limit 0.95) in %.1f s (limit 60 s); permuted-label AUC %.4f (limit [0.4, 0.6])", auc,
              dt, null_auc)};
}

// 9 -------------------------------------------------------------------------
std::pair<std::vector<double>, std::vector<int>> scored_sample(gen::Source& src, int n) {
  std::vector<double> s;
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    y.push_back(i % 2);
    s.push_back(src.gauss() + (i % 2 ? 1.0 : 0.0));
  }
  return {s, y};
}

Outcome bootstrap() {
  gen::Source src(9);
  int contains = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto [s, y] = scored_sample(src, 100);
    SeededRng rng(t);
    const auto ci = bootstrap_auc_ci(s, y, kDefaultBootstrapResamples, 0.95, rng);
    contains += ci.low <= ci.point && ci.point <= ci.high;
  }
  std::vector<double> small, large;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto [s1, y1] = scored_sample(src, 100);
    const auto [s4, y4] = scored_sample(src, 400);
    SeededRng r1(1000 + t), r4(2000 + t);
    const auto a = bootstrap_auc_ci(s1, y1, kDefaultBootstrapResamples, 0.95, r1);
    const auto b = bootstrap_auc_ci(s4, y4, kDefaultBootstrapResamples, 0.95, r4);
    small.push_back(a.high - a.low);
    large.push_back(b.high - b.low);
  }
  const double ratio = oracle::median(small) / oracle::median(large);
  return {kDefaultBootstrapResamples == 1000 && contains == 100 && ratio >= 1.5 && ratio <= 2.5,
          fmt("n_resamples %zu; CI contains point in %d/100; median width ratio n=100 vs n=400: %.3f (limit [1.5, 2.5])",
              kDefaultBootstrapResamples, contains, ratio)};
}

// 10 ------------------------------------------------------------------------
Outcome spectral() {
  GenerationConfig cfg;
  auto wander = NoiseConfig::silent();
  wander.wander_amp = cfg.noise.wander_amp;
  wander.wander_freq = 0.2;
  auto mains = NoiseConfig::silent();
  mains.mains_amp = cfg.noise.mains_amp;
  mains.mains_freq = 60.0;
  const double fs = cfg.grid.sampling_rate();
  double worst_w = 0.0, worst_m = 0.0;
  for (std::size_t k = 0; k < 50; ++k) {
    const auto s = synthesize_record(cfg, k % 2 ? Label::MI : Label::Normal, child_seed(10, k), true);
    const auto& clean = s.stages->clean;
    SeededRng rw(k), rm(k + 1000);
    const auto w = add_baseline_wander(clean, wander, rw);
    const auto m = add_mains(clean, mains, rm);
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      std::vector<double> dw(clean.n_samples()), dm(clean.n_samples());
      for (std::size_t i = 0; i < dw.size(); ++i) {
        dw[i] = w.leads[l][i] - clean.leads[l][i];
        dm[i] = m.leads[l][i] - clean.leads[l][i];
      }
      worst_w = std::max(worst_w, std::abs(periodogram(dw, fs).peak_frequency() - 0.2));
      worst_m = std::max(worst_m, std::abs(periodogram(dm, fs).peak_frequency() - 40.0));
    }
  }
  return {worst_w <= 0.5 && worst_m <= 0.5,
          fmt("max peak error: wander %.3f Hz from 0.2 Hz, mains %.3f Hz from 40 Hz (limit 0.5 Hz); 50 records x 12 "
              "leads",
              worst_w, worst_m)};
}

// 11 ------------------------------------------------------------------------
Outcome formats() {
  GenerationConfig cfg;
  TempDir dir("acc11");
  std::vector<MultiLeadRecord> recs;
  for (std::size_t k = 0; k < 20; ++k) {
    const auto s = synthesize_record(cfg, k % 2 ? Label::MI : Label::Normal, child_seed(11, k), true);
    recs.push_back(s.record);
    recs.push_back(s.stages->projected);  // millivolt scale too
    recs.back().seed = s.record.seed;
    recs.back().label = s.record.label;
  }
  double csv_err = 0.0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto p = dir.path / ("r" + std::to_string(k) + ".csv");
    write_record_csv(recs[k], p);
    const auto back = read_record_csv(p);
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      for (std::size_t i = 0; i < back.n_samples(); ++i) {
        csv_err = std::max(csv_err, std::abs(back.leads[l][i] - recs[k].leads[l][i]));
      }
    }
  }
  const auto bin = dir.path / "all.bin";
  write_record_bin(recs, bin);
  const auto back = read_record_bin(bin);
  bool bit_exact = back.size() == recs.size();
  for (std::size_t k = 0; bit_exact && k < recs.size(); ++k) {
    bit_exact &= back[k].seed == recs[k].seed && back[k].label == recs[k].label;
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      for (std::size_t i = 0; i < back[k].n_samples(); ++i) {
        const auto want = static_cast<float>(recs[k].leads[l][i]);
        const auto got = static_cast<float>(back[k].leads[l][i]);
        bit_exact &= std::memcmp(&want, &got, sizeof want) == 0;
      }
    }
  }
  auto bytes = slurp(bin);
  bytes.replace(0, 4, "XXXX");
  std::ofstream(bin, std::ios::binary | std::ios::trunc) << bytes;
  bool rejected = false;
  std::vector<MultiLeadRecord> partial;
  try {
    partial = read_record_bin(bin);
  } catch (const LengthError&) {
  } catch (const FormatError&) {
    rejected = true;
  }
  return {csv_err <= 1e-5 && bit_exact && rejected && partial.empty(),
          fmt("CSV max error %.2g (limit 1e-5); binary f32 bit-exact: %s; bad magic rejected as format error with no "
              "records returned: %s",
              csv_err, bit_exact ? "yes" : "no", rejected && partial.empty() ? "yes" : "no")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "determinism", determinism},
      {2, "lead algebra", lead_algebra},
      {3, "ST elevation calibration", st_calibration},
      {4, "metric oracles", metric_oracles},
      {5, "MMD properties", mmd_properties},
      {6, "cohort coherence", cohort_coherence},
      {7, "R-peak detector", detector},
      {8, "separability probe", separability},
      {9, "bootstrap", bootstrap},
      {10, "spectral checks", spectral},
      {11, "formats", formats},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
