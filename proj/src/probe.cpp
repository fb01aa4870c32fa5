#include "ecgsynth/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ecgsynth/error.hpp"

namespace ecgsynth {
namespace {

constexpr int kMaxStepHalvings = 40;

double log1p_exp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Problem {
  std::vector<FeatureVector> x;  // standardized
  std::vector<double> y;
  double l2;

  double loss(const FeatureVector& w, double b) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double z = b;
      for (std::size_t k = 0; k < kNumFeatures; ++k) z += w[k] * x[i][k];
      // -[y log s(z) + (1-y) log(1 - s(z))]
      acc += log1p_exp(z) - y[i] * z;
    }
    double reg = 0.0;
    for (double v : w) reg += v * v;
    return acc / static_cast<double>(x.size()) + 0.5 * l2 * reg;
  }

  void gradient(const FeatureVector& w, double b, FeatureVector& gw, double& gb) const {
    gw.fill(0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double z = b;
      for (std::size_t k = 0; k < kNumFeatures; ++k) z += w[k] * x[i][k];
      const double r = sigmoid(z) - y[i];
      for (std::size_t k = 0; k < kNumFeatures; ++k) gw[k] += r * x[i][k];
      gb += r;
    }
    const double inv = 1.0 / static_cast<double>(x.size());
    for (std::size_t k = 0; k < kNumFeatures; ++k) gw[k] = gw[k] * inv + l2 * w[k];
    gb *= inv;
  }
};

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::array<std::string, kNumFeatures> feature_names() {
  static constexpr std::array<std::string_view, kFeaturesPerLead> kinds = {"r_amp", "st_level", "qrs_width", "t_amp", "sd"};
  std::array<std::string, kNumFeatures> out;
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    for (std::size_t k = 0; k < kFeaturesPerLead; ++k) {
      out[l * kFeaturesPerLead + k] = std::string(kLeadNames[l]) + "_" + std::string(kinds[k]);
    }
  }
  return out;
}

FeatureVector extract_features(const MultiLeadRecord& rec, const FeatureOptions& opts) {
  const auto f = basic_features(rec, opts);
  FeatureVector v{};
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    const auto& lf = f.leads[l];
    const std::size_t o = l * kFeaturesPerLead;
    v[o + 0] = lf.r_amplitude_mean;
    v[o + 1] = lf.st_level;
    v[o + 2] = lf.qrs_width_s;
    v[o + 3] = lf.t_amplitude;
    v[o + 4] = lf.sd;
  }
  return v;
}

double ProbeModel::decision(const FeatureVector& x) const {
  double z = bias;
  for (std::size_t k = 0; k < kNumFeatures; ++k) z += weights[k] * (x[k] - feature_mean[k]) / feature_scale[k];
  return z;
}

std::vector<double> ProbeModel::scores(std::span<const FeatureVector> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(decision(x));
  return out;
}

ProbeModel train_probe(std::span<const FeatureVector> features, std::span<const int> labels,
                       const ProbeOptions& opts, SeededRng& rng) {
  if (features.size() != labels.size() || features.empty()) throw InvalidInput("train_probe: features/labels mismatch");
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  const auto neg = std::count(labels.begin(), labels.end(), 0);
  if (pos + neg != static_cast<long>(labels.size())) throw InvalidInput("train_probe: labels must be 0 or 1");
  if (pos == 0 || neg == 0) throw InvalidInput("train_probe: both classes must be present");
  if (!(opts.learning_rate > 0.0) || opts.epochs < 0 || opts.l2 < 0.0) throw InvalidInput("train_probe: bad options");
  for (const auto& f : features) {
    if (!std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); })) {
      throw InvalidInput("train_probe: non-finite feature");
    }
  }

  ProbeModel m;
  const double n = static_cast<double>(features.size());
  for (std::size_t k = 0; k < kNumFeatures; ++k) {
    double mean = 0.0;
    for (const auto& f : features) mean += f[k];
    mean /= n;
    double ss = 0.0;
    for (const auto& f : features) ss += (f[k] - mean) * (f[k] - mean);
    const double sd = std::sqrt(ss / n);
    m.feature_mean[k] = mean;
    m.feature_scale[k] = sd > 1e-12 ? sd : 1.0;
  }
  Problem prob;
  prob.l2 = opts.l2;
  for (std::size_t i = 0; i < features.size(); ++i) {
    FeatureVector z;
    for (std::size_t k = 0; k < kNumFeatures; ++k) z[k] = (features[i][k] - m.feature_mean[k]) / m.feature_scale[k];
    prob.x.push_back(z);
    prob.y.push_back(static_cast<double>(labels[i]));
  }

  for (double& w : m.weights) w = rng.normal(0.0, 0.01);
  double loss = prob.loss(m.weights, m.bias);
  m.loss_history.push_back(loss);
  double step = opts.learning_rate;
  FeatureVector gw;
  double gb = 0.0;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    prob.gradient(m.weights, m.bias, gw, gb);
    bool moved = false;
    for (int h = 0; h < kMaxStepHalvings; ++h) {
      FeatureVector w = m.weights;
      for (std::size_t k = 0; k < kNumFeatures; ++k) w[k] -= step * gw[k];
      const double b = m.bias - step * gb;
      const double cand = prob.loss(w, b);
      if (cand <= loss) {
        m.weights = w;
        m.bias = b;
        loss = cand;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    m.loss_history.push_back(loss);
    m.iterations = epoch + 1;
    if (!moved) break;
  }
  m.final_loss = loss;
  return m;
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidInput("auroc: scores/labels length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mid;
        ++n_pos;
      } else if (labels[order[k]] != 0) {
        throw InvalidInput("auroc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InvalidInput("auroc: both classes must be present");
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

AucInterval bootstrap_auc_ci(std::span<const double> scores, std::span<const int> labels,
                             std::size_t n_resamples, double level, SeededRng& rng) {
  if (n_resamples == 0) throw InvalidInput("bootstrap: need at least one resample");
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("bootstrap: level must be in (0,1)");
  AucInterval out;
  out.point = auroc(scores, labels);
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);

  const std::uint64_t base = rng.next_u64();
  std::vector<double> aucs(n_resamples);
  std::vector<double> s(scores.size());
  std::vector<int> y(scores.size());
  for (std::size_t r = 0; r < n_resamples; ++r) {
    SeededRng local(child_seed(base, r));
    std::size_t k = 0;
    for (const auto* group : {&pos, &neg}) {
      for (std::size_t i = 0; i < group->size(); ++i, ++k) {
        const std::size_t pick = (*group)[local.below(group->size())];
        s[k] = scores[pick];
        y[k] = labels[pick];
      }
    }
    aucs[r] = auroc(s, y);
  }
  std::sort(aucs.begin(), aucs.end());
  const double alpha = 1.0 - level;
  out.low = quantile_sorted(aucs, alpha / 2.0);
  out.high = quantile_sorted(aucs, 1.0 - alpha / 2.0);
  return out;
}

}  // namespace ecgsynth
