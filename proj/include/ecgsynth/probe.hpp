#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ecgsynth/fidelity.hpp"
#include "ecgsynth/record.hpp"
#include "ecgsynth/rng.hpp"

namespace ecgsynth {

inline constexpr std::size_t kFeaturesPerLead = 5;
inline constexpr std::size_t kNumFeatures = kNumLeads * kFeaturesPerLead;

/// Per lead: R amplitude, ST level, QRS width, T amplitude, signal sd.
using FeatureVector = std::array<double, kNumFeatures>;

std::array<std::string, kNumFeatures> feature_names();

/// Packs basic_features; leads without detected beats contribute zeros.
FeatureVector extract_features(const MultiLeadRecord& rec, const FeatureOptions& opts = {});

struct ProbeOptions {
  double learning_rate = 0.5;
  int epochs = 400;
  double l2 = 1e-4;
};

/// Logistic regression on z-scored features.
struct ProbeModel {
  FeatureVector weights{};
  double bias = 0.0;
  FeatureVector feature_mean{};
  FeatureVector feature_scale{};  // training sd, 1 where the sd is zero
  int iterations = 0;
  std::vector<double> loss_history;  // one entry per epoch plus the initial loss
  double final_loss = 0.0;

  /// Logit for one feature vector.
  double decision(const FeatureVector& x) const;
  std::vector<double> scores(std::span<const FeatureVector> xs) const;
};

/// Full-batch gradient descent. A step that would raise the loss is halved
/// until it does not, so the training loss never increases. Weights start
/// at small draws from `rng`. Throws InvalidInput unless both labels occur.
ProbeModel train_probe(std::span<const FeatureVector> features, std::span<const int> labels,
                       const ProbeOptions& opts, SeededRng& rng);

/// Mann-Whitney AUROC; tied scores count one half.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct AucInterval {
  double low = 0.0;
  double high = 0.0;
  double point = 0.0;
};

inline constexpr std::size_t kDefaultBootstrapResamples = 1000;

/// Stratified percentile bootstrap. Resample i draws from rng-derived child
/// seed i, so results do not depend on evaluation order.
AucInterval bootstrap_auc_ci(std::span<const double> scores, std::span<const int> labels,
                             std::size_t n_resamples, double level, SeededRng& rng);

}  // namespace ecgsynth
