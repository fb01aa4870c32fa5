#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ecgsynth/pathology_mi.hpp"
#include "ecgsynth/record.hpp"
#include "ecgsynth/spectral.hpp"

namespace ecgsynth {

// ---- two-sample statistics -------------------------------------------------

/// Median of all pairwise Euclidean distances. Needs >= 2 vectors of equal
/// length; throws DegenerateComputation when the median is zero.
double median_bandwidth(std::span<const std::vector<double>> vectors);

/// Biased (V-statistic) squared MMD with k(u,v) = exp(-|u-v|^2 / (2 s^2)).
/// Each of the three kernel means is summed in sorted order, so the result
/// is independent of argument order.
double mmd2(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y, double bandwidth);

/// sup_t |F_x(t) - F_y(t)|.
double ks_distance(std::span<const double> x, std::span<const double> y);
/// Same, for inputs already sorted ascending.
double ks_distance_sorted(std::span<const double> x, std::span<const double> y);

// ---- per-record features --------------------------------------------------

struct PeakDetectorOptions {
  double threshold_fraction = 0.6;
  double max_window_s = 2.0;        // centered rolling-max window
  double refractory_s = 0.3;
  double baseline_window_s = 0.6;   // centered moving median removed first
  double integration_window_s = 0.08;
  double refine_window_s = 0.06;    // search radius for the raw maximum
};

/// R peaks of one lead, strictly increasing and at least refractory_s apart.
///
/// The baseline-removed trace is turned into a slope-energy envelope
/// (five-point derivative, squared, moving average over
/// integration_window_s). Local maxima of the envelope above
/// threshold_fraction times its rolling max are kept, the larger of any two
/// within the refractory gap winning, and each is moved to the largest raw
/// sample within refine_window_s. The envelope keeps broad, tall T waves
/// from outranking narrow R waves.
std::vector<std::size_t> detect_r_peaks(std::span<const double> lead, const TimeGrid& grid,
                                        const PeakDetectorOptions& opts = {});

struct FeatureOptions {
  Lead reference_lead = Lead::II;
  Range st_window_s{0.04, 0.12};
  Range iso_window_s{-0.08, -0.04};  // PR segment, relative to R
  Range t_window_s{0.12, 0.35};
  double peak_refine_s = 0.02;
  PeakDetectorOptions detector;
};

struct LeadFeatures {
  double mean = 0.0;
  double sd = 0.0;
  double peak_to_peak = 0.0;
  std::vector<double> r_amplitudes;  // per detected beat, relative to the PR level
  double r_amplitude_mean = 0.0;
  double st_level = 0.0;             // ST-window mean minus PR level, beat-averaged
  double qrs_width_s = 0.0;          // full width at half maximum, beat-averaged
  double t_amplitude = 0.0;          // signed, relative to the PR level
};

struct RecordFeatures {
  std::vector<std::size_t> r_peaks;  // on the reference lead
  std::array<LeadFeatures, kNumLeads> leads;
};

RecordFeatures basic_features(const MultiLeadRecord& rec, const FeatureOptions& opts = {});

// ---- spectra ---------------------------------------------------------------

inline constexpr Band kClinicalBand{0.5, 40.0};

/// Welch average of Hann-windowed, mean-detrended periodograms.
Spectrum psd_welch(std::span<const double> lead, const TimeGrid& grid, std::size_t segment_len = 256,
                   double overlap = 0.5);

inline double clinical_band_power(const Spectrum& s) { return s.band_power(kClinicalBand.lo, kClinicalBand.hi); }

// ---- cohort comparison -----------------------------------------------------

enum class CohortClass { Normal, MI, Mixed };

struct Cohort {
  std::vector<MultiLeadRecord> records;
  Source source = Source::Synthetic;
  CohortClass cls = CohortClass::Mixed;

  /// Non-empty and every record on the same grid.
  void validate() const;
  const TimeGrid& grid() const { return records.front().grid; }
};

struct LeadSummary {
  double mean = 0.0;
  double sd = 0.0;
  double peak_to_peak = 0.0;
  double clinical_band_power = 0.0;
  bool operator==(const LeadSummary&) const = default;
};

struct FidelityReport {
  double mmd2 = 0.0;
  double kernel_bandwidth = 0.0;
  double ks_flat = 0.0;
  std::array<double, kNumLeads> ks_per_lead{};
  double ks_per_lead_mean = 0.0;
  double ks_per_lead_sd = 0.0;
  std::array<double, kNumLeads> ks_r_amplitude{};
  double ks_feature_mean = 0.0;
  double ks_feature_sd = 0.0;
  double ks_feature_p2p = 0.0;
  std::optional<double> intra_ks_real;       // random halves of the real cohort
  std::optional<double> intra_ks_synthetic;
  std::array<LeadSummary, kNumLeads> real_summary{};
  std::array<LeadSummary, kNumLeads> synthetic_summary{};
  std::size_t n_real = 0;
  std::size_t n_synthetic = 0;

  bool operator==(const FidelityReport&) const = default;
};

void to_json(nlohmann::json& j, const FidelityReport& r);
void from_json(const nlohmann::json& j, FidelityReport& r);

/// All metrics for a real/synthetic pair. `seed` drives the random halving
/// used for the intra-group KS distances.
FidelityReport fidelity_report(const Cohort& real, const Cohort& synthetic, std::uint64_t seed = 0);

}  // namespace ecgsynth
