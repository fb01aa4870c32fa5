#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecgsynth/signal_core.hpp"

namespace ecgsynth {

inline constexpr std::size_t kNumLeads = 12;

enum class Lead : std::size_t { I, II, III, aVR, aVL, aVF, V1, V2, V3, V4, V5, V6 };

inline constexpr std::array<std::string_view, kNumLeads> kLeadNames = {
    "I", "II", "III", "aVR", "aVL", "aVF", "V1", "V2", "V3", "V4", "V5", "V6"};

constexpr std::size_t idx(Lead l) noexcept { return static_cast<std::size_t>(l); }
std::optional<std::size_t> lead_index(std::string_view name) noexcept;

enum class Source : std::uint8_t { Synthetic, Real };

/// What happened to a record on its way through the pipeline.
struct Provenance {
  std::string config_digest;
  bool st_window_truncated = false;
  bool t_inverted = false;  // applied per record
  double st_elevation_mv = 0.0;
  double fade_exponent = 0.0;
  std::array<int, kNumLeads> lead_shift_samples{};
  std::array<bool, kNumLeads> flat_lead{};  // normalization skipped a zero lead
};

/// Twelve leads on a shared grid, millivolts until normalized.
struct MultiLeadRecord {
  TimeGrid grid;
  std::array<std::vector<double>, kNumLeads> leads;
  Label label = Label::Normal;
  std::uint64_t seed = 0;
  Source source = Source::Synthetic;
  Provenance provenance;

  MultiLeadRecord() = default;
  explicit MultiLeadRecord(const TimeGrid& g);

  std::vector<double>& operator[](Lead l) noexcept { return leads[idx(l)]; }
  const std::vector<double>& operator[](Lead l) const noexcept { return leads[idx(l)]; }
  std::size_t n_samples() const noexcept { return grid.n_samples(); }

  /// Exactly 12 leads of n_samples finite values; throws InvalidInput.
  void validate() const;
  /// Leads concatenated I..V6.
  std::vector<double> flatten() const;
};

}  // namespace ecgsynth
