#pragma once

#include <array>

#include "ecgsynth/record.hpp"
#include "ecgsynth/signal_core.hpp"

namespace ecgsynth {

/// 12x5 gains from wave components (P,Q,R,S,T) to leads (I..V6).
class LeadMatrix {
 public:
  using Row = std::array<double, kNumWaves>;
  static constexpr double kMaxGain = 3.0;

  LeadMatrix() = default;
  /// Throws InvalidInput unless the limb rows satisfy the Einthoven and
  /// Goldberger identities (to 1e-12) and every gain is finite with |g| <= 3.
  explicit LeadMatrix(const std::array<Row, kNumLeads>& rows);

  /// Builds III, aVR, aVL and aVF from I and II.
  static LeadMatrix from_limb_and_precordial(const Row& lead_i, const Row& lead_ii,
                                             const std::array<Row, 6>& precordial);

  const Row& row(Lead l) const noexcept { return rows_[idx(l)]; }
  double operator()(Lead l, Wave w) const noexcept { return rows_[idx(l)][static_cast<std::size_t>(w)]; }
  const std::array<Row, kNumLeads>& rows() const noexcept { return rows_; }

  bool operator==(const LeadMatrix&) const = default;

 private:
  std::array<Row, kNumLeads> rows_{};
};

LeadMatrix default_lead_matrix();

/// lead[l](t) = sum_w m(l, w) * component_w(t). Output is unlabeled
/// (Normal, seed 0); callers stamp metadata.
MultiLeadRecord project_to_leads(const ComponentTraces& components, const LeadMatrix& m, const TimeGrid& grid);

}  // namespace ecgsynth
