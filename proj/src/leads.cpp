#include "ecgsynth/leads.hpp"

#include <cmath>
#include <string>

#include "ecgsynth/error.hpp"

namespace ecgsynth {
namespace {

constexpr double kIdentityTol = 1e-12;

bool close(double a, double b) { return std::abs(a - b) <= kIdentityTol; }

}  // namespace

LeadMatrix::LeadMatrix(const std::array<Row, kNumLeads>& rows) : rows_(rows) {
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    for (double g : rows_[l]) {
      if (!std::isfinite(g) || std::abs(g) > kMaxGain) {
        throw InvalidInput("lead matrix: gain out of range in row " + std::string(kLeadNames[l]));
      }
    }
  }
  const auto& r1 = row(Lead::I);
  const auto& r2 = row(Lead::II);
  for (std::size_t w = 0; w < kNumWaves; ++w) {
    if (!close(row(Lead::III)[w], r2[w] - r1[w])) throw InvalidInput("lead matrix: III != II - I");
    if (!close(row(Lead::aVR)[w], -(r1[w] + r2[w]) / 2.0)) throw InvalidInput("lead matrix: aVR != -(I + II)/2");
    if (!close(row(Lead::aVL)[w], r1[w] - r2[w] / 2.0)) throw InvalidInput("lead matrix: aVL != I - II/2");
    if (!close(row(Lead::aVF)[w], r2[w] - r1[w] / 2.0)) throw InvalidInput("lead matrix: aVF != II - I/2");
  }
}

LeadMatrix LeadMatrix::from_limb_and_precordial(const Row& lead_i, const Row& lead_ii,
                                                const std::array<Row, 6>& precordial) {
  std::array<Row, kNumLeads> rows{};
  rows[idx(Lead::I)] = lead_i;
  rows[idx(Lead::II)] = lead_ii;
  for (std::size_t w = 0; w < kNumWaves; ++w) {
    rows[idx(Lead::III)][w] = lead_ii[w] - lead_i[w];
    rows[idx(Lead::aVR)][w] = -(lead_i[w] + lead_ii[w]) / 2.0;
    rows[idx(Lead::aVL)][w] = lead_i[w] - lead_ii[w] / 2.0;
    rows[idx(Lead::aVF)][w] = lead_ii[w] - lead_i[w] / 2.0;
  }
  for (std::size_t v = 0; v < 6; ++v) rows[idx(Lead::V1) + v] = precordial[v];
  return LeadMatrix(rows);
}

LeadMatrix default_lead_matrix() {
  //                P     Q     R     S     T
  const LeadMatrix::Row lead_i{0.60, 0.50, 0.60, 0.40, 0.60};
  const LeadMatrix::Row lead_ii{1.00, 1.00, 1.00, 1.00, 1.00};
  const std::array<LeadMatrix::Row, 6> precordial{{
      {0.50, 0.00, 0.30, 2.50, 0.20},  // V1: rS
      {0.60, 0.20, 0.60, 2.80, 0.80},
      {0.60, 0.40, 1.00, 2.00, 1.00},
      {0.60, 0.60, 1.40, 1.20, 1.00},
      {0.60, 0.80, 1.30, 0.60, 0.90},  // V5: qR
      {0.60, 0.80, 1.10, 0.40, 0.80},
  }};
  return LeadMatrix::from_limb_and_precordial(lead_i, lead_ii, precordial);
}

MultiLeadRecord project_to_leads(const ComponentTraces& components, const LeadMatrix& m, const TimeGrid& grid) {
  const std::size_t n = grid.n_samples();
  for (const auto& t : components.traces) {
    if (t.size() != n) throw InvalidInput("project_to_leads: component length does not match grid");
  }
  MultiLeadRecord rec(grid);
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    const auto& row = m.rows()[l];
    auto& out = rec.leads[l];
    for (std::size_t w = 0; w < kNumWaves; ++w) {
      const double g = row[w];
      if (g == 0.0) continue;
      const auto& c = components.traces[w];
      for (std::size_t i = 0; i < n; ++i) out[i] += g * c[i];
    }
  }
  return rec;
}

}  // namespace ecgsynth
