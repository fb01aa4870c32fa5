#include "ecgsynth/record.hpp"

#include <cmath>

#include "ecgsynth/error.hpp"

namespace ecgsynth {

std::optional<std::size_t> lead_index(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNumLeads; ++i) {
    if (kLeadNames[i] == name) return i;
  }
  return std::nullopt;
}

MultiLeadRecord::MultiLeadRecord(const TimeGrid& g) : grid(g) {
  for (auto& l : leads) l.assign(g.n_samples(), 0.0);
}

void MultiLeadRecord::validate() const {
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    if (leads[l].size() != grid.n_samples()) {
      throw InvalidInput("lead " + std::string(kLeadNames[l]) + " length does not match grid");
    }
    for (double v : leads[l]) {
      if (!std::isfinite(v)) throw InvalidInput("lead " + std::string(kLeadNames[l]) + " has non-finite samples");
    }
  }
}

std::vector<double> MultiLeadRecord::flatten() const {
  std::vector<double> out;
  out.reserve(kNumLeads * grid.n_samples());
  for (const auto& l : leads) out.insert(out.end(), l.begin(), l.end());
  return out;
}

}  // namespace ecgsynth
