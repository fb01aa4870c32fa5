#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ecgsynth/artifact_noise.hpp"
#include "ecgsynth/leads.hpp"
#include "ecgsynth/pathology_mi.hpp"
#include "ecgsynth/rhythm.hpp"
#include "ecgsynth/signal_core.hpp"

namespace ecgsynth {

enum class OutputFormat { Csv, Bin };

/// Everything that determines a generated dataset. Missing JSON keys fall
/// back to the defaults below.
struct GenerationConfig {
  TimeGrid grid{100.0, 1000};
  std::size_t n_normal = 50;
  std::size_t n_mi = 50;
  std::uint64_t base_seed = 20240601;
  ParamDistribution normal_params = default_param_distribution(Label::Normal);
  ParamDistribution mi_params = default_param_distribution(Label::MI);
  /// Each record draws one template beat from its class distribution; beats
  /// then vary around it with the class sds scaled by this factor.
  double beat_sd_scale = 0.25;
  RhythmConfig rhythm;
  MiConfig mi;
  NoiseConfig noise;
  std::optional<LeadMatrix> lead_matrix;
  OutputFormat format = OutputFormat::Csv;

  std::size_t total() const noexcept { return n_normal + n_mi; }
  /// Records [0, n_normal) are Normal, the rest MI.
  Label label_of(std::size_t index) const noexcept { return index < n_normal ? Label::Normal : Label::MI; }
  std::uint64_t record_seed(std::size_t index) const noexcept { return child_seed(base_seed, index); }
  const ParamDistribution& params_for(Label l) const noexcept { return l == Label::MI ? mi_params : normal_params; }
  LeadMatrix matrix() const { return lead_matrix ? *lead_matrix : default_lead_matrix(); }

  void validate() const;
  /// Hex SHA-256 of the canonical JSON dump.
  std::string digest() const;

  static GenerationConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  bool operator==(const GenerationConfig&) const = default;
};

void to_json(nlohmann::json& j, const GenerationConfig& c);
void from_json(const nlohmann::json& j, GenerationConfig& c);
void to_json(nlohmann::json& j, const LeadMatrix& m);
void from_json(const nlohmann::json& j, LeadMatrix& m);

std::string format_name(OutputFormat f);
OutputFormat parse_format(const std::string& s);

}  // namespace ecgsynth
