#include "ecgsynth/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "ecgsynth/error.hpp"

namespace ecgsynth {

using nlohmann::json;

namespace {

json moments_json(const Moments& m) { return json::array({m.mean, m.sd}); }
void moments_from(const json& j, Moments& m) {
  if (!j.is_array() || j.size() != 2) throw ParseError("config: expected [mean, sd]");
  m = {j[0].get<double>(), j[1].get<double>()};
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }
void range_from(const json& j, const char* key, Range& r) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ParseError(std::string("config: ") + key + " must be [lo, hi]");
  r = {v[0].get<double>(), v[1].get<double>()};
}
void band_from(const json& j, const char* key, Band& b) {
  Range r{b.lo, b.hi};
  range_from(j, key, r);
  b = {r.lo, r.hi};
}

template <typename T>
void opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json dist_json(const ParamDistribution& d) {
  json o = json::object();
  for (Wave w : kWaves) {
    const auto& wd = d[w];
    o[std::string(wave_name(w))] = {{"center", moments_json(wd.center)},
                                     {"amplitude", moments_json(wd.amplitude)},
                                     {"width", moments_json(wd.width)}};
  }
  return o;
}

void dist_from(const json& j, ParamDistribution& d) {
  for (Wave w : kWaves) {
    const std::string name(wave_name(w));
    if (!j.contains(name)) continue;
    const auto& e = j.at(name);
    if (e.contains("center")) moments_from(e.at("center"), d[w].center);
    if (e.contains("amplitude")) moments_from(e.at("amplitude"), d[w].amplitude);
    if (e.contains("width")) moments_from(e.at("width"), d[w].width);
  }
}

json rhythm_json(const RhythmConfig& r) {
  return {{"log_mean", r.log_mean},       {"log_sd", r.log_sd},   {"target_lf_hf_ratio", r.target_lf_hf_ratio},
          {"lf_band", json::array({r.lf_band.lo, r.lf_band.hi})},
          {"hf_band", json::array({r.hf_band.lo, r.hf_band.hi})},
          {"min_rr", r.min_rr},           {"max_rr", r.max_rr},   {"min_intervals", r.min_intervals}};
}

void rhythm_from(const json& j, RhythmConfig& r) {
  opt(j, "log_mean", r.log_mean);
  opt(j, "log_sd", r.log_sd);
  opt(j, "target_lf_hf_ratio", r.target_lf_hf_ratio);
  band_from(j, "lf_band", r.lf_band);
  band_from(j, "hf_band", r.hf_band);
  opt(j, "min_rr", r.min_rr);
  opt(j, "max_rr", r.max_rr);
  opt(j, "min_intervals", r.min_intervals);
}

json mi_json(const MiConfig& m) {
  json leads = json::array();
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    if (m.affected_leads[l]) leads.push_back(std::string(kLeadNames[l]));
  }
  return {{"q_deepening", range_json(m.q_deepening)},
          {"st_elevation_mv", range_json(m.st_elevation_mv)},
          {"st_window_s", range_json(m.st_window_s)},
          {"st_ramp_s", m.st_ramp_s},
          {"t_inversion_prob", m.t_inversion_prob},
          {"t_scale", range_json(m.t_scale)},
          {"qrs_broadening", range_json(m.qrs_broadening)},
          {"amp_jitter_sd", m.amp_jitter_sd},
          {"r_distortion_mv", m.r_distortion_mv},
          {"lead_time_shift_ms", m.lead_time_shift_ms},
          {"affected_leads", leads}};
}

void mi_from(const json& j, MiConfig& m) {
  range_from(j, "q_deepening", m.q_deepening);
  range_from(j, "st_elevation_mv", m.st_elevation_mv);
  range_from(j, "st_window_s", m.st_window_s);
  opt(j, "st_ramp_s", m.st_ramp_s);
  opt(j, "t_inversion_prob", m.t_inversion_prob);
  range_from(j, "t_scale", m.t_scale);
  range_from(j, "qrs_broadening", m.qrs_broadening);
  opt(j, "amp_jitter_sd", m.amp_jitter_sd);
  opt(j, "r_distortion_mv", m.r_distortion_mv);
  opt(j, "lead_time_shift_ms", m.lead_time_shift_ms);
  if (j.contains("affected_leads")) {
    m.affected_leads = {};
    for (const auto& name : j.at("affected_leads")) {
      const auto i = lead_index(name.get<std::string>());
      if (!i) throw ParseError("config: unknown lead '" + name.get<std::string>() + "'");
      m.affected_leads[*i] = true;
    }
  }
}

json noise_json(const NoiseConfig& n) {
  return {{"wander_amp", n.wander_amp},
          {"wander_freq", n.wander_freq},
          {"mains_freq", n.mains_freq},
          {"mains_amp", n.mains_amp},
          {"emg_sd", n.emg_sd},
          {"emg_mi_multiplier", n.emg_mi_multiplier},
          {"emg_band", json::array({n.emg_band.lo, n.emg_band.hi})},
          {"motion_burst_amp", n.motion_burst_amp},
          {"motion_burst_prob", n.motion_burst_prob},
          {"fade_duration", n.fade_duration},
          {"fade_mi_exponent", range_json(n.fade_mi_exponent)},
          {"calib_scale", range_json(n.calib_scale)},
          {"normalize", n.normalize}};
}

void noise_from(const json& j, NoiseConfig& n) {
  opt(j, "wander_amp", n.wander_amp);
  opt(j, "wander_freq", n.wander_freq);
  opt(j, "mains_freq", n.mains_freq);
  opt(j, "mains_amp", n.mains_amp);
  opt(j, "emg_sd", n.emg_sd);
  opt(j, "emg_mi_multiplier", n.emg_mi_multiplier);
  band_from(j, "emg_band", n.emg_band);
  opt(j, "motion_burst_amp", n.motion_burst_amp);
  opt(j, "motion_burst_prob", n.motion_burst_prob);
  opt(j, "fade_duration", n.fade_duration);
  range_from(j, "fade_mi_exponent", n.fade_mi_exponent);
  range_from(j, "calib_scale", n.calib_scale);
  opt(j, "normalize", n.normalize);
}

}  // namespace

std::string format_name(OutputFormat f) { return f == OutputFormat::Bin ? "bin" : "csv"; }

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "bin") return OutputFormat::Bin;
  throw InvalidInput("unknown output format '" + s + "' (expected csv or bin)");
}

void to_json(json& j, const LeadMatrix& m) {
  j = json::array();
  for (const auto& row : m.rows()) j.push_back(row);
}

void from_json(const json& j, LeadMatrix& m) {
  if (!j.is_array() || j.size() != kNumLeads) throw ParseError("lead_matrix must be a 12x5 array");
  std::array<LeadMatrix::Row, kNumLeads> rows{};
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    if (!j[l].is_array() || j[l].size() != kNumWaves) throw ParseError("lead_matrix must be a 12x5 array");
    for (std::size_t w = 0; w < kNumWaves; ++w) rows[l][w] = j[l][w].get<double>();
  }
  m = LeadMatrix(rows);
}

void to_json(json& j, const GenerationConfig& c) {
  j = {{"grid", {{"sampling_rate", c.grid.sampling_rate()}, {"n_samples", c.grid.n_samples()}}},
       {"class_mix", {{"Normal", c.n_normal}, {"MI", c.n_mi}}},
       {"base_seed", c.base_seed},
       {"param_distributions", {{"Normal", dist_json(c.normal_params)}, {"MI", dist_json(c.mi_params)}}},
       {"beat_sd_scale", c.beat_sd_scale},
       {"rhythm", rhythm_json(c.rhythm)},
       {"mi", mi_json(c.mi)},
       {"noise", noise_json(c.noise)},
       {"lead_matrix", c.lead_matrix ? json(*c.lead_matrix) : json(nullptr)},
       {"format", format_name(c.format)}};
}

void from_json(const json& j, GenerationConfig& c) {
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  static const std::set<std::string> known = {"grid", "class_mix", "base_seed", "param_distributions", "beat_sd_scale",
                                              "rhythm", "mi", "noise", "lead_matrix", "format"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ParseError("config: unknown key '" + key + "'");
  }
  try {
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      const double fs = g.value("sampling_rate", c.grid.sampling_rate());
      if (g.contains("duration") && !g.contains("n_samples")) {
        c.grid = TimeGrid::from_duration(fs, g.at("duration").get<double>());
      } else {
        c.grid = TimeGrid(fs, g.value("n_samples", c.grid.n_samples()));
      }
    }
    if (j.contains("class_mix")) {
      opt(j.at("class_mix"), "Normal", c.n_normal);
      opt(j.at("class_mix"), "MI", c.n_mi);
    }
    opt(j, "base_seed", c.base_seed);
    if (j.contains("param_distributions")) {
      const auto& p = j.at("param_distributions");
      if (p.contains("Normal")) dist_from(p.at("Normal"), c.normal_params);
      if (p.contains("MI")) dist_from(p.at("MI"), c.mi_params);
    }
    opt(j, "beat_sd_scale", c.beat_sd_scale);
    if (j.contains("rhythm")) rhythm_from(j.at("rhythm"), c.rhythm);
    if (j.contains("mi")) mi_from(j.at("mi"), c.mi);
    if (j.contains("noise")) noise_from(j.at("noise"), c.noise);
    if (j.contains("lead_matrix") && !j.at("lead_matrix").is_null()) c.lead_matrix = j.at("lead_matrix").get<LeadMatrix>();
    if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

void GenerationConfig::validate() const {
  normal_params.validate();
  mi_params.validate();
  if (!std::isfinite(beat_sd_scale) || beat_sd_scale < 0.0) throw InvalidInput("config: beat_sd_scale must be >= 0");
  rhythm.validate();
  mi.validate();
  noise.validate();
  if (noise.fade_duration >= grid.duration()) throw InvalidInput("config: fade_duration must be shorter than the record");
}

std::string GenerationConfig::digest() const {
  const std::string text = json(*this).dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("config digest: SHA-256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

GenerationConfig GenerationConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  GenerationConfig c = j.get<GenerationConfig>();
  c.validate();
  return c;
}

void GenerationConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << json(*this).dump(2) << '\n';
}

}  // namespace ecgsynth
