// ecgsynth command-line tool: generate, validate, probe, inspect.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ecgsynth/config.hpp"
#include "ecgsynth/dataset.hpp"
#include "ecgsynth/error.hpp"
#include "ecgsynth/fidelity.hpp"
#include "ecgsynth/probe.hpp"

using namespace ecgsynth;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsageError = 2;

// Thrown for bad argument values that CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_json(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out.precision(10);
  return out;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::string out;
  std::optional<std::size_t> count;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

// Rescales the class mix to `total` records, keeping the Normal:MI ratio
// (even split for an empty mix).
void override_count(GenerationConfig& cfg, std::size_t total) {
  const std::size_t old = cfg.total();
  const double share = old == 0 ? 0.5 : static_cast<double>(cfg.n_normal) / static_cast<double>(old);
  cfg.n_normal = static_cast<std::size_t>(std::llround(share * static_cast<double>(total)));
  cfg.n_mi = total - cfg.n_normal;
}

int run_generate(const GenerateArgs& a) {
  GenerationConfig cfg;
  try {
    cfg = GenerationConfig::load(a.config);
  } catch (const Error& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  }
  if (a.count) override_count(cfg, *a.count);
  if (a.seed) cfg.base_seed = *a.seed;
  if (a.format) cfg.format = parse_format(*a.format);
  cfg.validate();
  const auto m = generate_dataset(cfg, a.out, a.threads);
  std::size_t mi = 0;
  for (const auto& e : m.records) mi += e.label == Label::MI;
  std::printf("generated %zu records (%zu Normal, %zu MI) in %s, config %s\n", m.records.size(),
              m.records.size() - mi, mi, a.out.c_str(), m.config_digest.substr(0, 12).c_str());
  return kOk;
}

// ---- validate -------------------------------------------------------------

struct ValidateArgs {
  std::string real;
  std::string synthetic;
  std::string report;
  bool per_lead = false;
  std::uint64_t seed = 0;
};

Cohort load_cohort(const fs::path& dir, Source source) {
  Cohort c;
  c.records = load_records(dir);
  c.source = source;
  if (c.records.empty()) throw InvalidInput("no records in " + dir.string());
  return c;
}

int run_validate(const ValidateArgs& a) {
  const auto real = load_cohort(a.real, Source::Real);
  const auto syn = load_cohort(a.synthetic, Source::Synthetic);
  const auto report = fidelity_report(real, syn, a.seed);
  json j = report;
  if (a.per_lead) {
    json leads = json::object();
    for (std::size_t l = 0; l < kNumLeads; ++l) {
      const std::string name(kLeadNames[l]);
      leads[name] = {{"ks", report.ks_per_lead[l]},
                     {"ks_r_amplitude", report.ks_r_amplitude[l]},
                     {"real", j["feature_stats"]["real"][name]},
                     {"synthetic", j["feature_stats"]["synthetic"][name]}};
    }
    j["per_lead"] = std::move(leads);
  }
  for (const char* key : {"ks_per_lead", "ks_r_amplitude", "feature_stats"}) j.erase(key);
  j["seed"] = a.seed;
  write_json(j, a.report);
  std::printf("mmd2 %.6g (bandwidth %.4g), flat KS %.4f, per-lead KS %.4f +- %.4f; %zu real vs %zu synthetic\n",
              report.mmd2, report.kernel_bandwidth, report.ks_flat, report.ks_per_lead_mean, report.ks_per_lead_sd,
              report.n_real, report.n_synthetic);
  return kOk;
}

// ---- probe ----------------------------------------------------------------

struct ProbeArgs {
  std::string train;
  std::string test;
  std::string report;
  std::size_t bootstrap = kDefaultBootstrapResamples;
  double level = 0.95;
  std::uint64_t seed = 0;
  ProbeOptions opts;
  std::optional<std::string> export_dir;
};

struct FeatureSet {
  std::vector<FeatureVector> x;
  std::vector<int> y;
};

FeatureSet featurize(const fs::path& dir) {
  FeatureSet s;
  for (const auto& r : load_records(dir)) {
    s.x.push_back(extract_features(r));
    s.y.push_back(r.label == Label::MI);
  }
  if (s.x.empty()) throw InvalidInput("no records in " + dir.string());
  return s;
}

void export_features(const FeatureSet& s, const fs::path& path) {
  auto out = open_csv(path);
  out << "label";
  for (const auto& n : feature_names()) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    out << s.y[i];
    for (double v : s.x[i]) out << ',' << v;
    out << '\n';
  }
}

json class_counts(const std::vector<int>& y) {
  const auto mi = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  return {{"Normal", y.size() - mi}, {"MI", mi}};
}

int run_probe(const ProbeArgs& a) {
  const auto train = featurize(a.train);
  const auto test = featurize(a.test);
  if (a.export_dir) {
    export_features(train, fs::path(*a.export_dir) / "train_features.csv");
    export_features(test, fs::path(*a.export_dir) / "test_features.csv");
  }
  SeededRng rng(a.seed);
  const auto model = train_probe(train.x, train.y, a.opts, rng);
  const auto scores = model.scores(test.x);
  SeededRng boot_rng(child_seed(a.seed, 1));
  const auto ci = bootstrap_auc_ci(scores, test.y, a.bootstrap, a.level, boot_rng);

  json weights = json::object();
  const auto names = feature_names();
  for (std::size_t k = 0; k < kNumFeatures; ++k) weights[names[k]] = model.weights[k];
  const json j = {{"auc", ci.point},
                  {"ci", {{"low", ci.low}, {"high", ci.high}, {"level", a.level}}},
                  {"bootstrap_resamples", a.bootstrap},
                  {"seed", a.seed},
                  {"n_train", class_counts(train.y)},
                  {"n_test", class_counts(test.y)},
                  {"training", {{"epochs", a.opts.epochs},
                                {"learning_rate", a.opts.learning_rate},
                                {"l2", a.opts.l2},
                                {"final_loss", model.final_loss}}},
                  {"bias", model.bias},
                  {"weights", weights}};
  write_json(j, a.report);
  std::printf("test AUC %.4f, %.0f%% CI [%.4f, %.4f] from %zu resamples\n", ci.point, a.level * 100.0, ci.low,
              ci.high, a.bootstrap);
  return kOk;
}

// ---- inspect --------------------------------------------------------------

struct InspectArgs {
  std::string record;
  std::string lead;
  std::size_t index = 0;
  std::size_t segment = 256;
  std::optional<std::string> psd_out;
  std::optional<std::string> ecdf_out;
};

int run_inspect(const InspectArgs& a) {
  const auto lead = lead_index(a.lead);
  if (!lead) throw UsageError("unknown lead '" + a.lead + "'");
  const auto recs = load_record_file(a.record);
  if (a.index >= recs.size()) {
    throw InvalidInput("record index " + std::to_string(a.index) + " out of range (" + std::to_string(recs.size()) +
                       " records)");
  }
  const auto& rec = recs[a.index];
  const auto& x = rec.leads[*lead];
  const auto f = basic_features(rec);
  const auto& lf = f.leads[*lead];
  const auto peaks = detect_r_peaks(x, rec.grid);
  const double rate = 60.0 * static_cast<double>(peaks.size()) / rec.grid.duration();
  const auto psd = psd_welch(x, rec.grid, std::min(a.segment, x.size()));

  std::printf("lead %s: %zu samples at %g Hz, label %s\n", a.lead.c_str(), x.size(), rec.grid.sampling_rate(),
              rec.label == Label::MI ? "MI" : "Normal");
  std::printf("mean %.4f mV, sd %.4f mV, peak-to-peak %.4f mV\n", lf.mean, lf.sd, lf.peak_to_peak);
  std::printf("%zu R peaks (%.1f bpm), R amplitude %.4f mV, ST level %.4f mV\n", peaks.size(), rate,
              lf.r_amplitude_mean, lf.st_level);
  std::printf("PSD peak %.3f Hz, 0.5-40 Hz band power %.4g mV^2\n", psd.peak_frequency(), clinical_band_power(psd));

  if (a.psd_out) {
    auto out = open_csv(*a.psd_out);
    out << "frequency_hz,power\n";
    for (std::size_t k = 0; k < psd.freq.size(); ++k) out << psd.freq[k] << ',' << psd.power[k] << '\n';
  }
  if (a.ecdf_out) {
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    auto out = open_csv(*a.ecdf_out);
    out << "value,cdf\n";
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i + 1 < v.size() && v[i + 1] == v[i]) continue;  // one step per distinct value
      out << v[i] << ',' << static_cast<double>(i + 1) / n << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic 12-lead ECG generation and fidelity evaluation", "ecgsynth"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a labelled dataset from a JSON config");
  g->add_option("--config", gen.config, "Generation config (JSON)")->required()->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--count-override", gen.count, "Total record count, keeping the class ratio");
  g->add_option("--seed", gen.seed, "Base seed, overriding the config");
  g->add_option("--format", gen.format, "Record format")->check(CLI::IsMember({"csv", "bin"}));
  g->add_option("--threads", gen.threads, "Worker threads")->check(CLI::PositiveNumber);

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "Compare a synthetic cohort against a reference cohort");
  v->add_option("--real", val.real, "Reference record directory")->required()->check(CLI::ExistingDirectory);
  v->add_option("--synthetic", val.synthetic, "Synthetic record directory")->required()->check(CLI::ExistingDirectory);
  v->add_option("--report", val.report, "Output JSON report")->required();
  v->add_flag("--per-lead", val.per_lead, "Include per-lead statistics");
  v->add_option("--seed", val.seed, "Seed for the intra-cohort split");

  ProbeArgs pr;
  auto* p = app.add_subcommand("probe", "Train a logistic probe and report held-out AUC");
  p->add_option("--train-dir", pr.train, "Training records")->required()->check(CLI::ExistingDirectory);
  p->add_option("--test-dir", pr.test, "Test records")->required()->check(CLI::ExistingDirectory);
  p->add_option("--report", pr.report, "Output JSON report")->required();
  p->add_option("--bootstrap", pr.bootstrap, "Bootstrap resamples")->capture_default_str()->check(CLI::PositiveNumber);
  p->add_option("--level", pr.level, "Confidence level")->capture_default_str()->check(CLI::Range(0.5, 0.999));
  p->add_option("--seed", pr.seed, "Seed for weight init and bootstrap")->capture_default_str();
  p->add_option("--epochs", pr.opts.epochs, "Gradient descent epochs")->capture_default_str()->check(CLI::PositiveNumber);
  p->add_option("--learning-rate", pr.opts.learning_rate, "Initial step size")->capture_default_str()->check(CLI::PositiveNumber);
  p->add_option("--export-features", pr.export_dir, "Write train/test feature matrices as CSV into this directory");

  InspectArgs ins;
  auto* i = app.add_subcommand("inspect", "Summarize one lead of a record");
  i->add_option("--record", ins.record, "Record file (.csv or .bin)")->required()->check(CLI::ExistingFile);
  i->add_option("--lead", ins.lead, "Lead name, e.g. II or V2")->required();
  i->add_option("--index", ins.index, "Record index within a .bin file")->capture_default_str();
  i->add_option("--segment", ins.segment, "Welch segment length")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  i->add_option("--emit-psd", ins.psd_out, "Write the Welch PSD as CSV");
  i->add_option("--emit-ecdf", ins.ecdf_out, "Write the sample ECDF as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsageError;
  }

  try {
    if (*g) return run_generate(gen);
    if (*v) return run_validate(val);
    if (*p) return run_probe(pr);
    return run_inspect(ins);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.get_subcommands().front()->help();
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
}
