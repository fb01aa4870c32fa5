#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "ecgsynth/config.hpp"
#include "ecgsynth/dataset.hpp"
#include "ecgsynth/error.hpp"
#include "ecgsynth/fidelity.hpp"
#include "ecgsynth/pipeline.hpp"
#include "ecgsynth/probe.hpp"

namespace py = pybind11;
using namespace ecgsynth;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Label parse_label(const std::string& s) {
  if (s == "Normal") return Label::Normal;
  if (s == "MI") return Label::MI;
  throw InvalidInput("label must be 'Normal' or 'MI', got '" + s + "'");
}

std::string label_text(Label l) { return l == Label::MI ? "MI" : "Normal"; }

GenerationConfig config_from(const std::string& text) {
  return text.empty() ? GenerationConfig{} : nlohmann::json::parse(text).get<GenerationConfig>();
}

py::array_t<double> signals_of(const MultiLeadRecord& r) {
  py::array_t<double> out({kNumLeads, r.n_samples()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    for (std::size_t i = 0; i < r.n_samples(); ++i) v(l, i) = r.leads[l][i];
  }
  return out;
}

MultiLeadRecord record_from(const Array& signals, double fs, Label label) {
  if (signals.ndim() != 2 || signals.shape(0) != static_cast<py::ssize_t>(kNumLeads)) {
    throw InvalidInput("signals must have shape (12, n_samples)");
  }
  MultiLeadRecord r(TimeGrid(fs, static_cast<std::size_t>(signals.shape(1))));
  auto v = signals.unchecked<2>();
  for (std::size_t l = 0; l < kNumLeads; ++l) {
    for (std::size_t i = 0; i < r.n_samples(); ++i) r.leads[l][i] = v(l, i);
  }
  r.label = label;
  r.validate();
  return r;
}

std::vector<double> vec(const Array& a) {
  if (a.ndim() != 1) throw InvalidInput("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

std::vector<std::vector<double>> rows(const Array& a) {
  if (a.ndim() != 2) throw InvalidInput("expected a 2-D array");
  std::vector<std::vector<double>> out(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* p = a.data(static_cast<py::ssize_t>(i), 0);
    out[i].assign(p, p + a.shape(1));
  }
  return out;
}

py::dict record_dict(const MultiLeadRecord& r) {
  py::dict d;
  d["signals"] = signals_of(r);
  d["sampling_rate"] = r.grid.sampling_rate();
  d["label"] = label_text(r.label);
  d["seed"] = r.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Synthetic 12-lead ECG generation and fidelity metrics";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.attr("lead_names") = std::vector<std::string>(kLeadNames.begin(), kLeadNames.end());
  m.attr("default_bootstrap_resamples") = kDefaultBootstrapResamples;

  m.def("default_config", [] { return nlohmann::json(GenerationConfig{}).dump(); },
        "Default generation config as a JSON string.");
  m.def("config_digest", [](const std::string& cfg) { return config_from(cfg).digest(); }, py::arg("config"));

  m.def(
      "synthesize",
      [](const std::string& cfg, const std::string& label, std::uint64_t seed) {
        const auto s = synthesize_record(config_from(cfg), parse_label(label), seed);
        auto d = record_dict(s.record);
        d["r_peaks"] = s.r_peaks_for_lead(Lead::II);
        return d;
      },
      py::arg("config"), py::arg("label"), py::arg("seed"));

  m.def(
      "generate_dataset",
      [](const std::string& cfg, const std::filesystem::path& out, unsigned threads) {
        py::gil_scoped_release release;
        return generate_dataset(config_from(cfg), out, threads).records.size();
      },
      py::arg("config"), py::arg("out_dir"), py::arg("threads") = 1);

  m.def(
      "load_records",
      [](const std::filesystem::path& path) {
        const auto recs = std::filesystem::is_directory(path) ? load_records(path) : load_record_file(path);
        py::list out;
        for (const auto& r : recs) out.append(record_dict(r));
        return out;
      },
      py::arg("path"));

  m.def(
      "write_record_csv",
      [](const std::filesystem::path& path, const Array& signals, double fs) {
        write_record_csv(record_from(signals, fs, Label::Normal), path);
      },
      py::arg("path"), py::arg("signals"), py::arg("sampling_rate"));

  m.def("mmd2", [](const Array& x, const Array& y, double bw) { return mmd2(rows(x), rows(y), bw); }, py::arg("x"),
        py::arg("y"), py::arg("bandwidth"));
  m.def("median_bandwidth", [](const Array& x) { return median_bandwidth(rows(x)); }, py::arg("x"));
  m.def("ks_distance", [](const Array& x, const Array& y) { return ks_distance(vec(x), vec(y)); }, py::arg("x"),
        py::arg("y"));
  m.def("auroc", [](const Array& s, const std::vector<int>& y) { return auroc(vec(s), y); }, py::arg("scores"),
        py::arg("labels"));
  m.def(
      "bootstrap_auc_ci",
      [](const Array& s, const std::vector<int>& y, std::size_t n, double level, std::uint64_t seed) {
        SeededRng rng(seed);
        const auto ci = bootstrap_auc_ci(vec(s), y, n, level, rng);
        return py::make_tuple(ci.point, ci.low, ci.high);
      },
      py::arg("scores"), py::arg("labels"), py::arg("n_resamples") = kDefaultBootstrapResamples,
      py::arg("level") = 0.95, py::arg("seed") = 0);

  m.def(
      "detect_r_peaks",
      [](const Array& lead, double fs) {
        const auto x = vec(lead);
        return detect_r_peaks(x, TimeGrid(fs, x.size()));
      },
      py::arg("lead"), py::arg("sampling_rate"));
  m.def(
      "psd_welch",
      [](const Array& lead, double fs, std::size_t segment) {
        const auto x = vec(lead);
        const auto s = psd_welch(x, TimeGrid(fs, x.size()), segment);
        return py::make_tuple(py::array(py::cast(s.freq)), py::array(py::cast(s.power)));
      },
      py::arg("lead"), py::arg("sampling_rate"), py::arg("segment_len") = 256);

  m.def("feature_names", [] {
    const auto n = feature_names();
    return std::vector<std::string>(n.begin(), n.end());
  });
  m.def(
      "extract_features",
      [](const Array& signals, double fs) {
        const auto f = extract_features(record_from(signals, fs, Label::Normal));
        return py::array(py::cast(std::vector<double>(f.begin(), f.end())));
      },
      py::arg("signals"), py::arg("sampling_rate"));

  m.def(
      "fidelity_report",
      [](const std::filesystem::path& real, const std::filesystem::path& synthetic, std::uint64_t seed) {
        Cohort r{load_records(real), Source::Real};
        Cohort s{load_records(synthetic), Source::Synthetic};
        return nlohmann::json(fidelity_report(r, s, seed)).dump();
      },
      py::arg("real_dir"), py::arg("synthetic_dir"), py::arg("seed") = 0);
}
