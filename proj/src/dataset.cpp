#include "ecgsynth/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "ecgsynth/error.hpp"
#include "ecgsynth/pipeline.hpp"

namespace ecgsynth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kCsvColumns = 1 + kNumLeads;
constexpr std::size_t kGenerateChunk = 64;

std::string csv_header() {
  std::string h = "time";
  for (auto name : kLeadNames) {
    h += ',';
    h += name;
  }
  return h;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, long row) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
    throw ParseError("non-numeric cell '" + std::string(cell) + "'", row);
  }
  return v;
}

// Little-endian packing, independent of host byte order.
template <typename T>
void put_le(std::string& buf, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  const U u = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
  return std::bit_cast<T>(u);
}

std::string bin_header(std::uint32_t n_records, const TimeGrid& grid) {
  std::string h(kBinMagic, 4);
  put_le<std::uint16_t>(h, kBinVersion);
  put_le<std::uint32_t>(h, n_records);
  put_le<std::uint16_t>(h, static_cast<std::uint16_t>(kNumLeads));
  put_le<std::uint32_t>(h, static_cast<std::uint32_t>(grid.n_samples()));
  put_le<float>(h, static_cast<float>(grid.sampling_rate()));
  return h;
}

std::string record_filename(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "record_%06zu.csv", id);
  return buf;
}

std::vector<MultiLeadRecord> read_bin_bytes(const std::vector<unsigned char>& bytes, const std::string& name) {
  if (bytes.size() < kBinHeaderBytes) throw LengthError(name + ": truncated header");
  if (std::memcmp(bytes.data(), kBinMagic, 4) != 0) throw FormatError(name + ": bad magic");
  const auto version = get_le<std::uint16_t>(bytes.data() + 4);
  if (version != kBinVersion) throw FormatError(name + ": unsupported version " + std::to_string(version));
  const auto n_records = get_le<std::uint32_t>(bytes.data() + 6);
  const auto n_leads = get_le<std::uint16_t>(bytes.data() + 10);
  const auto n_samples = get_le<std::uint32_t>(bytes.data() + 12);
  const auto rate = get_le<float>(bytes.data() + 16);
  if (n_leads != kNumLeads) throw FormatError(name + ": expected 12 leads");
  if (n_samples == 0 || !(rate > 0.0f) || !std::isfinite(rate)) throw FormatError(name + ": bad grid in header");
  const std::size_t per = bin_record_bytes(n_samples);
  const std::size_t expected = kBinHeaderBytes + static_cast<std::size_t>(n_records) * per;
  if (bytes.size() != expected) {
    throw LengthError(name + ": length " + std::to_string(bytes.size()) + " does not match header (" +
                      std::to_string(expected) + ")");
  }
  const TimeGrid grid(static_cast<double>(rate), n_samples);
  std::vector<MultiLeadRecord> out;
  out.reserve(n_records);
  const unsigned char* p = bytes.data() + kBinHeaderBytes;
  for (std::uint32_t r = 0; r < n_records; ++r) {
    MultiLeadRecord rec(grid);
    if (p[0] > 1) throw FormatError(name + ": bad label byte in record " + std::to_string(r));
    rec.label = static_cast<Label>(p[0]);
    rec.seed = get_le<std::uint64_t>(p + 1);
    p += 9;
    for (auto& lead : rec.leads) {
      for (auto& v : lead) {
        v = static_cast<double>(get_le<float>(p));
        p += 4;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

void write_record_csv(const MultiLeadRecord& rec, std::ostream& out) {
  rec.validate();
  out << csv_header() << '\n';
  char buf[64];
  std::string line;
  for (std::size_t i = 0; i < rec.n_samples(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4f", rec.grid.time_at(i));
    line = buf;
    for (const auto& lead : rec.leads) {
      std::snprintf(buf, sizeof buf, ",%.6g", lead[i]);
      line += buf;
    }
    out << line << '\n';
  }
}

void write_record_csv(const MultiLeadRecord& rec, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_record_csv(rec, out);
  if (!out) throw Error("write failed: " + path.string());
}

MultiLeadRecord read_record_csv(std::istream& in, Label label) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw ParseError("header must be '" + csv_header() + "'", 1);

  std::vector<double> times;
  std::array<std::vector<double>, kNumLeads> leads;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != kCsvColumns) {
      throw ParseError("expected 13 cells, found " + std::to_string(cells.size()), row);
    }
    const double t = parse_cell(cells[0], row);
    if (!times.empty() && !(t > times.back())) throw ParseError("time column must increase", row);
    times.push_back(t);
    for (std::size_t l = 0; l < kNumLeads; ++l) leads[l].push_back(parse_cell(cells[l + 1], row));
  }
  if (times.size() < 2) throw ParseError("need at least two samples", row);
  double rate = static_cast<double>(times.size() - 1) / (times.back() - times.front());
  if (std::abs(rate - std::round(rate)) < 1e-3 * rate) rate = std::round(rate);

  MultiLeadRecord rec(TimeGrid(rate, times.size()));
  rec.leads = std::move(leads);
  rec.label = label;
  rec.source = Source::Real;
  return rec;
}

MultiLeadRecord read_record_csv(const fs::path& path, Label label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return read_record_csv(in, label);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.row());
  }
}

BinWriter::BinWriter(const fs::path& path, std::uint32_t n_records, const TimeGrid& grid)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), expected_(n_records), grid_(grid) {
  if (!out_) throw Error("cannot write " + path.string());
  const auto h = bin_header(n_records, grid);
  out_.write(h.data(), static_cast<std::streamsize>(h.size()));
}

void BinWriter::append(const MultiLeadRecord& rec) {
  if (written_ >= expected_) throw InvalidInput("BinWriter: more records than declared");
  if (!(rec.grid == grid_)) throw InvalidInput("BinWriter: record grid differs from header");
  rec.validate();
  std::string buf;
  buf.reserve(bin_record_bytes(grid_.n_samples()));
  put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(rec.label));
  put_le<std::uint64_t>(buf, rec.seed);
  for (const auto& lead : rec.leads) {
    for (double v : lead) put_le<float>(buf, static_cast<float>(v));
  }
  out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  ++written_;
}

void BinWriter::finish() {
  if (written_ != expected_) throw InvalidInput("BinWriter: fewer records than declared");
  out_.flush();
  if (!out_) throw Error("write failed: " + path_.string());
  out_.close();
}

void write_record_bin(std::span<const MultiLeadRecord> records, const fs::path& path) {
  const TimeGrid grid = records.empty() ? TimeGrid{} : records.front().grid;
  BinWriter w(path, static_cast<std::uint32_t>(records.size()), grid);
  for (const auto& r : records) w.append(r);
  w.finish();
}

std::vector<MultiLeadRecord> read_record_bin(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_bin_bytes(bytes, path.string());
}

void DatasetManifest::save(const fs::path& path) const {
  json recs = json::array();
  for (const auto& e : records) {
    recs.push_back({{"id", e.id}, {"label", std::string(label_name(e.label))}, {"seed", e.seed}, {"path", e.path}});
  }
  const json j = {{"config_digest", config_digest},
                  {"format", format_name(format)},
                  {"grid", {{"sampling_rate", grid.sampling_rate()}, {"n_samples", grid.n_samples()}}},
                  {"n_records", records.size()},
                  {"records", recs}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  DatasetManifest m;
  try {
    json j;
    in >> j;
    m.config_digest = j.at("config_digest").get<std::string>();
    m.format = parse_format(j.at("format").get<std::string>());
    m.grid = TimeGrid(j.at("grid").at("sampling_rate").get<double>(), j.at("grid").at("n_samples").get<std::size_t>());
    for (const auto& e : j.at("records")) {
      m.records.push_back({e.at("id").get<std::size_t>(), parse_label(e.at("label").get<std::string>()),
                           e.at("seed").get<std::uint64_t>(), e.at("path").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return m;
}

DatasetManifest generate_dataset(const GenerationConfig& cfg, const fs::path& out_dir, unsigned threads) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw Error("cannot create output directory " + out_dir.string());

  DatasetManifest manifest;
  manifest.config_digest = cfg.digest();
  manifest.format = cfg.format;
  manifest.grid = cfg.grid;
  const std::size_t total = cfg.total();
  for (std::size_t k = 0; k < total; ++k) {
    manifest.records.push_back({k, cfg.label_of(k), cfg.record_seed(k),
                                cfg.format == OutputFormat::Bin ? std::string(kBinFile) + "#" + std::to_string(k)
                                                                : record_filename(k)});
  }

  std::optional<BinWriter> bin;
  if (cfg.format == OutputFormat::Bin && total > 0) {
    bin.emplace(out_dir / kBinFile, static_cast<std::uint32_t>(total), cfg.grid);
  }
  threads = std::max(1u, threads);
  std::vector<MultiLeadRecord> chunk;
  for (std::size_t begin = 0; begin < total; begin += kGenerateChunk) {
    const std::size_t end = std::min(total, begin + kGenerateChunk);
    chunk.assign(end - begin, MultiLeadRecord{});
    std::atomic<std::size_t> next{begin};
    auto work = [&] {
      for (std::size_t k = next++; k < end; k = next++) chunk[k - begin] = synthesize_dataset_record(cfg, k).record;
    };
    if (threads == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    for (std::size_t k = begin; k < end; ++k) {
      if (bin) {
        bin->append(chunk[k - begin]);
      } else {
        write_record_csv(chunk[k - begin], out_dir / record_filename(k));
      }
    }
  }
  if (bin) bin->finish();
  cfg.save(out_dir / kConfigFile);
  manifest.save(out_dir / kManifestFile);
  return manifest;
}

std::vector<MultiLeadRecord> load_record_file(const fs::path& file) {
  const auto ext = file.extension().string();
  if (ext == ".csv") return {read_record_csv(file)};
  if (ext == ".bin") return read_record_bin(file);
  throw InvalidInput("unsupported record file " + file.string());
}

std::vector<MultiLeadRecord> load_records(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InvalidInput("not a directory: " + dir.string());
  std::vector<MultiLeadRecord> out;
  if (fs::exists(dir / kManifestFile)) {
    const auto m = DatasetManifest::load(dir / kManifestFile);
    std::vector<MultiLeadRecord> bin;
    if (m.format == OutputFormat::Bin && !m.records.empty()) {
      bin = read_record_bin(dir / kBinFile);
      if (bin.size() != m.records.size()) throw FormatError("manifest and records.bin disagree on record count");
    }
    for (std::size_t i = 0; i < m.records.size(); ++i) {
      const auto& e = m.records[i];
      MultiLeadRecord rec = m.format == OutputFormat::Bin ? std::move(bin[i]) : read_record_csv(dir / e.path, e.label);
      rec.label = e.label;
      rec.seed = e.seed;
      rec.source = Source::Synthetic;
      rec.provenance.config_digest = m.config_digest;
      out.push_back(std::move(rec));
    }
    return out;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".csv" || ext == ".bin")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto recs = load_record_file(f);
    for (auto& r : recs) {
      r.source = Source::Real;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace ecgsynth
