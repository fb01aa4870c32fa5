#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ecgsynth/config.hpp"
#include "ecgsynth/record.hpp"

namespace ecgsynth {

// ---- CSV: one record per file ---------------------------------------------

/// Header `time,I,II,III,aVR,aVL,aVF,V1,V2,V3,V4,V5,V6`; time with 4
/// decimals, samples with 6 significant digits.
void write_record_csv(const MultiLeadRecord& rec, const std::filesystem::path& path);
void write_record_csv(const MultiLeadRecord& rec, std::ostream& out);

/// Strict schema. The grid is inferred from the time column; the record is
/// tagged Source::Real with the given label. Throws ParseError with the row.
MultiLeadRecord read_record_csv(const std::filesystem::path& path, Label label = Label::Normal);
MultiLeadRecord read_record_csv(std::istream& in, Label label = Label::Normal);

// ---- binary: many records per file ---------------------------------------

inline constexpr char kBinMagic[4] = {'E', 'C', 'G', 'F'};
inline constexpr std::uint16_t kBinVersion = 1;
inline constexpr std::size_t kBinHeaderBytes = 20;

/// Bytes per record: label u8 + seed u64 + 12 * n_samples f32.
constexpr std::size_t bin_record_bytes(std::size_t n_samples) { return 1 + 8 + kNumLeads * n_samples * 4; }

/// Streams records into a little-endian ECGF file. The record count is
/// fixed up front; finish() checks it was honoured.
class BinWriter {
 public:
  BinWriter(const std::filesystem::path& path, std::uint32_t n_records, const TimeGrid& grid);
  void append(const MultiLeadRecord& rec);
  void finish();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::uint32_t expected_;
  std::uint32_t written_ = 0;
  TimeGrid grid_;
};

void write_record_bin(std::span<const MultiLeadRecord> records, const std::filesystem::path& path);

/// Validates the header and exact file length before decoding anything.
/// Throws FormatError on bad magic/version/lead count, and on length
/// mismatch.
std::vector<MultiLeadRecord> read_record_bin(const std::filesystem::path& path);

// ---- datasets -------------------------------------------------------------

struct ManifestEntry {
  std::size_t id = 0;
  Label label = Label::Normal;
  std::uint64_t seed = 0;
  std::string path;  // relative to the dataset directory; "records.bin#k" for binary
  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::string config_digest;
  OutputFormat format = OutputFormat::Csv;
  TimeGrid grid;
  std::vector<ManifestEntry> records;

  void save(const std::filesystem::path& path) const;
  static DatasetManifest load(const std::filesystem::path& path);
  bool operator==(const DatasetManifest&) const = default;
};

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kBinFile = "records.bin";

/// Generates every record of cfg into out_dir (created if needed) with
/// `threads` workers. Output bytes do not depend on the thread count.
DatasetManifest generate_dataset(const GenerationConfig& cfg, const std::filesystem::path& out_dir,
                                 unsigned threads = 1);

/// Loads a directory: manifest-driven when manifest.json exists (labels and
/// seeds restored), otherwise every *.csv (as Real, Normal) and *.bin file
/// in name order.
std::vector<MultiLeadRecord> load_records(const std::filesystem::path& dir);

/// Loads a single .csv or .bin file.
std::vector<MultiLeadRecord> load_record_file(const std::filesystem::path& file);

}  // namespace ecgsynth
