#pragma once

// CSV / JSON artifact writers. Every file starts with provenance: tool
// version, config hash and seed. CSV files carry it as leading '#' lines.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace cliffsim::io {

struct Provenance {
  std::string command;
  std::string configHash;  ///< 16 hex digits
  std::uint64_t seed = 0;
  std::string version;
};

/// FNV-1a of the canonical (sorted-key, compact) JSON dump.
std::string config_hash(const nlohmann::json& config);

Provenance make_provenance(const std::string& command, const nlohmann::json& config,
                           std::uint64_t seed);

nlohmann::json to_json(const Provenance& p);

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Provenance& provenance,
            const std::vector<std::string>& columns);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  void end_row();
  void close();
  ~CsvWriter();

 private:
  void field(const std::string& text);
  std::string path_;
  std::string buffer_;
  std::size_t columns_ = 0;
  std::size_t inRow_ = 0;
  bool closed_ = false;
};

/// Writes {"provenance": ..., <body keys>} with a trailing newline.
/// Non-finite numbers in `body` must already be replaced (see finite_or_null).
void write_json(const std::filesystem::path& path, const Provenance& provenance,
                const nlohmann::json& body);

/// JSON has no NaN / infinity.
nlohmann::json finite_or_null(double v);

}  // namespace cliffsim::io
