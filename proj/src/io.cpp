#include "cliffsim/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cliffsim/common.hpp"
#include "cliffsim/rng.hpp"

namespace cliffsim::io {

std::string config_hash(const nlohmann::json& config) {
  // nlohmann objects are std::map backed, so dump() is already key-sorted.
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(rng::fnv1a(config.dump())));
  return buf;
}

Provenance make_provenance(const std::string& command, const nlohmann::json& config,
                           std::uint64_t seed) {
  return {command, config_hash(config), seed, kToolVersion};
}

nlohmann::json to_json(const Provenance& p) {
  return {{"tool", "cliffsim"},
          {"version", p.version},
          {"command", p.command},
          {"config_hash", p.configHash},
          {"seed", p.seed}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const Provenance& p,
                     const std::vector<std::string>& columns)
    : path_(path.string()), columns_(columns.size()) {
  buffer_ += "# cliffsim " + p.version + " command=" + p.command + " config_hash=" +
             p.configHash + " seed=" + std::to_string(p.seed) + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) buffer_ += (i ? "," : "") + columns[i];
  buffer_ += "\n";
}

void CsvWriter::field(const std::string& text) {
  if (inRow_ == columns_) throw std::logic_error("csv: too many fields in row for " + path_);
  if (inRow_) buffer_ += ',';
  buffer_ += text;
  ++inRow_;
}

CsvWriter& CsvWriter::operator<<(double v) {
  field(format_number(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  field(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  if (v.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    field(q + "\"");
  } else {
    field(v);
  }
  return *this;
}

void CsvWriter::end_row() {
  if (inRow_ != columns_) throw std::logic_error("csv: short row in " + path_);
  buffer_ += '\n';
  inRow_ = 0;
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  std::ofstream out(path_, std::ios::binary);
  out << buffer_;
  if (!out) throw std::runtime_error("cannot write " + path_);
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void write_json(const std::filesystem::path& path, const Provenance& provenance,
                const nlohmann::json& body) {
  nlohmann::json doc = body;
  doc["provenance"] = to_json(provenance);
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace cliffsim::io
