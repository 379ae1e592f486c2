#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace dropsim {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips, '.' separator, locale-free.
std::string format_number(double v);

/// Rectangular numeric table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  /// Header row then one line per row, comma separated, LF endings.
  std::string to_csv() const;
  /// Array of objects keyed by column name, in column order.
  Json to_json() const;
};

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Collects the files of one run and writes them with a digest manifest.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);

  /// Writes bytes as-is (no newline translation) and records the digest.
  void write(const std::string& name, const std::string& bytes);
  /// Records a file something else already wrote inside the directory.
  void record(const std::string& name);
  /// manifest.json: scenario, seed and every file with size and sha256.
  std::filesystem::path write_manifest(const std::string& scenario, std::uint64_t seed) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Entry {
    std::string name;
    std::uintmax_t bytes;
    std::string sha256;
  };
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

}  // namespace dropsim
