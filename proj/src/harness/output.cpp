#include "dropsim/harness/output.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dropsim/errors.hpp"

namespace dropsim {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericError("format_number: conversion failed");
  return std::string(buf, ptr);
}

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw DomainError("table: row width differs from header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

Json Table::to_json() const {
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json obj = Json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::isfinite(row[c])) obj[columns[c]] = row[c];
      else obj[columns[c]] = format_number(row[c]);
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericError("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void OutputSet::write(const std::string& name, const std::string& bytes) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
  entries_.push_back({name, bytes.size(), sha256_hex(bytes)});
}

void OutputSet::record(const std::string& name) {
  const auto path = dir_ / name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read back " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  const std::string bytes = s.str();
  entries_.push_back({name, bytes.size(), sha256_hex(bytes)});
}

std::filesystem::path OutputSet::write_manifest(const std::string& scenario,
                                                std::uint64_t seed) const {
  Json m = Json::object();
  m["scenario"] = scenario;
  m["seed"] = seed;
  Json files = Json::array();
  for (const Entry& e : entries_)
    files.push_back(Json{{"file", e.name}, {"bytes", e.bytes}, {"sha256", e.sha256}});
  m["files"] = std::move(files);
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << m.dump(2) << '\n';
  return path;
}

}  // namespace dropsim
