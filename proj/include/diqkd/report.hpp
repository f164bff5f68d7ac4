#pragma once

// Machine-readable report emission. Hand-rolled writers keep the contract
// explicit: stable key order, 17 significant digits for doubles (lossless
// round-trip), LF line endings, no locale dependence.

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace diqkd {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Flat ordered JSON object builder; values are emitted in insertion order.
class JsonWriter {
 public:
  JsonWriter& field(std::string_view key, double v) { return raw(key, format_number(v)); }
  JsonWriter& field(std::string_view key, long long v) { return raw(key, std::to_string(v)); }
  JsonWriter& field(std::string_view key, bool v) { return raw(key, v ? "true" : "false"); }
  JsonWriter& field(std::string_view key, std::string_view v) {
    std::string quoted = "\"";
    for (char c : v) {
      if (c == '"' || c == '\\') quoted += '\\';
      quoted += c;
    }
    quoted += '"';
    return raw(key, quoted);
  }
  JsonWriter& object(std::string_view key, const JsonWriter& inner) {
    return raw(key, inner.str());
  }

  std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) out += ",";
      out += parts_[i];
    }
    out += "}";
    return out;
  }

 private:
  JsonWriter& raw(std::string_view key, std::string_view value) {
    std::string p = "\"";
    p += key;
    p += "\":";
    p += value;
    parts_.push_back(std::move(p));
    return *this;
  }
  std::vector<std::string> parts_;
};

inline constexpr int kReportSchemaVersion = 1;

// CSV: comma separators, header row, LF endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  std::string header_line() const { return join(header_); }

  std::string row(const std::vector<std::string>& cells) const { return join(cells); }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ",";
      out += cells[i];
    }
    out += "\n";
    return out;
  }
  std::vector<std::string> header_;
};

}  // namespace diqkd
