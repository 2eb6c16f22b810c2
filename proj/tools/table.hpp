#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace fpp::cli {

using Cell = std::variant<double, long long, bool, std::string>;

/// A header block plus rows, written as CSV or as one JSON object.
struct Table {
  std::vector<std::pair<std::string, std::string>> meta;  // ordered key/value pairs
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_text(const Cell& c) {
  struct Visitor {
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return csv_field(v); }
  };
  return std::visit(Visitor{}, c);
}

inline nlohmann::ordered_json to_json(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return nullptr;
      // Same 12 significant digits as the CSV form.
      return std::stod(format_number(v));
    }
    nlohmann::ordered_json operator()(long long v) const { return v; }
    nlohmann::ordered_json operator()(bool v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << "\n";
  os << "# config: " << t.config.dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << to_text(row[i]);
    os << "\n";
  }
}

inline void write_json(std::ostream& os, const Table& t) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  meta["config"] = t.config;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      r[t.columns[i]] = to_json(row[i]);
    }
    rows.push_back(std::move(r));
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["meta"] = std::move(meta);
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << "\n";
}

}  // namespace fpp::cli
