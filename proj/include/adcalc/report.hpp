#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "adcalc/core.hpp"

namespace adcalc {

// %.17g; non-finite values print as inf, -inf and nan.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Cell = std::variant<std::string, double, long long>;

inline std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::to_string(std::get<long long>(c));
}

// RFC 4180: quote fields holding a comma, quote, CR or LF; double inner quotes.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    require(row.size() == columns.size(), ErrorKind::format, "row width does not match table '" + name + "'");
    rows.push_back(std::move(row));
  }

  std::string csv() const {
    std::string out;
    auto line = [&](const auto& cells, auto text) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_field(text(cells[i]));
      }
      out += "\r\n";
    };
    line(columns, [](const std::string& s) { return s; });
    for (const auto& r : rows) line(r, [](const Cell& c) { return cell_text(c); });
    return out;
  }
};

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// measured <= tolerance
inline Check check_at_most(std::string name, double measured, double tolerance) {
  return {std::move(name), measured, tolerance, measured <= tolerance};
}

// measured >= tolerance
inline Check check_at_least(std::string name, double measured, double tolerance) {
  return {std::move(name), measured, tolerance, measured >= tolerance};
}

struct Report {
  std::string scenario;
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::map<std::string, std::string> notes;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  // {scenario, pass, checks: [{name, measured, tolerance, pass}], notes}
  // with numbers at 17 significant digits. Non-finite numbers are written as
  // the strings "inf", "-inf" or "nan".
  std::string summary_json() const {
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : nlohmann::json(format_double(v)).dump(); };
    auto str = [](const std::string& s) { return nlohmann::json(s).dump(); };
    std::ostringstream o;
    o << "{\n  \"scenario\": " << str(scenario) << ",\n  \"pass\": " << (pass() ? "true" : "false")
      << ",\n  \"checks\": [";
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& c = checks[i];
      o << (i ? ",\n" : "\n") << "    {\"name\": " << str(c.name) << ", \"measured\": " << num(c.measured)
        << ", \"tolerance\": " << num(c.tolerance) << ", \"pass\": " << (c.pass ? "true" : "false") << "}";
    }
    o << (checks.empty() ? "]" : "\n  ]");
    if (!notes.empty()) {
      o << ",\n  \"notes\": {";
      std::size_t i = 0;
      for (const auto& [k, v] : notes) o << (i++ ? ", " : "") << str(k) << ": " << str(v);
      o << "}";
    }
    o << "\n}\n";
    return o.str();
  }

  Table checks_table() const {
    Table t{"checks", {"name", "measured", "tolerance", "pass"}, {}};
    for (const auto& c : checks) t.add({c.name, c.measured, c.tolerance, std::string(c.pass ? "true" : "false")});
    return t;
  }

  // Writes summary.json, checks.csv and one CSV per table into dir.
  void write(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, ErrorKind::io, "cannot create output directory " + dir.string() + ": " + ec.message());
    auto put = [&](const std::string& file, const std::string& text) {
      std::ofstream os(dir / file, std::ios::binary | std::ios::trunc);
      require(static_cast<bool>(os), ErrorKind::io, "cannot write " + (dir / file).string());
      os << text;
    };
    put("summary.json", summary_json());
    put("checks.csv", checks_table().csv());
    for (const auto& t : tables) put(t.name + ".csv", t.csv());
  }
};

}  // namespace adcalc
