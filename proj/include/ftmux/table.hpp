#pragma once

// Self-describing result tables written as CSV (with '#' comment header) or
// JSON, and read back for plotting.

#include <cstdio>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ftmux/errors.hpp"
#include "json.hpp"

namespace ftmux {

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::string command;
  std::vector<std::string> comments;  ///< written as '# ' lines, in order
  nlohmann::json config;              ///< effective configuration
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
  std::ostringstream out;
  out << "# command: " << t.command << '\n';
  out << "# config: " << t.config.dump() << '\n';
  for (const auto& c : t.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

inline std::string to_json_text(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
    rows.push_back(std::move(obj));
  }
  nlohmann::json doc = {
      {"command", t.command}, {"config", t.config}, {"notes", t.comments}, {"columns", t.columns}, {"rows", rows}};
  return doc.dump(2) + "\n";
}

/// Column-oriented view of a CSV produced by to_csv().
struct ParsedCsv {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline ParsedCsv parse_csv(const std::string& text) {
  ParsedCsv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      csv.comments.push_back(line);
      continue;
    }
    auto cells = split_csv_line(line);
    if (csv.columns.empty()) {
      csv.columns = std::move(cells);
    } else {
      if (cells.size() != csv.columns.size()) throw ConfigError("CSV row has " + std::to_string(cells.size()) +
                                                                " cells, header has " +
                                                                std::to_string(csv.columns.size()));
      csv.rows.push_back(std::move(cells));
    }
  }
  return csv;
}

}  // namespace ftmux
