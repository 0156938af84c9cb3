#include "slb/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "slb/errors.hpp"

namespace slb {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw DomainError("report: row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_cell(const Cell& cell) {
  switch (cell.index()) {
    case 0:
      return "";
    case 1: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(cell));
      return buf;
    }
    case 2:
      return std::to_string(std::get<std::int64_t>(cell));
    case 3:
      return std::get<std::string>(cell);
    default:
      return std::get<bool>(cell) ? "true" : "false";
  }
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

void write_csv(const Table& table, std::ostream& os) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) os << ',';
    os << csv_escape(table.columns[c]);
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << csv_escape(format_cell(row[c]));
    }
    os << '\n';
  }
}

void write_jsonl(const Table& table, std::ostream& os) {
  for (const auto& row : table.rows) {
    os << '{';
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << '"' << json_escape(table.columns[c]) << "\":";
      const Cell& cell = row[c];
      switch (cell.index()) {
        case 0:
          os << "null";
          break;
        case 1:
          if (std::isfinite(std::get<double>(cell)))
            os << format_cell(cell);
          else
            os << '"' << format_cell(cell) << '"';
          break;
        case 3:
          os << '"' << json_escape(std::get<std::string>(cell)) << '"';
          break;
        default:
          os << format_cell(cell);
      }
    }
    os << "}\n";
  }
}

}  // namespace slb
