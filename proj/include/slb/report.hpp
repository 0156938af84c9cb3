#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

// Tabular output shared by the command-line front end.  Both writers format
// doubles with 12 significant digits and iterate rows in insertion order, so
// a repeated run serializes byte-for-byte identically.

namespace slb {

// monostate is the blank cell: empty CSV field, JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}
  void add_row(std::vector<Cell> row);
};

// Scalar rendering used by both writers ("%.12g" for doubles).
std::string format_cell(const Cell& cell);

void write_csv(const Table& table, std::ostream& os);

// One JSON object per row.  Non-finite doubles are serialized as strings.
void write_jsonl(const Table& table, std::ostream& os);

}  // namespace slb
