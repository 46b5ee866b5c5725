#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace qheng::cli {

/// monostate is an undefined value: an empty CSV field, null in JSON.
using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;
using Row = std::vector<Cell>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

inline constexpr const char* kJsonSchema = "qheng.table/1";

/// RFC 4180, '.' decimal separator, doubles with 17 significant digits.
void write_csv(std::ostream& os, const Table& table);

/// {"schema": "qheng.table/1", "command": ..., "columns": [...], "rows": [[...]]}
void write_json(std::ostream& os, const Table& table);

std::string format_double(double v);

}  // namespace qheng::cli
