#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace emtime::harness {

/// Named numeric table; complex quantities occupy a re_ and an im_ column.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws ShapeError when the row width differs from the header.
  void add_row(std::vector<double> row);
};

/// 17 significant digits, so values round-trip bit for bit.
std::string format_number(double v);

/// Header row then one line per row, comma separated, '\n' line ends.
std::string to_csv(const Table& t);

/// {"name", "columns", "rows"}; non-finite values become strings.
nlohmann::json to_json(const Table& t);

}  // namespace emtime::harness
