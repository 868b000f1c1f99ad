#pragma once

#include <string>
#include <vector>

#include "mua/competitive.hpp"

namespace mua::cli {

// Half-to-even rounding with trailing zeros dropped (2.40 -> 2.4).
std::string shown(const Rational& x, int places);
// "[lo - hi]", or the single value when lo == hi.
std::string shown(const Interval& r, int places);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> rules;  // horizontal rule before these rows
};

std::string render(const Table& t);

// "a", "a,b" or "a:d" for names[first..last].
std::string run_label(const std::vector<std::string>& names, std::size_t first, std::size_t last);

// Agents x objects table. Consecutive objects whose columns agree (cells
// and capacity) share one column; consecutive agents whose rows agree
// share one row. `extra` adds trailing per-agent columns.
struct MatrixView {
  std::vector<std::vector<std::string>> cells;  // [agent][object]
  std::vector<std::string> extra_header;
  std::vector<std::vector<std::string>> extra;  // [agent][column]
  bool totals = false;                          // column totals and q rows
  std::vector<std::string> column_totals;
  std::vector<std::string> footer_label;        // extra per-object rows
  std::vector<std::vector<std::string>> footer;
};

Table matrix_table(const Instance& inst, const MatrixView& view);

}  // namespace mua::cli
