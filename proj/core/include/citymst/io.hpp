#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "citymst/geom.hpp"
#include "citymst/mst.hpp"

namespace citymst {

using CsvValue = std::variant<std::int64_t, double, std::string>;

// A header row plus data rows. Doubles are written as the shortest decimal
// that round-trips to the same binary64 value; nothing is locale-dependent.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<CsvValue>> rows;

  std::size_t column(std::string_view name) const;  // throws kInvalidArgument
  double number(std::size_t row, std::string_view name) const;
};

std::string format_double(double v);
std::string to_csv(const Table& table);
Table parse_csv(std::string_view text);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

// Point CSV: header "idx,x,y".
Table points_table(std::span<const Point2> points);
std::vector<Point2> points_from_table(const Table& table);

// Tree CSV: header "i,j,len".
Table tree_table(const WeightedTree& tree);

// Per-n moment summary of every numeric column of one or more raw tables
// (columns "n" and "rep" are keys, not summarised). Rows without an "n"
// column form a single group.
Table aggregate_raw(std::span<const Table> raws);

}  // namespace citymst
