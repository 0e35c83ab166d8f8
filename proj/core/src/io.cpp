#include "citymst/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "citymst/error.hpp"
#include "citymst/stats.hpp"

namespace citymst {

namespace {

std::string format_value(const CsvValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  return std::get<std::string>(v);
}

CsvValue parse_value(std::string_view field) {
  if (field.empty()) return std::string{};
  std::int64_t i = 0;
  const auto* end = field.data() + field.size();
  if (auto [p, ec] = std::from_chars(field.data(), end, i); ec == std::errc{} && p == end) return i;
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(field.data(), end, d); ec == std::errc{} && p == end) return d;
  return std::string(field);
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool is_number(const CsvValue& v) { return !std::holds_alternative<std::string>(v); }

double as_double(const CsvValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nan("");
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, fmt::format("no column named '{}'", name));
}

double Table::number(std::size_t row, std::string_view name) const {
  return as_double(rows.at(row).at(column(name)));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_value(row[c]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(std::string_view text) {
  Table table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (table.columns.empty()) {
      for (const auto f : fields) table.columns.emplace_back(f);
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw Error(ErrorCode::kParseError, fmt::format("CSV line {} has {} fields, header has {}",
                                                      line_no, fields.size(), table.columns.size()));
    }
    auto& row = table.rows.emplace_back();
    row.reserve(fields.size());
    for (const auto f : fields) row.push_back(parse_value(f));
  }
  return table;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("cannot open {} for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("failed writing {}", path.string()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  write_text(path, to_csv(table));
}

Table read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

Table points_table(std::span<const Point2> points) {
  Table t{{"idx", "x", "y"}, {}};
  t.rows.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    t.rows.push_back({static_cast<std::int64_t>(k), points[k].x, points[k].y});
  }
  return t;
}

std::vector<Point2> points_from_table(const Table& table) {
  const auto cx = table.column("x");
  const auto cy = table.column("y");
  std::vector<Point2> points;
  points.reserve(table.rows.size());
  for (const auto& row : table.rows) points.push_back({as_double(row[cx]), as_double(row[cy])});
  return points;
}

Table tree_table(const WeightedTree& tree) {
  Table t{{"i", "j", "len"}, {}};
  t.rows.reserve(tree.edges().size());
  for (const auto& e : tree.edges()) {
    t.rows.push_back({static_cast<std::int64_t>(e.i), static_cast<std::int64_t>(e.j), e.len});
  }
  return t;
}

Table aggregate_raw(std::span<const Table> raws) {
  if (raws.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to aggregate");
  const auto& columns = raws.front().columns;
  for (const auto& t : raws) {
    if (t.columns != columns) {
      throw Error(ErrorCode::kInvalidArgument, "raw tables have different headers");
    }
  }
  std::optional<std::size_t> key;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == "n") key = c;
  }
  // Numeric columns: every value numeric (blank cells are skipped).
  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == "n" || columns[c] == "rep") continue;
    bool numeric = false;
    bool text = false;
    for (const auto& t : raws) {
      for (const auto& row : t.rows) {
        const auto* s = std::get_if<std::string>(&row[c]);
        if (s == nullptr) numeric = true;
        else if (!s->empty()) text = true;
      }
    }
    if (numeric && !text) value_cols.push_back(c);
  }

  std::map<std::int64_t, std::vector<MomentAccumulator>> groups;
  for (const auto& t : raws) {
    for (const auto& row : t.rows) {
      const std::int64_t g = key ? static_cast<std::int64_t>(as_double(row[*key])) : 0;
      auto& accs = groups[g];
      accs.resize(value_cols.size());
      for (std::size_t v = 0; v < value_cols.size(); ++v) {
        if (is_number(row[value_cols[v]])) accs[v].add(as_double(row[value_cols[v]]));
      }
    }
  }

  Table out;
  out.columns.push_back(key ? "n" : "group");
  out.columns.push_back("rows");
  for (const auto c : value_cols) {
    for (const char* stat : {"mean", "var", "stderr", "min", "max"}) {
      out.columns.push_back(columns[c] + "_" + stat);
    }
  }
  for (const auto& [g, accs] : groups) {
    auto& row = out.rows.emplace_back();
    row.push_back(g);
    std::int64_t rows = 0;
    for (const auto& a : accs) rows = std::max(rows, a.count());
    row.push_back(rows);
    for (const auto& a : accs) {
      const auto e = a.estimate();
      row.insert(row.end(), {e.mean, e.variance, e.stderr_mean, e.min, e.max});
    }
  }
  return out;
}

}  // namespace citymst
