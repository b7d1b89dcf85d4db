#pragma once

// Headered CSV tables with a sidecar provenance file.
//
// Layout of a table file:
//   # hawking-sim table=<schema> version=<n> config_hash=<16 hex digits>
//   # units: <unit of column 1>,<unit of column 2>,...
//   <name 1>,<name 2>,...
//   rows
// Numbers are written in shortest round-trip form with '.' as decimal point.
// Non-finite values are only accepted when the table has a "quality" column.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace hawking {

using Cell = std::variant<double, long long, std::string>;

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless, "-" for labels
};

class ResultTable {
 public:
  ResultTable(std::string schema, int version, std::vector<Column> columns);

  const std::string& schema() const { return schema_; }
  int version() const { return version_; }
  const std::vector<Column>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<Cell>& row(std::size_t i) const { return rows_[i]; }
  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;

  void add_row(std::vector<Cell> cells);

  std::string to_csv(const std::string& config_hash) const;

 private:
  std::string schema_;
  int version_ = 1;
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
  bool has_quality_ = false;
};

std::string format_number(double x);

// 64-bit FNV-1a of the compact JSON dump, as 16 lowercase hex digits.
std::string config_hash(const nlohmann::json& effective_config);

struct Provenance {
  std::string config_hash;
  std::string code_version;
  double wall_time_s = 0.0;
  nlohmann::json config;
  std::vector<std::string> warnings;
  nlohmann::json summary = nlohmann::json::object();
};

std::string code_version();

// Writes <dir>/<stem>.csv and <dir>/<stem>.provenance.json.
void write_table(const ResultTable& table, const Provenance& provenance,
                 const std::filesystem::path& dir, const std::string& stem);

}  // namespace hawking
