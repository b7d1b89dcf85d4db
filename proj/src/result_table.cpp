#include "hawking/result_table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#ifndef HAWKING_VERSION
#define HAWKING_VERSION "0.0.0"
#endif

namespace hawking {

ResultTable::ResultTable(std::string schema, int version, std::vector<Column> columns)
    : schema_(std::move(schema)), version_(version), columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("table " + schema_ + " has no columns");
  for (const auto& c : columns_) {
    if (c.name.find_first_of(",\n\"") != std::string::npos) {
      throw std::invalid_argument("bad column name " + c.name);
    }
    if (c.name == "quality") has_quality_ = true;
  }
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  throw std::out_of_range("table " + schema_ + " has no column " + name);
}

double ResultTable::number(std::size_t row, const std::string& column) const {
  const Cell& c = rows_.at(row)[column_index(column)];
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("column " + column + " is not numeric");
}

void ResultTable::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size()) {
    throw std::invalid_argument("table " + schema_ + ": row has " + std::to_string(cells.size()) +
                                " cells, expected " + std::to_string(columns_.size()));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (const auto* d = std::get_if<double>(&cells[i]); d && !std::isfinite(*d) && !has_quality_) {
      throw std::invalid_argument("table " + schema_ + ": non-finite " + columns_[i].name +
                                  " without a quality column");
    }
    if (const auto* s = std::get_if<std::string>(&cells[i]);
        s && s->find_first_of(",\n\"") != std::string::npos) {
      throw std::invalid_argument("table " + schema_ + ": label with separator in " +
                                  columns_[i].name);
    }
  }
  rows_.push_back(std::move(cells));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

std::string ResultTable::to_csv(const std::string& hash) const {
  std::string out = "# hawking-sim table=" + schema_ + " version=" + std::to_string(version_) +
                    " config_hash=" + hash + "\n# units: ";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i].unit;
  out += "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i].name;
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out += format_number(v);
            else if constexpr (std::is_same_v<T, long long>) out += std::to_string(v);
            else out += v;
          },
          row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string config_hash(const nlohmann::json& effective_config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : effective_config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string code_version() { return HAWKING_VERSION; }

void write_table(const ResultTable& table, const Provenance& provenance,
                 const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (stem + ".csv");
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv_path.string());
    out << table.to_csv(provenance.config_hash);
  }
  nlohmann::json side;
  side["table"] = table.schema();
  side["version"] = table.version();
  side["config_hash"] = provenance.config_hash;
  side["code_version"] = provenance.code_version;
  side["wall_time_s"] = provenance.wall_time_s;
  side["rows"] = table.rows();
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : table.columns()) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  side["columns"] = cols;
  side["warnings"] = provenance.warnings;
  side["summary"] = provenance.summary;
  side["config"] = provenance.config;
  const auto side_path = dir / (stem + ".provenance.json");
  std::ofstream out(side_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + side_path.string());
  out << side.dump(2) << "\n";
}

}  // namespace hawking
