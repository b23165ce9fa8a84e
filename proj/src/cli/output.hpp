#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace gbsc::cli {

// Shortest decimal form that round-trips; "nan"/"inf" are never produced
// for finite input.
std::string format_double(double value);

// A cell of a result table. std::monostate is an undefined value: an empty
// CSV field, null in JSON.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  // Throws std::logic_error when the row width differs from the header.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  // Header line plus one line per row, '\n' terminated. Strings containing
  // a comma, quote or newline are quoted.
  std::string to_csv() const;

  // {"columns": [...], "rows": [[...], ...]}
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// Serialized JSON with a trailing newline.
std::string dump_json(const nlohmann::ordered_json& value);

// Output files staged in memory and published together. commit() writes
// every file to a temporary next to its destination and only renames once
// all writes succeeded, so a failed run leaves no partial artifacts.
class ArtifactSet {
 public:
  void add(std::string name, std::string content);

  std::vector<std::string> names() const;

  // Throws std::runtime_error on I/O failure after removing its temporaries.
  void commit(const std::filesystem::path& out_dir) const;

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string sha256_hex(std::string_view bytes);

}  // namespace gbsc::cli
