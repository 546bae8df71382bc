#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vru {

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF. Blank lines are
// skipped. An input without a header line is a SchemaError.
CsvDocument parse_csv(std::string_view text);
CsvDocument read_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

// Six significant digits, shortest form: 0.123456789 -> "0.123457", 693 -> "693".
std::string format_number(double value);
std::string format_cell(const Cell& cell);

// Serializes with '\n' line endings; fields containing ',', '"' or newlines
// are quoted.
std::string to_csv(const Table& table);
void emit_table(const Table& table, const std::filesystem::path& path);

}  // namespace vru
