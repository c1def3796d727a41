#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoclust {

// Minimal RFC 4180 table; the first record is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
  std::optional<std::size_t> find_column(const std::string& name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::filesystem::path& path);

// Quotes a field when it contains commas, quotes or newlines.
std::string csv_escape(const std::string& field);

// Locale-independent "%.<precision>g" formatting.
std::string format_double(double v, int precision = 12);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

}  // namespace geoclust
