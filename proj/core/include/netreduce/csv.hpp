#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netreduce::csv {

/// A parsed RFC 4180 file: first row is the header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  /// Index of a required column; throws MissingColumn naming `name`.
  std::size_t require(std::string_view name, std::string_view file) const;
};

Table parse(std::string_view text, std::string_view origin = "<memory>");
Table read_file(const std::filesystem::path& path);  // FileNotFound, MalformedInput

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

/// Writes header + rows with LF line endings; throws IoError.
void write_file(const std::filesystem::path& path, const Table& table);

/// Strict decimal parse: optional sign, digits, optional fraction and
/// exponent, nothing else. No thousands separators.
std::optional<double> parse_number(std::string_view text);

}  // namespace netreduce::csv
