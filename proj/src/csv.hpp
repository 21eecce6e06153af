#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lpcascade::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 records: quoted fields may contain commas, doubled quotes and
/// newlines. Blank lines are skipped. Throws InputError on an unterminated quote.
std::vector<Record> parse(std::string_view text);

/// Quotes the field if it contains a comma, quote, or line break.
std::string escape(std::string_view field);

/// Parses a decimal double, allowing surrounding blanks; false on failure.
bool parse_double(std::string_view text, double& out);

}  // namespace lpcascade::csv
