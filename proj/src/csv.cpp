#include "csv.hpp"

#include <charconv>
#include <sstream>

#include "lpcascade/error.hpp"

namespace lpcascade::csv {

std::vector<Record> parse(std::string_view text) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool record_has_content = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(field);
    field.clear();
  };
  auto end_record = [&] {
    if (record_has_content || !current.fields.empty()) {
      end_field();
      records.push_back(std::move(current));
    }
    current = Record{};
    field.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!record_has_content) current.line = line;
        in_quotes = true;
        quote_line = line;
        record_has_content = true;
        break;
      case ',':
        if (!record_has_content) current.line = line;
        record_has_content = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        current.line = line;
        break;
      default:
        if (!record_has_content) current.line = line;
        if (c != ' ' && c != '\t') record_has_content = true;
        field.push_back(c);
        break;
    }
  }
  if (in_quotes) {
    std::ostringstream msg;
    msg << "csv: unterminated quoted field starting on line " << quote_line;
    throw InputError(msg.str());
  }
  end_record();
  return records;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace lpcascade::csv
