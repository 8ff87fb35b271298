#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smellsurv::csv {

using Row = std::vector<std::string>;

/// One parsed record plus the 1-based physical line it started on.
struct Record {
  Row fields;
  std::size_t line = 0;
};

/// RFC-4180 reader: comma separated, `"` quoting with `""` escapes, quoted
/// fields may span lines, CRLF or LF line endings. A leading UTF-8 BOM is
/// skipped. Blank lines are ignored. Throws ParseError on an unterminated
/// quote or stray characters after a closing quote.
std::vector<Record> parse(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Joins escaped fields with commas and appends `\n`.
std::string format_row(const Row& row);

}  // namespace smellsurv::csv
