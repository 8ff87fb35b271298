#include "smellsurv/csv.hpp"

#include "smellsurv/error.hpp"

namespace smellsurv::csv {

std::vector<Record> parse(std::string_view text) {
  std::vector<Record> out;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

  std::size_t line = 1;
  Record current;
  std::string field;
  bool row_has_content = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    if (row_has_content) {
      end_field();
      out.push_back(std::move(current));
    }
    current = Record{};
    field.clear();
    row_has_content = false;
  };

  while (pos < text.size()) {
    const char c = text[pos];
    if (!row_has_content) current.line = line;

    if (c == '"' && field.empty()) {
      // Quoted field.
      row_has_content = true;
      const std::size_t start = pos;
      ++pos;
      for (;;) {
        if (pos >= text.size()) throw ParseError("unterminated quoted field", start);
        const char q = text[pos];
        if (q == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
            continue;
          }
          ++pos;
          break;
        }
        if (q == '\n') ++line;
        field.push_back(q);
        ++pos;
      }
      if (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
        throw ParseError("unexpected character after closing quote", pos);
      }
      continue;
    }

    if (c == ',') {
      row_has_content = true;
      end_field();
      ++pos;
    } else if (c == '\r' || c == '\n') {
      end_row();
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      ++line;
    } else {
      row_has_content = true;
      field.push_back(c);
      ++pos;
    }
  }
  end_row();
  return out;
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

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(row[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace smellsurv::csv
