// Copyright 2026 The Learnprof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "toml/toml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "common/error.hpp"

namespace learnprof::toml {
namespace {

using Table = Value::Table;
using Array = Value::Array;
using Origin = Value::Origin;

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Value run() {
    Value root;
    root.data = Table{};
    root.origin = Origin::kExplicitTable;
    Table* current = &root.table();
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        if (peek(1) == '[') {
          current = open_table_array(root);
        } else {
          current = open_table(root);
        }
      } else {
        parse_key_value(*current);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }

  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": " << msg;
    throw Error(ErrorCode::kParse, os.str());
  }

  bool eof() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  bool starts_with(std::string_view s) const {
    return src_.substr(pos_, s.size()) == s;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  bool at_newline() const {
    return peek() == '\n' || (peek() == '\r' && peek(1) == '\n');
  }

  void consume_newline() {
    if (peek() == '\r') ++pos_;
    ++pos_;
  }

  void skip_blank_lines() {
    while (true) {
      skip_ws();
      skip_comment();
      if (eof()) return;
      if (at_newline()) {
        consume_newline();
        continue;
      }
      return;
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() { skip_blank_lines(); }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (!at_newline()) fail("expected end of line");
    consume_newline();
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_simple_key() {
    if (peek() == '"') {
      if (starts_with("\"\"\"")) fail("multi-line strings cannot be keys");
      return parse_basic_string();
    }
    if (peek() == '\'') {
      if (starts_with("'''")) fail("multi-line strings cannot be keys");
      return parse_literal_string();
    }
    const std::size_t start = pos_;
    while (!eof() && is_bare_key_char(peek())) ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(src_.substr(start, pos_ - start));
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path;
    skip_ws();
    path.push_back(parse_simple_key());
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      skip_ws();
      path.push_back(parse_simple_key());
      skip_ws();
    }
    return path;
  }

  // Resolves an intermediate path segment used by headers; arrays of tables
  // resolve to their last element.
  Table* descend_for_header(Table& parent, const std::string& key,
                            std::size_t at) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      Value v;
      v.data = Table{};
      v.origin = Origin::kImplicitTable;
      it = parent.emplace(key, std::move(v)).first;
    }
    Value& v = it->second;
    if (v.is_table()) {
      if (v.origin == Origin::kInlineTable) {
        fail_at(at, "cannot extend inline table '" + key + "'");
      }
      return &v.table();
    }
    if (v.is_array() && v.origin == Origin::kTableArray) {
      auto& arr = std::get<Array>(v.data);
      return &arr.back().table();
    }
    fail_at(at, "key '" + key + "' is not a table");
  }

  Table* open_table(Value& root) {
    const std::size_t at = pos_;
    expect('[');
    auto path = parse_key_path();
    expect(']');
    Table* t = &root.table();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      t = descend_for_header(*t, path[i], at);
    }
    const std::string& last = path.back();
    auto it = t->find(last);
    if (it == t->end()) {
      Value v;
      v.data = Table{};
      v.origin = Origin::kExplicitTable;
      return &t->emplace(last, std::move(v)).first->second.table();
    }
    Value& v = it->second;
    if (v.is_table() && v.origin == Origin::kImplicitTable) {
      v.origin = Origin::kExplicitTable;
      return &v.table();
    }
    fail_at(at, "duplicate table '" + last + "'");
  }

  Table* open_table_array(Value& root) {
    const std::size_t at = pos_;
    expect('[');
    expect('[');
    auto path = parse_key_path();
    expect(']');
    expect(']');
    Table* t = &root.table();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      t = descend_for_header(*t, path[i], at);
    }
    const std::string& last = path.back();
    auto it = t->find(last);
    if (it == t->end()) {
      Value v;
      v.data = Array{};
      v.origin = Origin::kTableArray;
      it = t->emplace(last, std::move(v)).first;
    } else if (!(it->second.is_array() &&
                 it->second.origin == Origin::kTableArray)) {
      fail_at(at, "key '" + last + "' is already defined and is not an array of tables");
    }
    auto& arr = std::get<Array>(it->second.data);
    Value elem;
    elem.data = Table{};
    elem.origin = Origin::kExplicitTable;
    arr.push_back(std::move(elem));
    return &arr.back().table();
  }

  void parse_key_value(Table& into) {
    const std::size_t at = pos_;
    auto path = parse_key_path();
    skip_ws();
    expect('=');
    skip_ws();
    Value value = parse_value();
    Table* t = &into;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto it = t->find(path[i]);
      if (it == t->end()) {
        Value v;
        v.data = Table{};
        v.origin = Origin::kDottedTable;
        it = t->emplace(path[i], std::move(v)).first;
      } else if (!it->second.is_table() ||
                 it->second.origin == Origin::kInlineTable ||
                 it->second.origin == Origin::kExplicitTable) {
        fail_at(at, "cannot add dotted key under '" + path[i] + "'");
      }
      t = &it->second.table();
    }
    if (!t->emplace(path.back(), std::move(value)).second) {
      fail_at(at, "duplicate key '" + path.back() + "'");
    }
  }

  Value parse_value() {
    Value v;
    const char c = peek();
    if (c == '"') {
      v.data = starts_with("\"\"\"") ? parse_ml_basic_string() : parse_basic_string();
    } else if (c == '\'') {
      v.data = starts_with("'''") ? parse_ml_literal_string() : parse_literal_string();
    } else if (starts_with("true") && !is_bare_key_char(peek(4))) {
      pos_ += 4;
      v.data = true;
    } else if (starts_with("false") && !is_bare_key_char(peek(5))) {
      pos_ += 5;
      v.data = false;
    } else if (c == '[') {
      v = parse_array();
    } else if (c == '{') {
      v = parse_inline_table();
    } else if (c == '\0' || c == '\n' || c == '\r' || c == '#') {
      fail("expected a value");
    } else {
      v = parse_number();
    }
    return v;
  }

  Value parse_array() {
    expect('[');
    Array items;
    while (true) {
      skip_array_space();
      if (peek() == ']') {
        ++pos_;
        break;
      }
      if (eof()) fail("unterminated array");
      items.push_back(parse_value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    Value v;
    v.data = std::move(items);
    return v;
  }

  Value parse_inline_table() {
    expect('{');
    Value v;
    v.data = Table{};
    skip_ws();
    if (peek() == '}') {
      ++pos_;
    } else {
      while (true) {
        skip_ws();
        parse_key_value(v.table());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == '}') {
          ++pos_;
          break;
        }
        fail("expected ',' or '}' in inline table");
      }
    }
    v.origin = Origin::kInlineTable;
    return v;
  }

  std::uint32_t parse_hex_escape(int digits) {
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      const char h = peek();
      if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad unicode escape");
      cp = cp * 16 + static_cast<std::uint32_t>(
                         std::isdigit(static_cast<unsigned char>(h))
                             ? h - '0'
                             : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
      ++pos_;
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid unicode scalar");
    return cp;
  }

  void parse_escape(std::string& out) {
    ++pos_;  // backslash
    const char e = peek();
    ++pos_;
    switch (e) {
      case 'b': out.push_back('\b'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'f': out.push_back('\f'); break;
      case 'r': out.push_back('\r'); break;
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 'u': append_utf8(out, parse_hex_escape(4)); break;
      case 'U': append_utf8(out, parse_hex_escape(8)); break;
      default: --pos_; fail("invalid escape sequence");
    }
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || at_newline()) fail("unterminated string");
      const char c = peek();
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (c == '\\') {
        parse_escape(out);
      } else {
        out.push_back(c);
        ++pos_;
      }
    }
  }

  std::string parse_literal_string() {
    expect('\'');
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && !at_newline()) ++pos_;
    if (peek() != '\'') fail("unterminated literal string");
    std::string out(src_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  std::string parse_ml_basic_string() {
    pos_ += 3;
    if (at_newline()) consume_newline();
    std::string out;
    while (true) {
      if (eof()) fail("unterminated multi-line string");
      if (starts_with("\"\"\"")) {
        // Up to two quotes may sit directly before the closing delimiter.
        std::size_t run = 0;
        while (peek(run) == '"') ++run;
        if (run > 5) fail("too many quotes in multi-line string");
        out.append(run - 3, '"');
        pos_ += run;
        return out;
      }
      const char c = peek();
      if (c == '\\') {
        // Line-ending backslash trims all following whitespace.
        std::size_t look = pos_ + 1;
        while (look < src_.size() && (src_[look] == ' ' || src_[look] == '\t')) ++look;
        if (look < src_.size() && (src_[look] == '\n' || src_[look] == '\r')) {
          pos_ = look;
          while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' ||
                            peek() == '\r')) {
            ++pos_;
          }
          continue;
        }
        parse_escape(out);
        continue;
      }
      if (c == '\r' && peek(1) == '\n') {
        out.push_back('\n');
        pos_ += 2;
        continue;
      }
      out.push_back(c);
      ++pos_;
    }
  }

  std::string parse_ml_literal_string() {
    pos_ += 3;
    if (at_newline()) consume_newline();
    std::string out;
    while (true) {
      if (eof()) fail("unterminated multi-line literal string");
      if (starts_with("'''")) {
        std::size_t run = 0;
        while (peek(run) == '\'') ++run;
        if (run > 5) fail("too many quotes in multi-line literal string");
        out.append(run - 3, '\'');
        pos_ += run;
        return out;
      }
      if (peek() == '\r' && peek(1) == '\n') {
        out.push_back('\n');
        pos_ += 2;
        continue;
      }
      out.push_back(peek());
      ++pos_;
    }
  }

  Value parse_number() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '_' || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == ':')) {
      ++pos_;
    }
    std::string tok(src_.substr(start, pos_ - start));
    if (tok.empty()) fail_at(start, "expected a value");
    Value v;
    std::string body = tok;
    bool negative = false;
    if (body[0] == '+' || body[0] == '-') {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body == "inf" || body == "nan") {
      const double d = body == "inf" ? std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::quiet_NaN();
      v.data = negative ? -d : d;
      return v;
    }
    if (tok.find(':') != std::string::npos ||
        (tok.size() >= 10 && tok[4] == '-' && tok[7] == '-')) {
      fail_at(start, "date/time values are not supported");
    }
    // Underscores must sit between digits.
    std::string clean;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '_') {
        if (i == 0 || i + 1 == body.size() ||
            !std::isxdigit(static_cast<unsigned char>(body[i - 1])) ||
            !std::isxdigit(static_cast<unsigned char>(body[i + 1]))) {
          fail_at(start, "misplaced underscore in number");
        }
        continue;
      }
      clean.push_back(body[i]);
    }
    int base = 10;
    if (clean.size() > 2 && clean[0] == '0' &&
        (clean[1] == 'x' || clean[1] == 'o' || clean[1] == 'b')) {
      if (negative || tok[0] == '+') fail_at(start, "sign not allowed on prefixed integer");
      base = clean[1] == 'x' ? 16 : clean[1] == 'o' ? 8 : 2;
      clean.erase(0, 2);
    }
    const bool is_float = base == 10 && clean.find_first_of(".eE") != std::string::npos;
    if (is_float) {
      double d = 0.0;
      auto [p, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), d);
      if (ec != std::errc() || p != clean.data() + clean.size() || clean[0] == '.' ||
          clean.back() == '.') {
        fail_at(start, "invalid number '" + tok + "'");
      }
      v.data = negative ? -d : d;
      return v;
    }
    if (base == 10 && clean.size() > 1 && clean[0] == '0') {
      fail_at(start, "leading zeros are not allowed");
    }
    std::int64_t n = 0;
    auto [p, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), n, base);
    if (ec != std::errc() || p != clean.data() + clean.size() || clean.empty()) {
      fail_at(start, "invalid number '" + tok + "'");
    }
    v.data = negative ? -n : n;
    return v;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

const Value* Value::find(std::string_view dotted_path) const {
  const Value* cur = this;
  while (true) {
    if (!cur->is_table()) return nullptr;
    const auto dot = dotted_path.find('.');
    const std::string key(dotted_path.substr(0, dot));
    const auto& t = cur->table();
    auto it = t.find(key);
    if (it == t.end()) return nullptr;
    cur = &it->second;
    if (dot == std::string_view::npos) return cur;
    dotted_path.remove_prefix(dot + 1);
  }
}

const char* Value::type_name() const {
  switch (data.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    case 4: return "array";
    default: return "table";
  }
}

Value parse(std::string_view source) {
  if (source.substr(0, 3) == "\xEF\xBB\xBF") source.remove_prefix(3);
  return Parser(source).run();
}

std::string format_string(std::string_view s) {
  const bool multiline = s.find('\n') != std::string_view::npos;
  std::string out = multiline ? "\"\"\"\n" : "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += multiline ? "\n" : "\\n"; break;
      case '\t': out += "\t"; break;
      case '\r': out += "\\r"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          static constexpr char kHex[] = "0123456789ABCDEF";
          out += "\\u00";
          out.push_back(kHex[c >> 4]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out += multiline ? "\"\"\"" : "\"";
  return out;
}

}  // namespace learnprof::toml
