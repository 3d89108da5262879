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

// A TOML reader covering everything quiz and config files use: tables,
// arrays of tables, dotted keys, inline tables, all four string forms,
// integers, floats, booleans and arrays. Date/time values are rejected.

#ifndef LEARNPROF_TOML_TOML_HPP
#define LEARNPROF_TOML_TOML_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace learnprof::toml {

struct Value {
  using Array = std::vector<Value>;
  using Table = std::map<std::string, Value>;

  // How a table or array came to exist; governs which redefinitions are legal.
  enum class Origin : std::uint8_t {
    kLiteral,
    kImplicitTable,
    kExplicitTable,
    kDottedTable,
    kInlineTable,
    kTableArray,
  };

  std::variant<bool, std::int64_t, double, std::string, Array, Table> data;
  Origin origin = Origin::kLiteral;

  bool is_table() const { return std::holds_alternative<Table>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }

  const Table& table() const { return std::get<Table>(data); }
  Table& table() { return std::get<Table>(data); }
  const Array& array() const { return std::get<Array>(data); }
  const std::string& string() const { return std::get<std::string>(data); }
  bool boolean() const { return std::get<bool>(data); }
  std::int64_t integer() const { return std::get<std::int64_t>(data); }

  // Walks a dotted path ("prompt.prompt") through nested tables.
  const Value* find(std::string_view dotted_path) const;

  const char* type_name() const;
};

// Throws learnprof::Error(kParse) with a "line L, column C: ..." message.
Value parse(std::string_view source);

// Renders `s` as a TOML string literal. Text containing newlines becomes a
// multi-line basic string so authored code blocks stay readable.
std::string format_string(std::string_view s);

}  // namespace learnprof::toml

#endif  // LEARNPROF_TOML_TOML_HPP
