#pragma once

#include "mgafem/mesh.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

/// Reader for the TOML subset used by experiment configs: [tables],
/// [[arrays.of.tables]], key = value with strings, integers, floats,
/// booleans, (multi-line) arrays and inline tables. Every value remembers
/// its source line for diagnostics.
namespace mgafem::toml {

struct Value;

struct Table {
    std::vector<std::string> keys;
    std::vector<Value> values;

    const Value* find(std::string_view key) const;
    Value* find(std::string_view key);
};

using Array = std::vector<Value>;

struct Value {
    std::variant<std::string, std::int64_t, double, bool, Array, Table> data;
    int line = 0;
    int column = 0;

    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
    bool is_number() const { return is_integer() || std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
    bool is_table() const { return std::holds_alternative<Table>(data); }

    const std::string& as_string() const { return std::get<std::string>(data); }
    double as_number() const;
    const Array& as_array() const { return std::get<Array>(data); }
    const Table& as_table() const { return std::get<Table>(data); }
    std::string_view type_name() const;
};

/// Error with the source position baked into the message.
class ParseError : public InputError {
public:
    ParseError(std::string_view source, int line, int column, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

/// Parses a whole document into its root table.
Table parse(std::string_view text, std::string_view source = "<config>");

}  // namespace mgafem::toml
