#include "mgafem/toml_lite.hpp"

#include <charconv>
#include <set>
#include <string>

namespace mgafem::toml {

const Value* Table::find(std::string_view key) const
{
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (keys[i] == key)
            return &values[i];
    return nullptr;
}

Value* Table::find(std::string_view key)
{
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (keys[i] == key)
            return &values[i];
    return nullptr;
}

double Value::as_number() const
{
    if (is_integer())
        return static_cast<double>(std::get<std::int64_t>(data));
    return std::get<double>(data);
}

std::string_view Value::type_name() const
{
    switch (data.index()) {
    case 0:
        return "string";
    case 1:
        return "integer";
    case 2:
        return "float";
    case 3:
        return "boolean";
    case 4:
        return "array";
    default:
        return "table";
    }
}

ParseError::ParseError(std::string_view source, int line, int column, const std::string& message)
    : InputError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line)
{
}

namespace {

class Parser {
public:
    Parser(std::string_view text, std::string_view source) : text_(text), source_(source) {}

    Table parse_document()
    {
        Table root;
        Table* current = &root;
        while (true) {
            skip_blank_lines();
            if (at_end())
                break;
            if (peek() == '[') {
                current = parse_header(root);
            } else {
                parse_key_value(*current);
            }
            expect_line_end();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(source_, line_, column(), message); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
    int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

    void advance()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            line_start_ = pos_ + 1;
        }
        ++pos_;
    }

    void skip_spaces()
    {
        while (!at_end() && (peek() == ' ' || peek() == '\t'))
            advance();
    }

    void skip_comment()
    {
        if (peek() == '#')
            while (!at_end() && peek() != '\n')
                advance();
    }

    void skip_blank_lines()
    {
        while (!at_end()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\r')
                advance();
            if (peek() == '\n')
                advance();
            else
                break;
        }
    }

    // Whitespace, comments and newlines inside arrays.
    void skip_array_space()
    {
        while (!at_end()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n' || peek() == '\r')
                advance();
            else
                break;
        }
    }

    void expect_line_end()
    {
        skip_spaces();
        skip_comment();
        if (peek() == '\r')
            advance();
        if (at_end())
            return;
        if (peek() != '\n')
            fail("unexpected '" + std::string(1, peek()) + "' after value");
        advance();
    }

    std::string parse_key()
    {
        if (peek() == '"')
            return parse_string();
        std::string key;
        while (!at_end()) {
            const char c = peek();
            if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-') {
                key.push_back(c);
                advance();
            } else {
                break;
            }
        }
        if (key.empty())
            fail("expected a key");
        return key;
    }

    Table* parse_header(Table& root)
    {
        advance();  // [
        const bool array_of_tables = peek() == '[';
        if (array_of_tables)
            advance();
        skip_spaces();
        std::vector<std::string> path;
        while (true) {
            path.push_back(parse_key());
            skip_spaces();
            if (peek() == '.') {
                advance();
                skip_spaces();
                continue;
            }
            break;
        }
        const int header_line = line_;
        const int header_col = column();
        if (peek() != ']')
            fail("expected ']' to close the table header");
        advance();
        if (array_of_tables) {
            if (peek() != ']')
                fail("expected ']]' to close the array-of-tables header");
            advance();
        }

        Table* table = &root;
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            table = descend(*table, path[i], header_line, header_col);
        const std::string& last = path.back();
        Value* existing = table->find(last);
        if (array_of_tables) {
            if (!existing) {
                table->keys.push_back(last);
                table->values.push_back(Value{Array{}, header_line, header_col});
                existing = &table->values.back();
            }
            if (!existing->is_array())
                fail("'" + last + "' is already defined as a " + std::string(existing->type_name()));
            auto& array = std::get<Array>(existing->data);
            array.push_back(Value{Table{}, header_line, header_col});
            return &std::get<Table>(array.back().data);
        }
        std::string joined;
        for (const std::string& part : path)
            joined += part + ".";
        if (!defined_tables_.insert(joined).second)
            throw ParseError(source_, header_line, header_col, "table '" + last + "' defined twice");
        if (existing) {
            if (!existing->is_table())
                fail("'" + last + "' is already defined as a " + std::string(existing->type_name()));
        } else {
            table->keys.push_back(last);
            table->values.push_back(Value{Table{}, header_line, header_col});
            existing = &table->values.back();
        }
        return &std::get<Table>(existing->data);
    }

    Table* descend(Table& table, const std::string& key, int line, int col)
    {
        Value* v = table.find(key);
        if (!v) {
            table.keys.push_back(key);
            table.values.push_back(Value{Table{}, line, col});
            v = &table.values.back();
        }
        if (v->is_array() && !v->as_array().empty() && v->as_array().back().is_table())
            return &std::get<Table>(std::get<Array>(v->data).back().data);
        if (!v->is_table())
            fail("'" + key + "' is not a table");
        return &std::get<Table>(v->data);
    }

    void parse_key_value(Table& table)
    {
        const int key_line = line_;
        const int key_col = column();
        std::string key = parse_key();
        skip_spaces();
        if (peek() != '=')
            fail("expected '=' after key '" + key + "'");
        advance();
        skip_spaces();
        Value value = parse_value();
        if (table.find(key))
            throw ParseError(source_, key_line, key_col, "duplicate key '" + key + "'");
        table.keys.push_back(std::move(key));
        table.values.push_back(std::move(value));
    }

    Value parse_value()
    {
        Value v;
        v.line = line_;
        v.column = column();
        const char c = peek();
        if (c == '"') {
            v.data = parse_string();
        } else if (c == '[') {
            v.data = parse_array();
        } else if (c == '{') {
            v.data = parse_inline_table();
        } else if (text_.substr(pos_).starts_with("true")) {
            for (int i = 0; i < 4; ++i)
                advance();
            v.data = true;
        } else if (text_.substr(pos_).starts_with("false")) {
            for (int i = 0; i < 5; ++i)
                advance();
            v.data = false;
        } else if (c == '+' || c == '-' || (c >= '0' && c <= '9') || c == 'i' || c == 'n') {
            parse_number(v);
        } else {
            fail(at_end() || c == '\n' ? std::string("missing value") : "unexpected '" + std::string(1, c) + "'");
        }
        return v;
    }

    std::string parse_string()
    {
        advance();  // opening quote
        std::string out;
        while (true) {
            if (at_end() || peek() == '\n')
                fail("unterminated string");
            const char c = peek();
            advance();
            if (c == '"')
                return out;
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            const char e = peek();
            advance();
            switch (e) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            default: fail("unsupported escape '\\" + std::string(1, e) + "'");
            }
        }
    }

    void parse_number(Value& v)
    {
        const std::size_t start = pos_;
        while (!at_end()) {
            const char c = peek();
            if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E' || c == '_' ||
                c == 'i' || c == 'n' || c == 'f' || c == 'a')
                advance();
            else
                break;
        }
        std::string token;
        for (char c : text_.substr(start, pos_ - start))
            if (c != '_')
                token.push_back(c);
        const char* first = token.data();
        const char* last = token.data() + token.size();
        if (!token.empty() && token[0] == '+')
            ++first;
        const bool is_float = token.find_first_of(".eEin") != std::string::npos;
        if (!is_float) {
            std::int64_t value = 0;
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec == std::errc{} && ptr == last) {
                v.data = value;
                return;
            }
        } else {
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec == std::errc{} && ptr == last) {
                v.data = value;
                return;
            }
        }
        throw ParseError(source_, v.line, v.column, "invalid number '" + token + "'");
    }

    Array parse_array()
    {
        advance();  // [
        Array out;
        while (true) {
            skip_array_space();
            if (peek() == ']') {
                advance();
                return out;
            }
            out.push_back(parse_value());
            skip_array_space();
            if (peek() == ',') {
                advance();
                continue;
            }
            if (peek() == ']') {
                advance();
                return out;
            }
            fail("expected ',' or ']' in array");
        }
    }

    Table parse_inline_table()
    {
        advance();  // {
        Table out;
        skip_spaces();
        if (peek() == '}') {
            advance();
            return out;
        }
        while (true) {
            skip_spaces();
            parse_key_value(out);
            skip_spaces();
            if (peek() == ',') {
                advance();
                continue;
            }
            if (peek() == '}') {
                advance();
                return out;
            }
            fail("expected ',' or '}' in inline table");
        }
    }

    std::string_view text_;
    std::string_view source_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    int line_ = 1;
    std::set<std::string> defined_tables_;
};

}  // namespace

Table parse(std::string_view text, std::string_view source)
{
    Parser parser(text, source);
    return parser.parse_document();
}

}  // namespace mgafem::toml
