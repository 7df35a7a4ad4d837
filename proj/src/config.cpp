#include "crowdagg/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "crowdagg/errors.hpp"

namespace crowdagg {

bool TomlValue::as_bool() const {
    if (!is_bool()) raise(ErrorCode::ConfigError, "expected a boolean value");
    return std::get<bool>(v);
}

int64_t TomlValue::as_int() const {
    if (is_int()) return std::get<int64_t>(v);
    raise(ErrorCode::ConfigError, "expected an integer value");
}

double TomlValue::as_double() const {
    if (is_int()) return static_cast<double>(std::get<int64_t>(v));
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    raise(ErrorCode::ConfigError, "expected a numeric value");
}

const std::string& TomlValue::as_string() const {
    if (!is_string()) raise(ErrorCode::ConfigError, "expected a string value");
    return std::get<std::string>(v);
}

const TomlValue::Array& TomlValue::as_array() const {
    if (!is_array()) raise(ErrorCode::ConfigError, "expected an array value");
    return std::get<Array>(v);
}

namespace {

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    size_t line = 1;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    char take() {
        char c = s[pos++];
        if (c == '\n') ++line;
        return c;
    }

    [[noreturn]] void fail(const std::string& what) const {
        raise(ErrorCode::ConfigError, "config line " + std::to_string(line) + ": " + what);
    }

    void skip_inline_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) take();
    }

    void skip_ws_and_comments() {
        while (!done()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else if (c == '#') {
                while (!done() && peek() != '\n') take();
            } else {
                break;
            }
        }
    }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string parse_basic_string(Cursor& cur) {
    cur.take();  // opening quote
    std::string out;
    while (true) {
        if (cur.done()) cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"') break;
        if (c == '\n') cur.fail("newline in string");
        if (c == '\\') {
            if (cur.done()) cur.fail("unterminated escape");
            char e = cur.take();
            switch (e) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                default: cur.fail(std::string("unsupported escape \\") + e);
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

TomlValue parse_value(Cursor& cur);

TomlValue parse_array(Cursor& cur) {
    cur.take();  // '['
    TomlValue::Array items;
    while (true) {
        cur.skip_ws_and_comments();
        if (cur.done()) cur.fail("unterminated array");
        if (cur.peek() == ']') {
            cur.take();
            break;
        }
        items.push_back(parse_value(cur));
        cur.skip_ws_and_comments();
        if (cur.done()) cur.fail("unterminated array");
        if (cur.peek() == ',') {
            cur.take();
        } else if (cur.peek() != ']') {
            cur.fail("expected ',' or ']' in array");
        }
    }
    return TomlValue{std::move(items)};
}

TomlValue parse_scalar(Cursor& cur) {
    std::string token;
    while (!cur.done()) {
        char c = cur.peek();
        if (c == '\n' || c == '\r' || c == '#' || c == ',' || c == ']' || c == ' ' || c == '\t')
            break;
        token.push_back(cur.take());
    }
    if (token.empty()) cur.fail("missing value");
    if (token == "true") return TomlValue{true};
    if (token == "false") return TomlValue{false};

    const bool looks_float = token.find_first_of(".eE") != std::string::npos &&
                             token.find_first_not_of("+-0123456789.eE") == std::string::npos;
    try {
        size_t used = 0;
        if (!looks_float) {
            int64_t i = std::stoll(token, &used);
            if (used == token.size()) return TomlValue{i};
        }
        double d = std::stod(token, &used);
        if (used == token.size()) return TomlValue{d};
    } catch (const std::exception&) {
        // fall through
    }
    cur.fail("cannot parse value '" + token + "'");
}

TomlValue parse_value(Cursor& cur) {
    cur.skip_inline_ws();
    if (cur.done()) cur.fail("missing value");
    char c = cur.peek();
    if (c == '"') return TomlValue{parse_basic_string(cur)};
    if (c == '[') return parse_array(cur);
    return parse_scalar(cur);
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    Cursor cur{text};
    std::string section;

    while (true) {
        cur.skip_ws_and_comments();
        if (cur.done()) break;
        char c = cur.peek();
        if (c == '[') {
            cur.take();
            std::string name;
            while (!cur.done() && cur.peek() != ']') {
                char k = cur.take();
                if (k == '\n') cur.fail("unterminated section header");
                name.push_back(k);
            }
            if (cur.done()) cur.fail("unterminated section header");
            cur.take();  // ']'
            if (name.empty()) cur.fail("empty section name");
            section = name;
            continue;
        }
        std::string key;
        while (!cur.done() && is_bare_key_char(cur.peek())) key.push_back(cur.take());
        if (key.empty()) cur.fail("expected a key");
        cur.skip_inline_ws();
        if (cur.done() || cur.peek() != '=') cur.fail("expected '=' after key '" + key + "'");
        cur.take();
        TomlValue value = parse_value(cur);
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.count(full)) cur.fail("duplicate key '" + full + "'");
        table.emplace(full, std::move(value));
    }
    return table;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
    out << text;
    if (!out) raise(ErrorCode::IoError, "failed writing '" + path + "'");
}

TomlTable load_toml_file(const std::string& path) { return parse_toml(read_text_file(path)); }

}  // namespace crowdagg
