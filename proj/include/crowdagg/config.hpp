#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace crowdagg {

// Minimal TOML subset: [tables], key = value with strings, integers, floats,
// booleans, and (nested) arrays. Comments with '#'. Enough for the config
// files this tool reads; anything fancier should move to a real TOML library.
struct TomlValue {
    using Array = std::vector<TomlValue>;
    std::variant<bool, int64_t, double, std::string, Array> v;

    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_int() const { return std::holds_alternative<int64_t>(v); }
    bool is_number() const { return is_int() || std::holds_alternative<double>(v); }
    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }

    bool as_bool() const;
    int64_t as_int() const;
    double as_double() const;
    const std::string& as_string() const;
    const Array& as_array() const;
};

// Keys are dotted paths: "optimizer.learning_rate".
using TomlTable = std::map<std::string, TomlValue>;

TomlTable parse_toml(const std::string& text);       // throws ConfigError
TomlTable load_toml_file(const std::string& path);   // throws IoError/ConfigError

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace crowdagg
