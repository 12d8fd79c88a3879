#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

namespace matgraph {

/// A property value / Cypher literal: 64-bit integer, double, boolean or
/// UTF-8 string. Wraps the variant so that `Value("x")` builds a string
/// instead of decaying const char* to bool.
class Value {
public:
    enum class Type { Int, Float, Bool, String };

    Value() : v_(std::int64_t{0}) {}
    Value(std::int64_t i) : v_(i) {}
    Value(int i) : v_(std::int64_t{i}) {}
    Value(double d) : v_(d) {}
    Value(bool b) : v_(b) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(std::string_view s) : v_(std::string(s)) {}
    Value(const char* s) : v_(std::string(s)) {}

    Type type() const noexcept { return static_cast<Type>(v_.index()); }
    bool is_int() const noexcept { return type() == Type::Int; }
    bool is_float() const noexcept { return type() == Type::Float; }
    bool is_bool() const noexcept { return type() == Type::Bool; }
    bool is_string() const noexcept { return type() == Type::String; }
    bool is_numeric() const noexcept { return is_int() || is_float(); }

    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_float() const { return std::get<double>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const std::string& as_string() const { return std::get<std::string>(v_); }

    /// Equality is structural: int 1 and float 1.0 are different values.
    friend bool operator==(const Value&, const Value&) = default;

private:
    std::variant<std::int64_t, double, bool, std::string> v_;
};

using PropertyMap = std::map<std::string, Value>;

}  // namespace matgraph
