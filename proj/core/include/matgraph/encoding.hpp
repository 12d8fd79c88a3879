#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace matgraph {

/// Percent-encode arbitrary bytes. The RFC 3986 unreserved set
/// (ALPHA / DIGIT / "-" / "." / "_" / "~") stays literal; everything else
/// becomes %XX with uppercase hex.
std::string percent_encode(std::string_view raw);

/// Inverse of percent_encode; accepts lower- and uppercase hex.
/// Throws Error on a truncated or malformed escape.
std::string percent_decode(std::string_view encoded);

/// Shortest decimal form that round-trips through parse_double.
/// May use scientific notation (1e+300).
std::string format_double(double value);

/// Shortest *fixed* decimal form that round-trips, always containing a '.'
/// so the text lexes as a float literal.
std::string format_double_fixed(double value);

/// Full-string strtod-style parse; throws Error when the text is not
/// exactly one floating-point number.
double parse_double(std::string_view text);

/// Full-string signed 64-bit integer parse; throws Error on junk/overflow.
std::int64_t parse_int(std::string_view text);

/// Full-string unsigned 64-bit integer parse; throws Error on junk/overflow.
std::uint64_t parse_uint(std::string_view text);

/// True when `name` is a Cypher identifier: [A-Za-z_][A-Za-z0-9_]*.
bool is_identifier(std::string_view name);

}  // namespace matgraph
