#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "matgraph/ast.hpp"

namespace matgraph {

enum class TokenKind : std::uint8_t {
    KwMatch,
    KwCreate,
    KwWhere,
    KwReturn,
    KwLimit,
    KwAnd,
    KwTrue,
    KwFalse,
    Ident,
    Int,
    Float,
    String,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    DotDot,
    Star,
    Minus,
    Arrow,   // ->
    LArrow,  // <-
    Eq,      // =
    Ne,      // <>
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
};

std::string_view token_kind_name(TokenKind kind);

/// `text` holds the unescaped content for String tokens and the raw lexeme
/// otherwise. `offset`/`length` cover the raw lexeme in the source.
struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;
    std::size_t offset = 0;
    std::size_t length = 0;
};

/// Lex the whole input. Keywords are case-insensitive; identifiers keep
/// their case. The final token is always Eof. Throws ParseError on an
/// illegal character or an unterminated string.
std::vector<Token> tokenize(std::string_view text);

/// Parse one query. Enforces the clause shape (CREATE alone, or
/// MATCH [WHERE] RETURN [LIMIT]) and that every referenced variable is
/// bound by a pattern. Throws ParseError with a byte offset on failure.
QueryAst parse(std::string_view text);

/// Canonical source form; parse(pretty_print(ast)) == ast.
std::string pretty_print(const QueryAst& ast);

/// Literal syntax for a value: 42, 1.5, true, 'it''s'.
std::string pretty_print(const Value& literal);

/// Source form of one comparison, e.g. `a.age > 30`.
std::string pretty_print(const Comparison& comparison);

/// Source form of one pattern path, e.g. `(a)-[:R]->(b)`.
std::string pretty_print(const PatternPath& path);

/// Stable indented rendering for golden tests.
std::string dump_ast(const QueryAst& ast);

}  // namespace matgraph
