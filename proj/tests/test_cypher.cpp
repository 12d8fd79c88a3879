#include <doctest.h>

#include <string>
#include <vector>

#include "matgraph/cypher.hpp"
#include "matgraph/error.hpp"

using namespace matgraph;

namespace {

void check_roundtrip(const std::string& query, const std::string& canonical) {
    CAPTURE(query);
    const QueryAst ast = parse(query);
    CHECK(pretty_print(ast) == canonical);
    // The canonical form is a fixed point.
    CHECK(pretty_print(parse(canonical)) == canonical);
}

void check_error(const std::string& query, const std::string& message, std::size_t offset) {
    CAPTURE(query);
    try {
        parse(query);
        FAIL_CHECK("expected ParseError for: " << query);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()) == message);
        CHECK(e.offset() == offset);
    }
}

}  // namespace

TEST_CASE("tokenizer basics") {
    const auto tokens = tokenize("MATCH (n)");
    REQUIRE(tokens.size() == 5);
    CHECK(tokens[0].kind == TokenKind::KwMatch);
    CHECK(tokens[1].kind == TokenKind::LParen);
    CHECK(tokens[2].kind == TokenKind::Ident);
    CHECK(tokens[2].text == "n");
    CHECK(tokens[3].kind == TokenKind::RParen);
    CHECK(tokens[4].kind == TokenKind::Eof);
    CHECK(tokens[2].offset == 7);
    CHECK(tokens[2].length == 1);
}

TEST_CASE("tokenizer unescapes doubled quotes") {
    const auto tokens = tokenize("'it''s'");
    REQUIRE(tokens.size() == 2);
    CHECK(tokens[0].kind == TokenKind::String);
    CHECK(tokens[0].text == "it's");
    CHECK(tokens[0].length == 7);
}

TEST_CASE("tokenizer splits hop ranges") {
    const auto tokens = tokenize("[*1..3]");
    const TokenKind kinds[] = {TokenKind::LBracket, TokenKind::Star, TokenKind::Int,
                               TokenKind::DotDot,   TokenKind::Int,  TokenKind::RBracket,
                               TokenKind::Eof};
    REQUIRE(tokens.size() == 7);
    for (std::size_t i = 0; i < tokens.size(); ++i) CHECK(tokens[i].kind == kinds[i]);
    CHECK(tokens[2].text == "1");
    CHECK(tokens[4].text == "3");
}

TEST_CASE("tokenizer handles comparison operators and floats") {
    const auto tokens = tokenize("a.b <> 1.5 <= >= < > =");
    const TokenKind kinds[] = {TokenKind::Ident, TokenKind::Dot, TokenKind::Ident,
                               TokenKind::Ne,    TokenKind::Float, TokenKind::Le,
                               TokenKind::Ge,    TokenKind::Lt,  TokenKind::Gt,
                               TokenKind::Eq,    TokenKind::Eof};
    REQUIRE(tokens.size() == 11);
    for (std::size_t i = 0; i < tokens.size(); ++i) CHECK(tokens[i].kind == kinds[i]);
    CHECK(tokens[4].text == "1.5");
}

TEST_CASE("tokenizer keywords are case-insensitive, identifiers keep case") {
    const auto tokens = tokenize("match Match CREATE Name trUe");
    CHECK(tokens[0].kind == TokenKind::KwMatch);
    CHECK(tokens[1].kind == TokenKind::KwMatch);
    CHECK(tokens[2].kind == TokenKind::KwCreate);
    CHECK(tokens[3].kind == TokenKind::Ident);
    CHECK(tokens[3].text == "Name");
    CHECK(tokens[4].kind == TokenKind::KwTrue);
}

TEST_CASE("tokenizer error positions") {
    CHECK_THROWS_WITH_AS(tokenize("MATCH (a) @"),
                         "syntax error at byte 10: illegal character '@'", ParseError);
    CHECK_THROWS_WITH_AS(tokenize("RETURN 'oops"),
                         "syntax error at byte 7: unterminated string literal", ParseError);
}

TEST_CASE("parse round-trips canonical queries") {
    // Each pair is (input, canonical pretty-print).
    const std::pair<const char*, const char*> cases[] = {
        {"MATCH (n) RETURN n", "MATCH (n) RETURN n"},
        {"match (n) return n", "MATCH (n) RETURN n"},
        {"MATCH (n:Person) RETURN n", "MATCH (n:Person) RETURN n"},
        {"MATCH (n {age: 30}) RETURN n", "MATCH (n {age: 30}) RETURN n"},
        {"MATCH (n:Person {age: 30, name: 'ann'}) RETURN n",
         "MATCH (n:Person {age: 30, name: 'ann'}) RETURN n"},
        {"MATCH (a)-[:KNOWS]->(b) RETURN a, b", "MATCH (a)-[:KNOWS]->(b) RETURN a, b"},
        {"MATCH (a)<-[:KNOWS]-(b) RETURN a", "MATCH (a)<-[:KNOWS]-(b) RETURN a"},
        {"MATCH (a)-[]->(b) RETURN b", "MATCH (a)-[]->(b) RETURN b"},
        {"MATCH (a)<-[]-(b) RETURN b", "MATCH (a)<-[]-(b) RETURN b"},
        {"MATCH ()-[:R]->(b) RETURN b", "MATCH ()-[:R]->(b) RETURN b"},
        {"MATCH (a)-[e:KNOWS]->(b) RETURN a", "MATCH (a)-[e:KNOWS]->(b) RETURN a"},
        {"MATCH (a)-[*]->(b) RETURN b", "MATCH (a)-[*1..32]->(b) RETURN b"},
        {"MATCH (a)-[*2]->(b) RETURN b", "MATCH (a)-[*2..2]->(b) RETURN b"},
        {"MATCH (a)-[*2..]->(b) RETURN b", "MATCH (a)-[*2..32]->(b) RETURN b"},
        {"MATCH (a)-[*..5]->(b) RETURN b", "MATCH (a)-[*1..5]->(b) RETURN b"},
        {"MATCH (a)-[:R*2..4]->(b) RETURN b", "MATCH (a)-[:R*2..4]->(b) RETURN b"},
        {"MATCH (a)-[:R]->(b), (b)-[:S]->(c) RETURN c",
         "MATCH (a)-[:R]->(b), (b)-[:S]->(c) RETURN c"},
        {"MATCH (a)-[:R]->(b)-[:S]->(c) RETURN c",
         "MATCH (a)-[:R]->(b)-[:S]->(c) RETURN c"},
        {"MATCH (a) WHERE a.age > 20 RETURN a", "MATCH (a) WHERE a.age > 20 RETURN a"},
        {"MATCH (a) WHERE a.age > 20 AND a.name = 'bo' RETURN a",
         "MATCH (a) WHERE a.age > 20 AND a.name = 'bo' RETURN a"},
        {"MATCH (a) WHERE a.x <> 1.5 RETURN a", "MATCH (a) WHERE a.x <> 1.5 RETURN a"},
        {"MATCH (a) WHERE a.ok = true RETURN a", "MATCH (a) WHERE a.ok = true RETURN a"},
        {"MATCH (a) WHERE 3 < a.age RETURN a", "MATCH (a) WHERE 3 < a.age RETURN a"},
        {"MATCH (a) RETURN a.name, a.age", "MATCH (a) RETURN a.name, a.age"},
        {"MATCH (a) RETURN count(a)", "MATCH (a) RETURN count(a)"},
        {"MATCH (a) RETURN count(a.age)", "MATCH (a) RETURN count(a.age)"},
        {"MATCH (a) RETURN a LIMIT 10", "MATCH (a) RETURN a LIMIT 10"},
        {"MATCH (a) RETURN a LIMIT 0", "MATCH (a) RETURN a LIMIT 0"},
        {"CREATE (:Person {name: 'ann'})", "CREATE (:Person {name: 'ann'})"},
        {"CREATE (a)-[:R]->(b), (b)-[:S]->(a)", "CREATE (a)-[:R]->(b), (b)-[:S]->(a)"},
        {"CREATE (x {p: 'it''s'})", "CREATE (x {p: 'it''s'})"},
        {"CREATE (x {f: 2.5, i: -3, b: false})", "CREATE (x {b: false, f: 2.5, i: -3})"},
        {"MATCH (a {id: 0})-[*2..2]->(b) WHERE b.id <> 0 RETURN count(b)",
         "MATCH (a {id: 0})-[*2..2]->(b) WHERE b.id <> 0 RETURN count(b)"},
        {"MATCH (a)-[:R]->(a) RETURN a", "MATCH (a)-[:R]->(a) RETURN a"},
    };
    for (const auto& [input, canonical] : cases) check_roundtrip(input, canonical);
}

TEST_CASE("parse errors carry byte offsets") {
    check_error("MATCH (a RETURN a", "syntax error at byte 9: expected ')'", 9);
    check_error("", "syntax error at byte 0: expected MATCH or CREATE", 0);
    check_error("FOO (a) RETURN a", "syntax error at byte 0: expected MATCH or CREATE", 0);
    check_error("MATCH (a)", "syntax error at byte 9: expected RETURN", 9);
    check_error("MATCH (a) RETURN b", "unbound variable 'b' at byte 17", 17);
    check_error("MATCH (a) WHERE b.x = 1 RETURN a", "unbound variable 'b' at byte 16", 16);
    check_error("MATCH (a) RETURN a, count(a)",
                "syntax error at byte 20: cannot mix count() with non-aggregate projections",
                20);
    check_error("MATCH (a) RETURN count(a), a",
                "syntax error at byte 27: cannot mix count() with non-aggregate projections",
                27);
    check_error("MATCH (a)-[*0..2]->(b) RETURN b",
                "syntax error at byte 12: hop minimum must be at least 1", 12);
    check_error("MATCH (a)-[*3..2]->(b) RETURN b",
                "syntax error at byte 11: hop maximum 2 is less than minimum 3", 11);
    check_error("MATCH (a)-[*1..40]->(b) RETURN b",
                "syntax error at byte 15: hop count 40 exceeds the cap of 32", 15);
    check_error("MATCH (a)-[*40..50]->(b) RETURN b",
                "syntax error at byte 12: hop count 40 exceeds the cap of 32", 12);
    check_error("MATCH (a)-[e:R]->(b), (a)-[e:S]->(b) RETURN a",
                "syntax error at byte 27: variable 'e' already bound", 27);
    check_error("MATCH (a) WHERE a.x = 'oops RETURN a",
                "syntax error at byte 22: unterminated string literal", 22);
    check_error("MATCH (a) RETURN a LIMIT -1",
                "syntax error at byte 25: expected integer", 25);
    check_error("MATCH (a) RETURN a.", "syntax error at byte 19: expected property key", 19);
    check_error("CREATE (a) RETURN a", "syntax error at byte 11: expected end of input", 11);
    check_error("MATCH (a) CREATE (b)", "syntax error at byte 10: expected RETURN", 10);
    check_error("CREATE (x {p: 1, p: 2})",
                "syntax error at byte 17: duplicate property key 'p'", 17);
    check_error("MATCH (a)-->(b) RETURN b", "syntax error at byte 10: expected '['", 10);
}

TEST_CASE("count is contextual, not reserved") {
    const QueryAst ast = parse("MATCH (count) RETURN count");
    REQUIRE(ast.ret.has_value());
    CHECK(ast.ret->projections[0].display() == "count");
    CHECK_FALSE(ast.ret->projections[0].is_count);
    const QueryAst agg = parse("MATCH (count) RETURN count(count)");
    CHECK(agg.ret->projections[0].is_count);
}

TEST_CASE("node variables may repeat, edge patterns stay unnamed or unique") {
    CHECK_NOTHROW(parse("MATCH (a)-[:R]->(a) RETURN a"));
    CHECK_NOTHROW(parse("MATCH (a)-[:R]->(b), (a)-[:S]->(b) RETURN a"));
    CHECK_THROWS_AS(parse("MATCH (a)-[a:R]->(b) RETURN b"), ParseError);
}

TEST_CASE("dump_ast is stable") {
    const QueryAst ast = parse(
        "MATCH (a:Person {age: 30})-[e:KNOWS*1..3]->(b) "
        "WHERE a.name = 'ann' AND b.age >= 2.5 RETURN a, b.age LIMIT 10");
    const std::string expected =
        "query\n"
        "  match\n"
        "    path\n"
        "      node var=a label=Person props={age: 30}\n"
        "      edge dir=out var=e rel=KNOWS hops=*1..3\n"
        "      node var=b\n"
        "    where\n"
        "      a.name = 'ann'\n"
        "      b.age >= 2.5\n"
        "  return limit=10\n"
        "    a\n"
        "    b.age\n";
    CHECK(dump_ast(ast) == expected);
}

TEST_CASE("anonymous pattern nodes parse but are not addressable") {
    const QueryAst ast = parse("MATCH ()-[:R]->(b) RETURN b");
    REQUIRE(ast.match.has_value());
    CHECK_FALSE(ast.match->paths[0].nodes[0].var.has_value());
    CHECK(ast.match->paths[0].nodes[1].var == "b");
    // The synthetic-name character used internally by the planner cannot be
    // lexed from source.
    CHECK_THROWS_AS(tokenize("MATCH (#0) RETURN #0"), ParseError);
}
