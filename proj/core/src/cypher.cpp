#include "matgraph/cypher.hpp"

#include <cctype>
#include <map>
#include <utility>

#include <fmt/format.h>

#include "matgraph/encoding.hpp"
#include "matgraph/error.hpp"

namespace matgraph {

namespace {

[[noreturn]] void fail_at(std::size_t offset, std::string_view detail) {
    throw ParseError(offset, fmt::format("syntax error at byte {}: {}", offset, detail));
}

bool ieq(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

TokenKind keyword_kind(std::string_view word) {
    if (ieq(word, "match")) return TokenKind::KwMatch;
    if (ieq(word, "create")) return TokenKind::KwCreate;
    if (ieq(word, "where")) return TokenKind::KwWhere;
    if (ieq(word, "return")) return TokenKind::KwReturn;
    if (ieq(word, "limit")) return TokenKind::KwLimit;
    if (ieq(word, "and")) return TokenKind::KwAnd;
    if (ieq(word, "true")) return TokenKind::KwTrue;
    if (ieq(word, "false")) return TokenKind::KwFalse;
    return TokenKind::Ident;
}

bool is_ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::KwMatch: return "MATCH";
        case TokenKind::KwCreate: return "CREATE";
        case TokenKind::KwWhere: return "WHERE";
        case TokenKind::KwReturn: return "RETURN";
        case TokenKind::KwLimit: return "LIMIT";
        case TokenKind::KwAnd: return "AND";
        case TokenKind::KwTrue: return "TRUE";
        case TokenKind::KwFalse: return "FALSE";
        case TokenKind::Ident: return "IDENT";
        case TokenKind::Int: return "INT";
        case TokenKind::Float: return "FLOAT";
        case TokenKind::String: return "STRING";
        case TokenKind::LParen: return "LPAREN";
        case TokenKind::RParen: return "RPAREN";
        case TokenKind::LBracket: return "LBRACKET";
        case TokenKind::RBracket: return "RBRACKET";
        case TokenKind::LBrace: return "LBRACE";
        case TokenKind::RBrace: return "RBRACE";
        case TokenKind::Colon: return "COLON";
        case TokenKind::Comma: return "COMMA";
        case TokenKind::Dot: return "DOT";
        case TokenKind::DotDot: return "DOTDOT";
        case TokenKind::Star: return "STAR";
        case TokenKind::Minus: return "MINUS";
        case TokenKind::Arrow: return "ARROW";
        case TokenKind::LArrow: return "LARROW";
        case TokenKind::Eq: return "EQ";
        case TokenKind::Ne: return "NE";
        case TokenKind::Lt: return "LT";
        case TokenKind::Le: return "LE";
        case TokenKind::Gt: return "GT";
        case TokenKind::Ge: return "GE";
        case TokenKind::Eof: return "EOF";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t pos = 0;
    const std::size_t n = text.size();

    auto push = [&](TokenKind kind, std::size_t start, std::size_t len, std::string lexeme) {
        out.push_back(Token{kind, std::move(lexeme), start, len});
    };
    auto punct = [&](TokenKind kind, std::size_t len, const char* spelling) {
        push(kind, pos, len, spelling);
        pos += len;
    };

    while (pos < n) {
        const char c = text[pos];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
            continue;
        }
        if (is_ident_start(c)) {
            std::size_t start = pos;
            while (pos < n && is_ident_char(text[pos])) ++pos;
            std::string word(text.substr(start, pos - start));
            const TokenKind kind = keyword_kind(word);
            push(kind, start, pos - start, std::move(word));
            continue;
        }
        if (is_digit(c)) {
            std::size_t start = pos;
            while (pos < n && is_digit(text[pos])) ++pos;
            bool is_float = false;
            if (pos + 1 < n && text[pos] == '.' && is_digit(text[pos + 1])) {
                is_float = true;
                ++pos;
                while (pos < n && is_digit(text[pos])) ++pos;
            }
            push(is_float ? TokenKind::Float : TokenKind::Int, start, pos - start,
                 std::string(text.substr(start, pos - start)));
            continue;
        }
        if (c == '\'') {
            std::size_t start = pos;
            ++pos;
            std::string value;
            for (;;) {
                if (pos >= n) fail_at(start, "unterminated string literal");
                if (text[pos] == '\'') {
                    if (pos + 1 < n && text[pos + 1] == '\'') {
                        value += '\'';
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                value += text[pos];
                ++pos;
            }
            push(TokenKind::String, start, pos - start, std::move(value));
            continue;
        }
        switch (c) {
            case '(': punct(TokenKind::LParen, 1, "("); continue;
            case ')': punct(TokenKind::RParen, 1, ")"); continue;
            case '[': punct(TokenKind::LBracket, 1, "["); continue;
            case ']': punct(TokenKind::RBracket, 1, "]"); continue;
            case '{': punct(TokenKind::LBrace, 1, "{"); continue;
            case '}': punct(TokenKind::RBrace, 1, "}"); continue;
            case ':': punct(TokenKind::Colon, 1, ":"); continue;
            case ',': punct(TokenKind::Comma, 1, ","); continue;
            case '*': punct(TokenKind::Star, 1, "*"); continue;
            case '=': punct(TokenKind::Eq, 1, "="); continue;
            case '.':
                if (pos + 1 < n && text[pos + 1] == '.') {
                    punct(TokenKind::DotDot, 2, "..");
                } else {
                    punct(TokenKind::Dot, 1, ".");
                }
                continue;
            case '-':
                if (pos + 1 < n && text[pos + 1] == '>') {
                    punct(TokenKind::Arrow, 2, "->");
                } else {
                    punct(TokenKind::Minus, 1, "-");
                }
                continue;
            case '<':
                if (pos + 1 < n && text[pos + 1] == '=') {
                    punct(TokenKind::Le, 2, "<=");
                } else if (pos + 1 < n && text[pos + 1] == '>') {
                    punct(TokenKind::Ne, 2, "<>");
                } else if (pos + 1 < n && text[pos + 1] == '-') {
                    punct(TokenKind::LArrow, 2, "<-");
                } else {
                    punct(TokenKind::Lt, 1, "<");
                }
                continue;
            case '>':
                if (pos + 1 < n && text[pos + 1] == '=') {
                    punct(TokenKind::Ge, 2, ">=");
                } else {
                    punct(TokenKind::Gt, 1, ">");
                }
                continue;
            default:
                break;
        }
        if (std::isprint(static_cast<unsigned char>(c))) {
            fail_at(pos, fmt::format("illegal character '{}'", c));
        }
        fail_at(pos, fmt::format("illegal character 0x{:02X}",
                                 static_cast<unsigned char>(c)));
    }
    push(TokenKind::Eof, n, 0, "");
    return out;
}

namespace {

enum class VarKind { Node, Edge };

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

    QueryAst parse_query() {
        QueryAst ast;
        if (accept(TokenKind::KwCreate)) {
            CreateClause create;
            create.paths = parse_pattern_list();
            expect(TokenKind::Eof, "end of input");
            ast.create = std::move(create);
            return ast;
        }
        expect(TokenKind::KwMatch, "MATCH or CREATE");
        MatchClause match;
        match.paths = parse_pattern_list();
        if (accept(TokenKind::KwWhere)) match.where = parse_where();
        expect(TokenKind::KwReturn, "RETURN");
        ReturnClause ret;
        ret.projections = parse_projections();
        if (accept(TokenKind::KwLimit)) {
            const Token& tok = expect(TokenKind::Int, "integer");
            ret.limit = to_uint(tok);
        }
        expect(TokenKind::Eof, "end of input");
        ast.match = std::move(match);
        ast.ret = std::move(ret);
        return ast;
    }

private:
    const Token& cur() const { return tokens_[index_]; }

    bool at(TokenKind kind) const { return cur().kind == kind; }

    bool accept(TokenKind kind) {
        if (!at(kind)) return false;
        ++index_;
        return true;
    }

    const Token& expect(TokenKind kind, std::string_view what) {
        if (!at(kind)) {
            // Punctuation expectations are quoted; word-like ones are not.
            const bool bare = !what.empty() && is_ident_start(what[0]);
            fail_at(cur().offset, bare ? fmt::format("expected {}", what)
                                       : fmt::format("expected '{}'", what));
        }
        return tokens_[index_++];
    }

    std::uint64_t to_uint(const Token& tok) const {
        try {
            return parse_uint(tok.text);
        } catch (const Error&) {
            fail_at(tok.offset, "integer literal out of range");
        }
    }

    std::vector<PatternPath> parse_pattern_list() {
        std::vector<PatternPath> paths;
        do {
            paths.push_back(parse_path());
        } while (accept(TokenKind::Comma));
        return paths;
    }

    PatternPath parse_path() {
        PatternPath path;
        path.nodes.push_back(parse_node());
        while (at(TokenKind::Minus) || at(TokenKind::LArrow)) {
            path.edges.push_back(parse_edge());
            path.nodes.push_back(parse_node());
        }
        return path;
    }

    NodePattern parse_node() {
        NodePattern node;
        node.offset = expect(TokenKind::LParen, "(").offset;
        if (at(TokenKind::Ident)) {
            const Token& tok = tokens_[index_++];
            bind(tok, VarKind::Node);
            node.var = tok.text;
        }
        if (accept(TokenKind::Colon)) {
            node.label = expect(TokenKind::Ident, "label").text;
        }
        if (accept(TokenKind::LBrace)) node.props = parse_props();
        expect(TokenKind::RParen, ")");
        return node;
    }

    PropertyMap parse_props() {
        PropertyMap props;
        if (accept(TokenKind::RBrace)) return props;
        for (;;) {
            const Token& key = expect(TokenKind::Ident, "property key");
            expect(TokenKind::Colon, ":");
            Value value = parse_literal();
            if (!props.emplace(key.text, std::move(value)).second) {
                fail_at(key.offset, fmt::format("duplicate property key '{}'", key.text));
            }
            if (!accept(TokenKind::Comma)) break;
        }
        expect(TokenKind::RBrace, "}");
        return props;
    }

    EdgePattern parse_edge() {
        EdgePattern edge;
        if (accept(TokenKind::LArrow)) {
            edge.direction = Direction::In;
            edge.offset = tokens_[index_ - 1].offset;
            expect(TokenKind::LBracket, "[");
            parse_edge_body(edge);
            expect(TokenKind::RBracket, "]");
            expect(TokenKind::Minus, "-");
        } else {
            edge.direction = Direction::Out;
            edge.offset = expect(TokenKind::Minus, "-").offset;
            expect(TokenKind::LBracket, "[");
            parse_edge_body(edge);
            expect(TokenKind::RBracket, "]");
            expect(TokenKind::Arrow, "->");
        }
        return edge;
    }

    void parse_edge_body(EdgePattern& edge) {
        if (at(TokenKind::Ident)) {
            const Token& tok = tokens_[index_++];
            bind(tok, VarKind::Edge);
            edge.var = tok.text;
        }
        if (accept(TokenKind::Colon)) {
            edge.relation = expect(TokenKind::Ident, "relation type").text;
        }
        if (at(TokenKind::Star)) edge.hops = parse_hops();
    }

    HopRange parse_hops() {
        const std::size_t star_offset = expect(TokenKind::Star, "*").offset;
        HopRange range;
        bool have_min = false;
        std::size_t min_offset = star_offset;
        if (at(TokenKind::Int)) {
            const Token& tok = tokens_[index_++];
            min_offset = tok.offset;
            range.min = narrow_hop(tok);
            have_min = true;
        }
        if (accept(TokenKind::DotDot)) {
            range.max = at(TokenKind::Int) ? narrow_hop(tokens_[index_++]) : kMaxHops;
            if (!have_min) range.min = 1;
        } else if (have_min) {
            range.max = range.min;
        } else {
            range.min = 1;
            range.max = kMaxHops;
        }
        if (range.min < 1) {
            fail_at(min_offset, "hop minimum must be at least 1");
        }
        if (range.max < range.min) {
            fail_at(star_offset, fmt::format("hop maximum {} is less than minimum {}",
                                             range.max, range.min));
        }
        return range;
    }

    std::uint32_t narrow_hop(const Token& tok) const {
        const std::uint64_t raw = to_uint(tok);
        if (raw > kMaxHops) {
            fail_at(tok.offset,
                    fmt::format("hop count {} exceeds the cap of {}", raw, kMaxHops));
        }
        return static_cast<std::uint32_t>(raw);
    }

    Value parse_literal() {
        if (accept(TokenKind::Minus)) {
            if (at(TokenKind::Int)) {
                const Token& tok = tokens_[index_++];
                try {
                    return Value(parse_int("-" + tok.text));
                } catch (const Error&) {
                    fail_at(tok.offset, "integer literal out of range");
                }
            }
            if (at(TokenKind::Float)) {
                const Token& tok = tokens_[index_++];
                return Value(-parse_double(tok.text));
            }
            fail_at(cur().offset, "expected literal");
        }
        if (at(TokenKind::Int)) {
            const Token& tok = tokens_[index_++];
            try {
                return Value(parse_int(tok.text));
            } catch (const Error&) {
                fail_at(tok.offset, "integer literal out of range");
            }
        }
        if (at(TokenKind::Float)) {
            const Token& tok = tokens_[index_++];
            return Value(parse_double(tok.text));
        }
        if (at(TokenKind::String)) return Value(tokens_[index_++].text);
        if (accept(TokenKind::KwTrue)) return Value(true);
        if (accept(TokenKind::KwFalse)) return Value(false);
        fail_at(cur().offset, "expected literal");
    }

    WhereExpr parse_where() {
        WhereExpr where;
        do {
            where.comparisons.push_back(parse_comparison());
        } while (accept(TokenKind::KwAnd));
        return where;
    }

    Comparison parse_comparison() {
        Comparison cmp;
        cmp.offset = cur().offset;
        cmp.lhs = parse_operand();
        switch (cur().kind) {
            case TokenKind::Eq: cmp.op = CompareOp::Eq; break;
            case TokenKind::Ne: cmp.op = CompareOp::Ne; break;
            case TokenKind::Lt: cmp.op = CompareOp::Lt; break;
            case TokenKind::Le: cmp.op = CompareOp::Le; break;
            case TokenKind::Gt: cmp.op = CompareOp::Gt; break;
            case TokenKind::Ge: cmp.op = CompareOp::Ge; break;
            default: fail_at(cur().offset, "expected comparison operator");
        }
        ++index_;
        cmp.rhs = parse_operand();
        return cmp;
    }

    Operand parse_operand() {
        if (at(TokenKind::Ident)) {
            const Token& var = tokens_[index_++];
            require_bound(var);
            expect(TokenKind::Dot, ".");
            const Token& key = expect(TokenKind::Ident, "property key");
            return PropertyAccess{var.text, key.text, var.offset};
        }
        return parse_literal();
    }

    std::vector<Projection> parse_projections() {
        std::vector<Projection> projections;
        do {
            projections.push_back(parse_projection());
        } while (accept(TokenKind::Comma));
        for (const Projection& p : projections) {
            if (p.is_count != projections.front().is_count) {
                fail_at(p.offset, "cannot mix count() with non-aggregate projections");
            }
        }
        return projections;
    }

    Projection parse_projection() {
        Projection proj;
        const Token& head = expect(TokenKind::Ident, "projection");
        proj.offset = head.offset;
        if (ieq(head.text, "count") && at(TokenKind::LParen)) {
            ++index_;
            proj.is_count = true;
            const Token& var = expect(TokenKind::Ident, "identifier");
            require_bound(var);
            proj.var = var.text;
            if (accept(TokenKind::Dot)) {
                proj.key = expect(TokenKind::Ident, "property key").text;
            }
            expect(TokenKind::RParen, ")");
            return proj;
        }
        require_bound(head);
        proj.var = head.text;
        if (accept(TokenKind::Dot)) {
            proj.key = expect(TokenKind::Ident, "property key").text;
        }
        return proj;
    }

    // Patterns precede WHERE and RETURN, so the binding table is complete
    // by the time references are parsed.
    void bind(const Token& var, VarKind kind) {
        auto it = bindings_.find(var.text);
        if (it == bindings_.end()) {
            bindings_.emplace(var.text, kind);
            return;
        }
        if (kind == VarKind::Edge || it->second == VarKind::Edge) {
            fail_at(var.offset, fmt::format("variable '{}' already bound", var.text));
        }
    }

    void require_bound(const Token& var) const {
        if (bindings_.find(var.text) == bindings_.end()) {
            throw ParseError(var.offset, fmt::format("unbound variable '{}' at byte {}",
                                                     var.text, var.offset));
        }
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
    std::map<std::string, VarKind> bindings_;
};

}  // namespace

QueryAst parse(std::string_view text) { return Parser(text).parse_query(); }

namespace {

std::string quote_string(const std::string& raw) {
    std::string out = "'";
    for (char c : raw) {
        out += c;
        if (c == '\'') out += '\'';
    }
    out += '\'';
    return out;
}

std::string print_props(const PropertyMap& props) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : props) {
        if (!first) out += ", ";
        first = false;
        out += key;
        out += ": ";
        out += pretty_print(value);
    }
    out += '}';
    return out;
}

std::string print_node(const NodePattern& node) {
    std::string out = "(";
    if (node.var) out += *node.var;
    if (node.label) {
        out += ':';
        out += *node.label;
    }
    if (!node.props.empty()) {
        if (node.var || node.label) out += ' ';
        out += print_props(node.props);
    }
    out += ')';
    return out;
}

std::string print_edge_body(const EdgePattern& edge) {
    std::string out;
    if (edge.var) out += *edge.var;
    if (edge.relation) {
        out += ':';
        out += *edge.relation;
    }
    if (edge.hops) out += fmt::format("*{}..{}", edge.hops->min, edge.hops->max);
    return out;
}

std::string print_path(const PatternPath& path) {
    std::string out = print_node(path.nodes[0]);
    for (std::size_t i = 0; i < path.edges.size(); ++i) {
        const EdgePattern& edge = path.edges[i];
        if (edge.direction == Direction::Out) {
            out += "-[" + print_edge_body(edge) + "]->";
        } else {
            out += "<-[" + print_edge_body(edge) + "]-";
        }
        out += print_node(path.nodes[i + 1]);
    }
    return out;
}

std::string print_paths(const std::vector<PatternPath>& paths) {
    std::string out;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (i > 0) out += ", ";
        out += print_path(paths[i]);
    }
    return out;
}

std::string_view compare_op_text(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "<>";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

std::string print_operand(const Operand& operand) {
    if (const auto* access = std::get_if<PropertyAccess>(&operand)) {
        return access->var + "." + access->key;
    }
    return pretty_print(std::get<Value>(operand));
}

std::string print_comparison(const Comparison& cmp) {
    return fmt::format("{} {} {}", print_operand(cmp.lhs), compare_op_text(cmp.op),
                       print_operand(cmp.rhs));
}

}  // namespace

std::string pretty_print(const Value& literal) {
    switch (literal.type()) {
        case Value::Type::Int: return fmt::format("{}", literal.as_int());
        case Value::Type::Float: return format_double_fixed(literal.as_float());
        case Value::Type::Bool: return literal.as_bool() ? "true" : "false";
        case Value::Type::String: return quote_string(literal.as_string());
    }
    return "";
}

std::string pretty_print(const Comparison& comparison) { return print_comparison(comparison); }

std::string pretty_print(const PatternPath& path) { return print_path(path); }

std::string pretty_print(const QueryAst& ast) {
    std::string out;
    if (ast.create) {
        out = "CREATE " + print_paths(ast.create->paths);
        return out;
    }
    out = "MATCH " + print_paths(ast.match->paths);
    if (ast.match->where) {
        out += " WHERE ";
        const auto& comparisons = ast.match->where->comparisons;
        for (std::size_t i = 0; i < comparisons.size(); ++i) {
            if (i > 0) out += " AND ";
            out += print_comparison(comparisons[i]);
        }
    }
    out += " RETURN ";
    const auto& projections = ast.ret->projections;
    for (std::size_t i = 0; i < projections.size(); ++i) {
        if (i > 0) out += ", ";
        out += projections[i].display();
    }
    if (ast.ret->limit) out += fmt::format(" LIMIT {}", *ast.ret->limit);
    return out;
}

namespace {

void dump_path(const PatternPath& path, std::string& out) {
    out += "    path\n";
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        if (i > 0) {
            const EdgePattern& edge = path.edges[i - 1];
            out += fmt::format("      edge dir={}",
                               edge.direction == Direction::Out ? "out" : "in");
            if (edge.var) out += fmt::format(" var={}", *edge.var);
            if (edge.relation) out += fmt::format(" rel={}", *edge.relation);
            if (edge.hops) out += fmt::format(" hops=*{}..{}", edge.hops->min, edge.hops->max);
            out += '\n';
        }
        const NodePattern& node = path.nodes[i];
        out += "      node";
        if (node.var) out += fmt::format(" var={}", *node.var);
        if (node.label) out += fmt::format(" label={}", *node.label);
        if (!node.props.empty()) out += fmt::format(" props={}", print_props(node.props));
        out += '\n';
    }
}

}  // namespace

std::string dump_ast(const QueryAst& ast) {
    std::string out = "query\n";
    if (ast.create) {
        out += "  create\n";
        for (const PatternPath& path : ast.create->paths) dump_path(path, out);
        return out;
    }
    out += "  match\n";
    for (const PatternPath& path : ast.match->paths) dump_path(path, out);
    if (ast.match->where) {
        out += "    where\n";
        for (const Comparison& cmp : ast.match->where->comparisons) {
            out += "      " + print_comparison(cmp) + '\n';
        }
    }
    out += "  return";
    if (ast.ret->limit) out += fmt::format(" limit={}", *ast.ret->limit);
    out += '\n';
    for (const Projection& proj : ast.ret->projections) {
        out += "    " + proj.display() + '\n';
    }
    return out;
}

}  // namespace matgraph
