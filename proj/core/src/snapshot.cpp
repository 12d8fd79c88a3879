#include "matgraph/snapshot.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "matgraph/encoding.hpp"
#include "matgraph/error.hpp"

namespace matgraph {

namespace {

constexpr std::string_view kMagic = "GRAPHSNAP1";

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void fail(std::size_t line_no, std::string_view what) {
    throw SnapshotError(fmt::format("snapshot parse error at line {}: {}", line_no, what), line_no);
}

/// Throws plain Error on bad content; callers attach the line number.
Value decode_value(char type, std::string_view text) {
    switch (type) {
        case 'i': return Value(parse_int(text));
        case 'f': return Value(parse_double(text));
        case 'b':
            if (text == "true") return Value(true);
            if (text == "false") return Value(false);
            throw Error(fmt::format("bad boolean '{}'", text));
        case 's': return Value(percent_decode(text));
        default: throw Error(fmt::format("unknown property type '{}'", type));
    }
}

/// Reads lines without copying; remembers the 1-based number of the line
/// most recently returned.
class LineReader {
public:
    explicit LineReader(std::string_view text) : rest_(text) {}

    bool next(std::string_view& line) {
        if (rest_.empty() && !pending_) return false;
        ++line_no_;
        const std::size_t pos = rest_.find('\n');
        if (pos == std::string_view::npos) {
            line = rest_;
            rest_ = {};
            pending_ = false;
        } else {
            line = rest_.substr(0, pos);
            rest_ = rest_.substr(pos + 1);
            pending_ = !rest_.empty();
        }
        return true;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::string_view rest_;
    bool pending_ = false;
    std::size_t line_no_ = 0;
};

}  // namespace

std::string encode_props(const PropertyMap& props) {
    std::string out;
    bool first = true;
    for (const auto& [key, value] : props) {
        if (!first) out.push_back(';');
        first = false;
        out += key;
        switch (value.type()) {
            case Value::Type::Int:
                out += fmt::format(":i:{}", value.as_int());
                break;
            case Value::Type::Float:
                out += fmt::format(":f:{}", format_double(value.as_float()));
                break;
            case Value::Type::Bool:
                out += value.as_bool() ? ":b:true" : ":b:false";
                break;
            case Value::Type::String:
                out += fmt::format(":s:{}", percent_encode(value.as_string()));
                break;
        }
    }
    return out;
}

PropertyMap decode_props(std::string_view field) {
    PropertyMap props;
    if (field.empty()) return props;
    for (std::string_view item : split(field, ';')) {
        const std::size_t first = item.find(':');
        if (first == std::string_view::npos || first + 1 >= item.size() || item[first + 2] != ':') {
            throw Error(fmt::format("malformed property item '{}'", item));
        }
        const std::string_view key = item.substr(0, first);
        const char type = item[first + 1];
        const std::string_view text = item.substr(first + 3);
        if (!is_identifier(key)) {
            throw Error(fmt::format("bad property key '{}'", key));
        }
        props[std::string(key)] = decode_value(type, text);
    }
    return props;
}

std::string snapshot_to_string(const PropertyGraph& graph) {
    graph.flush();
    std::string out;
    out += kMagic;
    out += '\n';
    out += fmt::format("NODES {}\n", graph.node_count());

    // Invert the label sets once instead of probing every label per node.
    // label_names() is sorted, so each per-node list comes out sorted too.
    const std::vector<std::string> label_storage = graph.label_names();
    std::vector<std::vector<std::string_view>> labels_by_node(graph.node_count());
    for (const auto& name : label_storage) {
        for (std::uint64_t id : graph.label_members(name)) {
            labels_by_node[id].push_back(name);
        }
    }

    for (std::uint64_t id = 0; id < graph.node_count(); ++id) {
        out += fmt::format("{}\t{}\t{}\n", id, fmt::join(labels_by_node[id], ","),
                           encode_props(graph.node_props(id)));
    }

    out += fmt::format("EDGES {}\n", graph.edge_record_count());
    for (const auto& relation : graph.relation_names()) {
        const SparseMatrix& m = graph.relation_matrix(RelationRef(relation));
        for (std::uint64_t src = 0; src < m.nrows(); ++src) {
            for (std::uint64_t dst : m.row(src)) {
                const PropertyMap* props = graph.edge_props(src, relation, dst);
                out += fmt::format("{}\t{}\t{}\t{}\n", src, relation, dst,
                                   props ? encode_props(*props) : std::string());
            }
        }
    }
    return out;
}

PropertyGraph snapshot_from_string(std::string_view text) {
    LineReader reader(text);
    std::string_view line;

    if (!reader.next(line)) fail(1, "missing GRAPHSNAP1 header");
    if (line != kMagic) fail(reader.line_no(), "missing GRAPHSNAP1 header");
    if (!reader.next(line)) fail(reader.line_no() + 1, "expected NODES <count>");
    if (!line.starts_with("NODES ")) fail(reader.line_no(), "expected NODES <count>");

    std::uint64_t node_count = 0;
    try {
        node_count = parse_uint(line.substr(6));
    } catch (const Error&) {
        fail(reader.line_no(), "bad NODES count");
    }

    PropertyGraph graph(node_count);
    for (std::uint64_t i = 0; i < node_count; ++i) {
        if (!reader.next(line)) fail(reader.line_no() + 1, "unexpected end of file in node section");
        const auto fields = split(line, '\t');
        if (fields.size() != 3) fail(reader.line_no(), "node line must have 3 tab-separated fields");

        std::uint64_t id = 0;
        try {
            id = parse_uint(fields[0]);
        } catch (const Error&) {
            fail(reader.line_no(), "bad node id");
        }
        if (id != i) fail(reader.line_no(), fmt::format("node id {} out of order (expected {})", id, i));

        std::vector<std::string> labels;
        if (!fields[1].empty()) {
            for (std::string_view label : split(fields[1], ',')) labels.emplace_back(label);
        }
        try {
            const std::uint64_t assigned = graph.create_node(labels, decode_props(fields[2]));
            (void)assigned;
        } catch (const Error& e) {
            fail(reader.line_no(), e.what());
        }
    }

    if (!reader.next(line)) fail(reader.line_no() + 1, "expected EDGES <count>");
    if (!line.starts_with("EDGES ")) fail(reader.line_no(), "expected EDGES <count>");
    std::uint64_t edge_count = 0;
    try {
        edge_count = parse_uint(line.substr(6));
    } catch (const Error&) {
        fail(reader.line_no(), "bad EDGES count");
    }

    for (std::uint64_t i = 0; i < edge_count; ++i) {
        if (!reader.next(line)) fail(reader.line_no() + 1, "unexpected end of file in edge section");
        const auto fields = split(line, '\t');
        if (fields.size() != 4) fail(reader.line_no(), "edge line must have 4 tab-separated fields");
        try {
            graph.create_edge(parse_uint(fields[0]), std::string(fields[1]),
                              parse_uint(fields[2]), decode_props(fields[3]));
        } catch (const Error& e) {
            fail(reader.line_no(), e.what());
        }
    }

    while (reader.next(line)) {
        if (!line.empty()) fail(reader.line_no(), "trailing content after edge section");
    }

    graph.flush();
    return graph;
}

void snapshot_save(const PropertyGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SnapshotError(fmt::format("cannot open '{}' for writing", path.string()));
    }
    const std::string text = snapshot_to_string(graph);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
        throw SnapshotError(fmt::format("failed writing snapshot to '{}'", path.string()));
    }
}

PropertyGraph snapshot_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SnapshotError(fmt::format("cannot open '{}' for reading", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw SnapshotError(fmt::format("failed reading snapshot from '{}'", path.string()));
    }
    return snapshot_from_string(buffer.str());
}

}  // namespace matgraph
