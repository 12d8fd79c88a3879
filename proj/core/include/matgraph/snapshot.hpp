#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "matgraph/graph.hpp"

namespace matgraph {

/// Text snapshot of a property graph (UTF-8, LF line endings):
///
///   GRAPHSNAP1
///   NODES <node_count>
///   <id>\t<label1,label2,...>\t<props>        (one line per node)
///   EDGES <edge_record_count>
///   <src>\t<relation>\t<dst>\t<props>         (one line per edge)
///
/// <props> is `;`-separated `key:type:value` with type in {i,f,b,s};
/// string values are percent-encoded. Output is canonical: nodes by id,
/// edges by (relation, src, dst), properties by key — so saving the same
/// graph twice is byte-identical.
std::string snapshot_to_string(const PropertyGraph& graph);

/// Parses a snapshot. Throws SnapshotError (with a 1-based line number)
/// on malformed input.
PropertyGraph snapshot_from_string(std::string_view text);

void snapshot_save(const PropertyGraph& graph, const std::filesystem::path& path);
PropertyGraph snapshot_load(const std::filesystem::path& path);

/// <props> field codec, shared by the snapshot reader/writer and its tests.
std::string encode_props(const PropertyMap& props);
PropertyMap decode_props(std::string_view field);

}  // namespace matgraph
