#pragma once

#include <filesystem>
#include <iosfwd>

#include "gramcent/netgraph.hpp"

namespace gramcent {

/// Dense format: first line the node count n, then n lines of n weights.
/// Line j holds row j of the adjacency matrix, i.e. the incoming edge
/// weights of node j.
Network read_matrix(std::istream& in);

/// Sparse format: first line "n=<count>", then one "i j w" line per edge
/// meaning an edge from node i to node j with weight w, ids 1-based.
/// Repeated (i, j) pairs are rejected.
Network read_edge_list(std::istream& in);

/// Reads either format, dispatching on whether the first line starts with
/// "n=". Missing or unreadable files are validation errors.
Network read_network(const std::filesystem::path& path);

/// Writes the dense format with 17 significant digits.
void write_matrix(const Network& net, std::ostream& out);

}  // namespace gramcent
