#pragma once

#include "bmclab/kernel.hpp"

#include <iosfwd>
#include <string>

namespace bmclab {

/// Parses an undirected edge list ("u v" per line, '#' comments allowed)
/// into an adjacency kernel. Vertex labels are arbitrary integers, mapped
/// to contiguous indices in sorted label order. Throws ConfigError on
/// empty or malformed input.
MomentKernel load_edge_list(std::istream& in);
MomentKernel load_edge_list_file(const std::string& path);

} // namespace bmclab
