#include "bmclab/graph.hpp"

#include "bmclab/errors.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace bmclab {

MomentKernel load_edge_list(std::istream& in) {
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    std::set<std::int64_t> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::int64_t u, v;
        if (!(ls >> u)) continue; // blank line
        if (!(ls >> v))
            throw ConfigError("edge list line " + std::to_string(lineno) +
                              ": expected two vertex labels");
        edges.emplace_back(u, v);
        labels.insert(u);
        labels.insert(v);
    }
    if (edges.empty()) throw ConfigError("edge list is empty");

    std::map<std::int64_t, std::int64_t> index;
    std::int64_t next = 0;
    for (auto l : labels) index[l] = next++;

    MomentKernel adjacency(next, 0);
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto& [u, v] : edges) {
        if (u == v)
            throw ConfigError("self-loop at vertex " + std::to_string(u));
        const auto a = index[u], b = index[v];
        if (seen.insert({std::min(a, b), std::max(a, b)}).second) {
            adjacency.add_entry(a, b, 1.0);
            adjacency.add_entry(b, a, 1.0);
        }
    }
    adjacency.sort_rows();
    return adjacency;
}

MomentKernel load_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open edge list " + path);
    return load_edge_list(in);
}

} // namespace bmclab
