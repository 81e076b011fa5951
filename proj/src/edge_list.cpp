#include <fstream>
#include <sstream>
#include <string>

#include "ltm/errors.hpp"
#include "ltm/graphgen.hpp"

namespace ltm {

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
    for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Graph load_edge_list(const std::filesystem::path& path, std::optional<std::size_t> node_count) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<Edge> edges;
    std::unordered_set<std::uint64_t> seen;
    std::size_t declared = 0;
    std::size_t max_id = 0;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (first[0] == '#') {
            // "# nodes N ..." header written by save_edge_list; other comments ignored.
            std::string word;
            std::size_t n = 0;
            std::istringstream hs(line.substr(line.find('#') + 1));
            if (hs >> word && word == "nodes" && hs >> n) declared = n;
            continue;
        }
        long long u = -1;
        long long v = -1;
        std::string rest;
        try {
            std::size_t used = 0;
            u = std::stoll(first, &used);
            if (used != first.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(lineno, "expected two integer node ids");
        }
        if (!(ss >> v) || (ss >> rest)) throw ParseError(lineno, "expected two integer node ids");
        if (u < 0 || v < 0 || u > 0xfffffffeLL || v > 0xfffffffeLL) throw ParseError(lineno, "node id out of range");
        if (u == v) throw ParseError(lineno, "self-loop " + std::to_string(u));
        const auto a = static_cast<std::uint64_t>(std::min(u, v));
        const auto b = static_cast<std::uint64_t>(std::max(u, v));
        if (!seen.insert((a << 32) | b).second)
            throw ParseError(lineno, "duplicate edge " + std::to_string(a) + " " + std::to_string(b));
        edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
        max_id = std::max<std::size_t>(max_id, static_cast<std::size_t>(b));
    }
    std::size_t n = node_count.value_or(std::max(declared, edges.empty() ? declared : max_id + 1));
    if (n == 0) throw ParseError(1, "empty edge list and no node count");
    if (!edges.empty() && max_id >= n) throw ParameterError("edge list references node " + std::to_string(max_id) +
                                                            " beyond node count " + std::to_string(n));
    return Graph::from_edges(n, edges);
}

}  // namespace ltm
