#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "graphdenoise/error.hpp"
#include "graphdenoise/graph.hpp"

namespace gd {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::size_t parse_index(const std::string& tok, std::size_t line, const char* what) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(line, std::string("invalid ") + what + " '" + tok + "'");
    return value;
}

double parse_real(const std::string& tok, std::size_t line, const char* what) {
    // strtod accepts the same decimal forms the writer emits; from_chars for double is
    // not available in every libstdc++ we build against.
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || errno == ERANGE)
        throw ParseError(line, std::string("invalid ") + what + " '" + tok + "'");
    return value;
}

}  // namespace

NNGraph read_graph(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;

    auto next_content_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++lineno;
            if (!is_blank(out)) return true;
        }
        return false;
    };

    if (!next_content_line(line)) throw ParseError(lineno + 1, "missing header 'n m'");
    auto header = split_fields(line);
    if (header.size() != 2) throw ParseError(lineno, "header must be 'n m'");
    const std::size_t n = parse_index(header[0], lineno, "node count");
    const std::size_t m = parse_index(header[1], lineno, "edge count");

    std::vector<Edge> edges;
    edges.reserve(m);
    std::vector<NodePair> seen;
    seen.reserve(m);
    std::vector<std::size_t> line_of;
    for (std::size_t k = 0; k < m; ++k) {
        if (!next_content_line(line))
            throw ParseError(lineno + 1, "expected " + std::to_string(m) + " edges, found " +
                                             std::to_string(k));
        auto f = split_fields(line);
        if (f.size() != 3) throw ParseError(lineno, "edge line must be 'i j d'");
        NodeId i = parse_index(f[0], lineno, "node id");
        NodeId j = parse_index(f[1], lineno, "node id");
        double d = parse_real(f[2], lineno, "edge cost");
        if (i >= n || j >= n) throw ParseError(lineno, "node id out of range");
        if (i == j) throw ParseError(lineno, "self-loop");
        if (!(d >= 0.0) || d == std::numeric_limits<double>::infinity())
            throw ParseError(lineno, "edge cost must be finite and nonnegative");
        edges.push_back({i, j, d});
        seen.push_back(NodePair::of(i, j));
        line_of.push_back(lineno);
    }
    if (next_content_line(line)) throw ParseError(lineno, "unexpected content after last edge");

    std::vector<std::size_t> idx(seen.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return seen[a] < seen[b] || (seen[a] == seen[b] && a < b);
    });
    for (std::size_t k = 1; k < idx.size(); ++k)
        if (seen[idx[k]] == seen[idx[k - 1]]) throw ParseError(line_of[idx[k]], "duplicate edge");

    return NNGraph(n, std::move(edges));
}

void write_graph(std::ostream& out, const NNGraph& graph) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << graph.node_count() << ' ' << graph.edge_count() << '\n';
    for (const auto& e : graph.edges()) out << e.u << ' ' << e.v << ' ' << e.cost << '\n';
    out.precision(old_precision);
}

BridgeSet read_bridge_set(std::istream& in) {
    BridgeSet out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        if (line.front() == '#') {
            auto f = split_fields(line.substr(1));
            for (const auto& kv : f) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                auto key = kv.substr(0, eq);
                auto value = kv.substr(eq + 1);
                if (key == "rule") out.rule = parse_rule(value);
                else if (key == "q") out.q = parse_real(value, lineno, "q");
            }
            continue;
        }
        auto f = split_fields(line);
        if (f.size() != 2) throw ParseError(lineno, "bridge line must be 'i j'");
        NodeId i = parse_index(f[0], lineno, "node id");
        NodeId j = parse_index(f[1], lineno, "node id");
        if (i == j) throw ParseError(lineno, "self-loop");
        out.edges.push_back(NodePair::of(i, j));
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    return out;
}

void write_bridge_set(std::ostream& out, const BridgeSet& bridges,
                      const std::vector<std::string>& extra_comments) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "# rule=" << to_string(bridges.rule) << '\n';
    out << "# q=" << bridges.q << '\n';
    out << "# count=" << bridges.size() << '\n';
    for (const auto& c : extra_comments) out << "# " << c << '\n';
    for (const auto& p : bridges.edges) out << p.first << ' ' << p.second << '\n';
    out.precision(old_precision);
}

}  // namespace gd
