#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gd {

using NodeId = std::size_t;
using EdgeId = std::size_t;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Sampled points, one per row, with optional latent parameters (one row per point).
class PointCloud {
public:
    explicit PointCloud(RowMatrix points, std::optional<RowMatrix> latent = std::nullopt);

    std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(points_.cols()); }

    const RowMatrix& points() const noexcept { return points_; }
    const std::optional<RowMatrix>& latent() const noexcept { return latent_; }

    double distance(NodeId i, NodeId j) const;

private:
    RowMatrix points_;
    std::optional<RowMatrix> latent_;
};

/// Undirected edge with u < v.
struct Edge {
    NodeId u;
    NodeId v;
    double cost;
};

/// Unordered node pair stored with first < second.
struct NodePair {
    NodeId first;
    NodeId second;

    static NodePair of(NodeId a, NodeId b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }
    friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// Undirected weighted graph. Edges are kept sorted by (u, v); an edge's id is its
/// position in that order. Neighbor lists are sorted by node id.
class NNGraph {
public:
    struct Incidence {
        NodeId node;
        EdgeId edge;
    };

    NNGraph() = default;
    /// Throws InvalidGraph on self-loops, duplicate pairs, out-of-range ids, or
    /// negative/non-finite costs.
    NNGraph(std::size_t n, std::vector<Edge> edges);

    std::size_t node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_[e]; }

    std::span<const Incidence> incident(NodeId k) const;
    std::vector<NodeId> neighbors(NodeId k) const;
    std::size_t degree(NodeId k) const { return offsets_[k + 1] - offsets_[k]; }

    std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;
    double max_cost() const noexcept { return max_cost_; }

    std::vector<double> costs() const;

    /// Subgraph keeping edges where keep[e] is true (node set unchanged).
    NNGraph filter_edges(const std::vector<bool>& keep) const;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Incidence> adjacency_;
    double max_cost_ = 0.0;
};

enum class Rule { None, LDR, JDR, ECDR, NPDR };

std::string to_string(Rule rule);
/// Accepts "sp"/"none", "ldr", "jdr", "ecdr", "npdr" (case-insensitive).
Rule parse_rule(const std::string& name);

/// Edges flagged as bridges by a decision rule.
struct BridgeSet {
    std::vector<NodePair> edges;  // sorted, unique
    Rule rule = Rule::None;
    double q = 1.0;
    /// Set when a rule ran out of candidate edges before reaching its target size.
    bool exhausted = false;

    std::size_t size() const noexcept { return edges.size(); }
    bool contains(NodeId a, NodeId b) const;
    /// Per-edge mask for `graph`. Throws InvalidGraph if a member is not an edge.
    std::vector<bool> mask_for(const NNGraph& graph) const;

    static BridgeSet from_mask(const NNGraph& graph, const std::vector<bool>& flagged, Rule rule,
                               double q);
};

/// Graph whose flagged edges carry an extra cost M = n * max_e d_e.
class PenalizedGraph {
public:
    PenalizedGraph(const NNGraph& base, const BridgeSet& bridges);

    const NNGraph& base() const noexcept { return base_.get(); }
    double penalty() const noexcept { return penalty_; }
    const std::vector<bool>& flagged() const noexcept { return flagged_; }
    /// Effective weight per edge id.
    const std::vector<double>& weights() const noexcept { return weights_; }

private:
    std::reference_wrapper<const NNGraph> base_;
    std::vector<bool> flagged_;
    std::vector<double> weights_;
    double penalty_;
};

/// Union: edge if either endpoint selects the other. Mutual: only if both do.
enum class KnnSymmetrization { Union, Mutual };

/// Each node selects its k nearest neighbors (ties broken by lower index); selections are
/// symmetrized per `mode`.
NNGraph build_knn_graph(const PointCloud& cloud, std::size_t k,
                        KnnSymmetrization mode = KnnSymmetrization::Union);

/// Edge (i, j) iff ||y_i - y_j|| <= delta.
NNGraph build_ball_graph(const PointCloud& cloud, double delta);

struct ShortestPathTree {
    std::vector<double> distance;
    std::vector<std::ptrdiff_t> parent_edge;  // -1 for the source and unreachable nodes
    std::vector<NodeId> settle_order;         // reachable nodes in the order they were settled
};

/// Dijkstra over `weights` indexed by edge id. Throws InvalidGraph on a negative weight.
ShortestPathTree shortest_path_tree(const NNGraph& graph, std::span<const double> weights,
                                    NodeId source);

/// Minimum path costs from `source` using the graph's own edge costs; unreachable = +inf.
std::vector<double> dijkstra_sssp(const NNGraph& graph, NodeId source);
std::vector<double> dijkstra_sssp(const NNGraph& graph, std::span<const double> weights,
                                  NodeId source);

/// Row s holds, for every node j, the original-cost length of the minimum-cost path from
/// sources[s] to j under penalized weights.
Eigen::MatrixXd adjusted_geodesics(const PenalizedGraph& graph, std::span<const NodeId> sources);

/// Connected-component label per node, labels numbered 0.. in order of first node.
std::vector<std::size_t> connected_components(const NNGraph& graph);

// Text formats. Graph: header "n m", then m lines "i j d". Bridge sets: "#" comment
// header, then "i j" per line, sorted.
NNGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const NNGraph& graph);
BridgeSet read_bridge_set(std::istream& in);
void write_bridge_set(std::ostream& out, const BridgeSet& bridges,
                      const std::vector<std::string>& extra_comments = {});

}  // namespace gd
