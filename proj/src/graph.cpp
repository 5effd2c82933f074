#include "graphdenoise/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <queue>

#include "graphdenoise/error.hpp"

namespace gd {

PointCloud::PointCloud(RowMatrix points, std::optional<RowMatrix> latent)
    : points_(std::move(points)), latent_(std::move(latent)) {
    if (points_.rows() < 2) throw InvalidParameter("point cloud needs at least 2 points");
    if (points_.cols() < 1) throw InvalidParameter("point dimension must be >= 1");
    if (latent_ && latent_->rows() != points_.rows())
        throw InvalidParameter("latent parameters must have one row per point");
}

double PointCloud::distance(NodeId i, NodeId j) const {
    return (points_.row(static_cast<Eigen::Index>(i)) - points_.row(static_cast<Eigen::Index>(j)))
        .norm();
}

NNGraph::NNGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (auto& e : edges_) {
        if (e.u == e.v) throw InvalidGraph("self-loop at node " + std::to_string(e.u));
        if (e.u >= n_ || e.v >= n_) throw InvalidGraph("edge endpoint out of range");
        if (!(e.cost >= 0.0) || !std::isfinite(e.cost))
            throw InvalidGraph("edge cost must be finite and nonnegative");
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return NodePair{a.u, a.v} < NodePair{b.u, b.v};
    });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
            throw InvalidGraph("duplicate edge (" + std::to_string(edges_[i].u) + ", " +
                               std::to_string(edges_[i].v) + ")");
    }

    std::vector<std::size_t> deg(n_, 0);
    for (const auto& e : edges_) {
        ++deg[e.u];
        ++deg[e.v];
        max_cost_ = std::max(max_cost_, e.cost);
    }
    offsets_.assign(n_ + 1, 0);
    for (std::size_t k = 0; k < n_; ++k) offsets_[k + 1] = offsets_[k] + deg[k];
    adjacency_.resize(offsets_[n_]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId id = 0; id < edges_.size(); ++id) {
        const auto& e = edges_[id];
        adjacency_[fill[e.u]++] = {e.v, id};
        adjacency_[fill[e.v]++] = {e.u, id};
    }
    for (std::size_t k = 0; k < n_; ++k) {
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[k]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[k + 1]),
                  [](const Incidence& a, const Incidence& b) { return a.node < b.node; });
    }
}

std::span<const NNGraph::Incidence> NNGraph::incident(NodeId k) const {
    return std::span<const Incidence>(adjacency_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
}

std::vector<NodeId> NNGraph::neighbors(NodeId k) const {
    std::vector<NodeId> out;
    out.reserve(degree(k));
    for (const auto& inc : incident(k)) out.push_back(inc.node);
    return out;
}

std::optional<EdgeId> NNGraph::find_edge(NodeId a, NodeId b) const {
    if (a >= n_ || b >= n_ || a == b) return std::nullopt;
    auto inc = incident(a);
    auto it = std::lower_bound(inc.begin(), inc.end(), b,
                               [](const Incidence& x, NodeId key) { return x.node < key; });
    if (it != inc.end() && it->node == b) return it->edge;
    return std::nullopt;
}

std::vector<double> NNGraph::costs() const {
    std::vector<double> out(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) out[e] = edges_[e].cost;
    return out;
}

NNGraph NNGraph::filter_edges(const std::vector<bool>& keep) const {
    if (keep.size() != edges_.size()) throw InvalidParameter("edge mask size mismatch");
    std::vector<Edge> kept;
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (keep[e]) kept.push_back(edges_[e]);
    return NNGraph(n_, std::move(kept));
}

std::string to_string(Rule rule) {
    switch (rule) {
        case Rule::None: return "sp";
        case Rule::LDR: return "ldr";
        case Rule::JDR: return "jdr";
        case Rule::ECDR: return "ecdr";
        case Rule::NPDR: return "npdr";
    }
    return "unknown";
}

Rule parse_rule(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "sp" || s == "none") return Rule::None;
    if (s == "ldr") return Rule::LDR;
    if (s == "jdr") return Rule::JDR;
    if (s == "ecdr") return Rule::ECDR;
    if (s == "npdr") return Rule::NPDR;
    throw InvalidParameter("unknown rule '" + name + "'");
}

bool BridgeSet::contains(NodeId a, NodeId b) const {
    return std::binary_search(edges.begin(), edges.end(), NodePair::of(a, b));
}

std::vector<bool> BridgeSet::mask_for(const NNGraph& graph) const {
    std::vector<bool> mask(graph.edge_count(), false);
    for (const auto& pair : edges) {
        auto id = graph.find_edge(pair.first, pair.second);
        if (!id)
            throw InvalidGraph("bridge (" + std::to_string(pair.first) + ", " +
                               std::to_string(pair.second) + ") is not an edge of the graph");
        mask[*id] = true;
    }
    return mask;
}

BridgeSet BridgeSet::from_mask(const NNGraph& graph, const std::vector<bool>& flagged, Rule rule,
                               double q) {
    BridgeSet out;
    out.rule = rule;
    out.q = q;
    for (EdgeId e = 0; e < graph.edge_count(); ++e)
        if (flagged[e]) out.edges.push_back({graph.edge(e).u, graph.edge(e).v});
    // Edge ids follow (u, v) order, so the list is already sorted.
    return out;
}

PenalizedGraph::PenalizedGraph(const NNGraph& base, const BridgeSet& bridges)
    : base_(base),
      flagged_(bridges.mask_for(base)),
      weights_(base.costs()),
      penalty_(static_cast<double>(base.node_count()) * base.max_cost()) {
    for (EdgeId e = 0; e < weights_.size(); ++e)
        if (flagged_[e]) weights_[e] += penalty_;
}

namespace {

// Brute-force pairwise distances; O(n^2 r) is fine at the sizes used here.
Eigen::MatrixXd pairwise_distances(const PointCloud& cloud) {
    const auto& pts = cloud.points();
    const Eigen::Index n = pts.rows();
    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double d = (pts.row(i) - pts.row(j)).norm();
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }
    return dist;
}

void require_finite(const PointCloud& cloud) {
    if (!cloud.points().allFinite()) throw InvalidParameter("point coordinates must be finite");
}

}  // namespace

NNGraph build_knn_graph(const PointCloud& cloud, std::size_t k, KnnSymmetrization mode) {
    const std::size_t n = cloud.size();
    if (k == 0 || k >= n) throw InvalidParameter("k must satisfy 0 < k < n");
    require_finite(cloud);
    const Eigen::MatrixXd dist = pairwise_distances(cloud);

    std::vector<NodePair> pairs;
    pairs.reserve(n * k);
    std::vector<NodeId> others;
    others.reserve(n - 1);
    for (NodeId i = 0; i < n; ++i) {
        others.clear();
        for (NodeId j = 0; j < n; ++j)
            if (j != i) others.push_back(j);
        const auto row = dist.col(static_cast<Eigen::Index>(i));
        auto closer = [&](NodeId a, NodeId b) {
            double da = row(static_cast<Eigen::Index>(a));
            double db = row(static_cast<Eigen::Index>(b));
            return da < db || (da == db && a < b);
        };
        std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k),
                          others.end(), closer);
        for (std::size_t r = 0; r < k; ++r) pairs.push_back(NodePair::of(i, others[r]));
    }
    // A pair occurs twice exactly when both endpoints selected each other.
    std::sort(pairs.begin(), pairs.end());
    if (mode == KnnSymmetrization::Mutual) {
        std::vector<NodePair> both;
        for (std::size_t t = 1; t < pairs.size(); ++t)
            if (pairs[t] == pairs[t - 1]) both.push_back(pairs[t]);
        pairs.swap(both);
    } else {
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }

    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& p : pairs)
        edges.push_back({p.first, p.second,
                         dist(static_cast<Eigen::Index>(p.first), static_cast<Eigen::Index>(p.second))});
    return NNGraph(n, std::move(edges));
}

NNGraph build_ball_graph(const PointCloud& cloud, double delta) {
    if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
    require_finite(cloud);
    const auto& pts = cloud.points();
    const std::size_t n = cloud.size();
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            double d = (pts.row(static_cast<Eigen::Index>(i)) - pts.row(static_cast<Eigen::Index>(j))).norm();
            if (d <= delta) edges.push_back({i, j, d});
        }
    }
    return NNGraph(n, std::move(edges));
}

ShortestPathTree shortest_path_tree(const NNGraph& graph, std::span<const double> weights,
                                    NodeId source) {
    const std::size_t n = graph.node_count();
    if (source >= n) throw InvalidParameter("source out of range");
    if (weights.size() != graph.edge_count()) throw InvalidParameter("weight count mismatch");
    for (double w : weights)
        if (!(w >= 0.0)) throw InvalidGraph("negative or NaN edge weight");

    ShortestPathTree tree;
    tree.distance.assign(n, kInfinity);
    tree.parent_edge.assign(n, -1);
    tree.settle_order.reserve(n);
    std::vector<bool> settled(n, false);

    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    tree.distance[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (settled[u]) continue;
        settled[u] = true;
        tree.settle_order.push_back(u);
        for (const auto& inc : graph.incident(u)) {
            double alt = d + weights[inc.edge];
            if (alt < tree.distance[inc.node]) {
                tree.distance[inc.node] = alt;
                tree.parent_edge[inc.node] = static_cast<std::ptrdiff_t>(inc.edge);
                heap.push({alt, inc.node});
            }
        }
    }
    return tree;
}

std::vector<double> dijkstra_sssp(const NNGraph& graph, std::span<const double> weights,
                                  NodeId source) {
    return shortest_path_tree(graph, weights, source).distance;
}

std::vector<double> dijkstra_sssp(const NNGraph& graph, NodeId source) {
    const auto w = graph.costs();
    return dijkstra_sssp(graph, w, source);
}

Eigen::MatrixXd adjusted_geodesics(const PenalizedGraph& pg, std::span<const NodeId> sources) {
    if (sources.empty()) throw InvalidParameter("adjusted_geodesics needs at least one source");
    const NNGraph& g = pg.base();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(sources.size()),
                        static_cast<Eigen::Index>(g.node_count()));
    for (std::size_t s = 0; s < sources.size(); ++s) {
        const auto tree = shortest_path_tree(g, pg.weights(), sources[s]);
        std::vector<double> original(g.node_count(), kInfinity);
        original[sources[s]] = 0.0;
        // Parents are settled before children, so one pass in settle order suffices.
        for (NodeId v : tree.settle_order) {
            auto pe = tree.parent_edge[v];
            if (pe < 0) continue;
            const Edge& e = g.edge(static_cast<EdgeId>(pe));
            NodeId parent = e.u == v ? e.v : e.u;
            original[v] = original[parent] + e.cost;
        }
        for (std::size_t j = 0; j < g.node_count(); ++j)
            out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = original[j];
    }
    return out;
}

std::vector<std::size_t> connected_components(const NNGraph& graph) {
    const std::size_t n = graph.node_count();
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> label(n, unset);
    std::size_t next = 0;
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (const auto& inc : graph.incident(u)) {
                if (label[inc.node] == unset) {
                    label[inc.node] = next;
                    stack.push_back(inc.node);
                }
            }
        }
        ++next;
    }
    return label;
}

}  // namespace gd
