// Shared generators and independent reference computations for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "graphdenoise/graph.hpp"
#include "graphdenoise/kernels.hpp"

namespace testing {

using gd::Edge;
using gd::NNGraph;
using gd::NodeId;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline gd::RowMatrix random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    gd::RowMatrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        for (Eigen::Index c = 0; c < pts.cols(); ++c) pts(i, c) = u(rng);
    return pts;
}

/// Random graph on n nodes: a random spanning tree plus extra random edges. Costs are
/// drawn from `cost` so callers can force ties with integer weights.
inline NNGraph random_connected_graph(std::size_t n, std::size_t extra, std::uint64_t seed,
                                      const std::function<double(std::mt19937_64&)>& cost) {
    std::mt19937_64 rng(seed);
    std::set<std::pair<NodeId, NodeId>> seen;
    std::vector<Edge> edges;
    auto add = [&](NodeId a, NodeId b) {
        if (a == b) return;
        auto key = std::minmax(a, b);
        if (!seen.insert({key.first, key.second}).second) return;
        edges.push_back({key.first, key.second, cost(rng)});
    };
    for (NodeId v = 1; v < n; ++v) {
        std::uniform_int_distribution<NodeId> parent(0, v - 1);
        add(parent(rng), v);
    }
    std::uniform_int_distribution<NodeId> any(0, n - 1);
    for (std::size_t t = 0; t < extra; ++t) add(any(rng), any(rng));
    return NNGraph(n, std::move(edges));
}

inline NNGraph random_connected_graph(std::size_t n, std::size_t extra, std::uint64_t seed) {
    return random_connected_graph(n, extra, seed, [](std::mt19937_64& r) {
        return std::uniform_real_distribution<double>(0.1, 2.0)(r);
    });
}

/// All-pairs shortest paths by Floyd-Warshall on the edge list.
inline Eigen::MatrixXd floyd_warshall(const NNGraph& g, const std::vector<double>& w) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, kInf);
    for (Eigen::Index i = 0; i < n; ++i) d(i, i) = 0.0;
    for (gd::EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto a = static_cast<Eigen::Index>(g.edge(e).u);
        const auto b = static_cast<Eigen::Index>(g.edge(e).v);
        d(a, b) = std::min(d(a, b), w[e]);
        d(b, a) = std::min(d(b, a), w[e]);
    }
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
    return d;
}

/// Edge betweenness over ordered pairs by enumerating every simple shortest path with a
/// depth-first search pruned by the Floyd-Warshall distances.
inline std::vector<double> brute_force_betweenness(const NNGraph& g, const std::vector<double>& w) {
    const std::size_t n = g.node_count();
    const Eigen::MatrixXd dist = floyd_warshall(g, w);
    std::vector<double> be(g.edge_count(), 0.0);
    std::vector<gd::EdgeId> path;
    std::vector<bool> on_path(n, false);
    for (NodeId s = 0; s < n; ++s) {
        for (NodeId t = 0; t < n; ++t) {
            if (s == t || !std::isfinite(dist(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t))))
                continue;
            const double target = dist(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
            std::vector<std::vector<gd::EdgeId>> found;
            std::function<void(NodeId, double)> walk = [&](NodeId at, double cost) {
                if (cost > target * (1.0 + 1e-12) + 1e-15) return;
                if (at == t) {
                    found.push_back(path);
                    return;
                }
                for (const auto& inc : g.incident(at)) {
                    if (on_path[inc.node]) continue;
                    on_path[inc.node] = true;
                    path.push_back(inc.edge);
                    walk(inc.node, cost + w[inc.edge]);
                    path.pop_back();
                    on_path[inc.node] = false;
                }
            };
            on_path[s] = true;
            walk(s, 0.0);
            on_path[s] = false;
            for (const auto& p : found)
                for (gd::EdgeId e : p) be[e] += 1.0 / static_cast<double>(found.size());
        }
    }
    return be;
}

/// Gaussian kernels on complete graphs over seeded random point clouds, sizes cycling
/// through [10, max_n]. Scales range from a quarter to four times the median-half default.
/// Complete graphs keep the affinity matrix positive definite.
inline std::vector<gd::DiffusionKernel> kernel_battery(std::size_t count, std::size_t max_n = 50) {
    std::vector<gd::DiffusionKernel> out;
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t n = 10 + (t * 7) % (max_n - 9);
        const auto cloud = gd::PointCloud(random_points(n, 3, 1000 + t));
        const auto g = gd::build_ball_graph(cloud, 10.0);
        const double scale = std::pow(2.0, static_cast<double>(t % 5) - 2.0);
        out.push_back(gd::diffusion_kernel(g, scale * gd::default_epsilon(g)));
    }
    return out;
}

/// Kernels on seeded random connected 5-NN graphs; every fifth uses unit affinities.
inline std::vector<gd::DiffusionKernel> sparse_kernel_battery(std::size_t count, std::size_t max_n = 50) {
    std::vector<gd::DiffusionKernel> out;
    std::uint64_t seed = 2000;
    while (out.size() < count) {
        const std::size_t n = 10 + (out.size() * 7) % (max_n - 9);
        const auto cloud = gd::PointCloud(random_points(n, 3, seed++));
        const auto g = gd::build_knn_graph(cloud, std::min<std::size_t>(5, n - 1));
        const auto labels = gd::connected_components(g);
        if (*std::max_element(labels.begin(), labels.end()) != 0) continue;
        const double eps = out.size() % 5 == 4 ? gd::kInfinity : gd::default_epsilon(g);
        out.push_back(gd::diffusion_kernel(g, eps));
    }
    return out;
}

/// Average ranks (ties share the mean rank).
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double mean = 0.5 * static_cast<double>(i + j);
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = mean;
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace testing
