#include "graphdenoise/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "graphdenoise/error.hpp"

namespace gd {

double EpsilonChoice::resolve(const NNGraph& graph) const {
    switch (kind) {
        case Kind::MedianHalf: return default_epsilon(graph);
        case Kind::Value: return value;
        case Kind::Infinite: return kInfinity;
    }
    return default_epsilon(graph);
}

EpsilonChoice parse_epsilon(const std::string& text) {
    if (text == "inf" || text == "infinity") return EpsilonChoice::infinite();
    if (text == "median-half") return EpsilonChoice::median_half();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InvalidParameter("epsilon must be a number, 'inf' or 'median-half'");
    }
    if (used != text.size() || !(v > 0.0))
        throw InvalidParameter("epsilon must be a positive number, 'inf' or 'median-half'");
    return EpsilonChoice::fixed(v);
}

void RuleConfig::validate() const {
    if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("q must lie in (0, 1)");
    if (K < 1) throw InvalidParameter("K must be at least 1");
    require_restart_probability(p);
    if (epsilon.kind == EpsilonChoice::Kind::Value && !(epsilon.value > 0.0))
        throw InvalidParameter("epsilon must be positive");
    if (J && *J == 0) throw InvalidParameter("J must be positive");
}

std::size_t nearest_rank_index(std::size_t m, double q) {
    if (m == 0) throw InvalidParameter("quantile of an empty set");
    const double rank = std::ceil(q * static_cast<double>(m) - 1e-9);
    if (rank <= 1.0) return 0;
    return std::min(m - 1, static_cast<std::size_t>(rank) - 1);
}

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw InvalidParameter("quantile of an empty set");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("quantile level must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    for (double v : sorted)
        if (!std::isfinite(v)) throw InvalidParameter("quantile input must be finite");
    const std::size_t idx = nearest_rank_index(sorted.size(), q);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
    return sorted[idx];
}

namespace {

void require_q(double q) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("q must lie in (0, 1)");
}

}  // namespace

BridgeSet flag_low_scores(const NNGraph& graph, const std::vector<double>& scores, Rule rule,
                          double q) {
    require_q(q);
    if (scores.size() != graph.edge_count()) throw InvalidParameter("one score per edge required");
    std::vector<bool> flagged(graph.edge_count(), false);
    if (!scores.empty()) {
        const double threshold = quantile(scores, 1.0 - q);
        for (EdgeId e = 0; e < scores.size(); ++e) flagged[e] = scores[e] < threshold;
    }
    return BridgeSet::from_mask(graph, flagged, rule, q);
}

std::vector<double> normalized_lengths(const NNGraph& graph) {
    std::vector<double> sums(graph.node_count(), 0.0);
    for (const auto& e : graph.edges()) {
        sums[e.u] += e.cost;
        sums[e.v] += e.cost;
    }
    std::vector<double> out(graph.edge_count(), 0.0);
    for (EdgeId id = 0; id < graph.edge_count(); ++id) {
        const auto& e = graph.edge(id);
        const double denom = std::sqrt(sums[e.u] * sums[e.v]);
        out[id] = denom > 0.0 ? e.cost / denom : 0.0;
    }
    return out;
}

std::vector<double> jaccard_similarities(const NNGraph& graph) {
    std::vector<double> out(graph.edge_count());
    for (EdgeId id = 0; id < graph.edge_count(); ++id) {
        const auto a = graph.incident(graph.edge(id).u);
        const auto b = graph.incident(graph.edge(id).v);
        std::size_t common = 0;
        auto ia = a.begin();
        auto ib = b.begin();
        while (ia != a.end() && ib != b.end()) {
            if (ia->node < ib->node) {
                ++ia;
            } else if (ib->node < ia->node) {
                ++ib;
            } else {
                ++common;
                ++ia;
                ++ib;
            }
        }
        const std::size_t unite = a.size() + b.size() - common;
        out[id] = static_cast<double>(common) / static_cast<double>(unite);
    }
    return out;
}

BridgeSet ldr(const NNGraph& graph, double q) {
    require_q(q);
    const auto stat = normalized_lengths(graph);
    std::vector<bool> flagged(graph.edge_count(), false);
    if (!stat.empty()) {
        const double threshold = quantile(stat, q);
        for (EdgeId e = 0; e < stat.size(); ++e) flagged[e] = stat[e] >= threshold;
    }
    return BridgeSet::from_mask(graph, flagged, Rule::LDR, q);
}

BridgeSet jdr(const NNGraph& graph, double q) {
    require_q(q);
    return flag_low_scores(graph, jaccard_similarities(graph), Rule::JDR, q);
}

std::vector<double> edge_betweenness(const NNGraph& graph) {
    const auto w = graph.costs();
    return edge_betweenness(graph, w);
}

std::vector<double> edge_betweenness(const NNGraph& graph, std::span<const double> weights) {
    const std::size_t n = graph.node_count();
    if (weights.size() != graph.edge_count()) throw InvalidParameter("weight count mismatch");
    for (double w : weights)
        if (!(w >= 0.0)) throw InvalidGraph("negative or NaN edge weight");

    std::vector<double> be(graph.edge_count(), 0.0);
    std::vector<double> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<bool> settled(n);
    std::vector<std::vector<std::pair<NodeId, EdgeId>>> preds(n);
    std::vector<NodeId> order;
    order.reserve(n);

    using Item = std::pair<double, NodeId>;
    for (NodeId s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kInfinity);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(settled.begin(), settled.end(), false);
        for (auto& p : preds) p.clear();
        order.clear();

        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[s] = 0.0;
        sigma[s] = 1.0;
        heap.push({0.0, s});
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (settled[u] || d > dist[u]) continue;
            settled[u] = true;
            order.push_back(u);
            for (const auto& inc : graph.incident(u)) {
                const NodeId w = inc.node;
                if (settled[w]) continue;
                const double alt = d + weights[inc.edge];
                const double tie = 1e-12 * std::max(alt, dist[w] == kInfinity ? alt : dist[w]);
                if (alt < dist[w] - tie) {
                    dist[w] = alt;
                    sigma[w] = sigma[u];
                    preds[w].assign(1, {u, inc.edge});
                    heap.push({alt, w});
                } else if (std::abs(alt - dist[w]) <= tie) {
                    sigma[w] += sigma[u];
                    preds[w].push_back({u, inc.edge});
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeId w = *it;
            for (const auto& [v, e] : preds[w]) {
                const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                be[e] += c;
                delta[v] += c;
            }
        }
    }
    return be;
}

BridgeSet ecdr(const NNGraph& graph, double q, std::size_t K, EcdrBasis basis,
               std::vector<BridgeSet>* rounds) {
    require_q(q);
    if (K < 1) throw InvalidParameter("K must be at least 1");
    const std::size_t m = graph.edge_count();
    const double base = basis == EcdrBasis::Edges ? static_cast<double>(m)
                                                  : static_cast<double>(graph.node_count());
    const double raw = (1.0 - q) * base / static_cast<double>(K);
    const auto per_round = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw - 1e-9)));

    const double penalty = static_cast<double>(graph.node_count()) * graph.max_cost();
    std::vector<double> weights = graph.costs();
    std::vector<bool> flagged(m, false);
    bool exhausted = false;
    std::vector<EdgeId> candidates;
    candidates.reserve(m);

    for (std::size_t round = 0; round < K && !exhausted; ++round) {
        const auto be = edge_betweenness(graph, weights);
        candidates.clear();
        for (EdgeId e = 0; e < m; ++e)
            if (!flagged[e]) candidates.push_back(e);
        const std::size_t take = std::min(per_round, candidates.size());
        if (take < per_round) exhausted = true;
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                          candidates.end(), [&](EdgeId a, EdgeId b) {
                              return be[a] > be[b] || (be[a] == be[b] && a < b);
                          });
        for (std::size_t k = 0; k < take; ++k) {
            flagged[candidates[k]] = true;
            weights[candidates[k]] += penalty;
        }
        if (rounds) rounds->push_back(BridgeSet::from_mask(graph, flagged, Rule::ECDR, q));
    }
    auto out = BridgeSet::from_mask(graph, flagged, Rule::ECDR, q);
    out.exhausted = exhausted;
    return out;
}

std::vector<double> npdr_scores(const NNGraph& graph, const RuleConfig& cfg) {
    cfg.validate();
    if (graph.edge_count() == 0) return {};
    const auto kernel = diffusion_kernel(graph, cfg.epsilon.resolve(graph));
    const std::size_t n = graph.node_count();

    ProbabilityMode mode = cfg.mode;
    if (cfg.auto_mode) mode = n <= cfg.dense_threshold ? ProbabilityMode::Dense : ProbabilityMode::LowRank;

    switch (mode) {
        case ProbabilityMode::Dense: {
            const auto np = neighbor_probability_dense(kernel, cfg.p);
            return edge_scores_dense(*np.dense, graph);
        }
        case ProbabilityMode::Series: {
            const auto nmat = neighbor_probability_series(kernel, cfg.p, 1e-12);
            return edge_scores_dense(nmat, graph);
        }
        case ProbabilityMode::LowRank: {
            const std::size_t j = cfg.J.value_or(std::min<std::size_t>(n, 50));
            EigenOptions opt;
            opt.dense_threshold = cfg.dense_threshold;
            return edge_scores_lowrank(kernel, cfg.p, std::min(j, n), graph, opt);
        }
    }
    return {};
}

BridgeSet npdr(const NNGraph& graph, const RuleConfig& cfg) {
    cfg.validate();
    return flag_low_scores(graph, npdr_scores(graph, cfg), Rule::NPDR, cfg.q);
}

BridgeSet run_rule(Rule rule, const NNGraph& graph, const RuleConfig& cfg) {
    switch (rule) {
        case Rule::None: {
            BridgeSet empty;
            empty.q = cfg.q;
            return empty;
        }
        case Rule::LDR: return ldr(graph, cfg.q);
        case Rule::JDR: return jdr(graph, cfg.q);
        case Rule::ECDR: return ecdr(graph, cfg.q, cfg.K, cfg.ecdr_basis);
        case Rule::NPDR: return npdr(graph, cfg);
    }
    throw InvalidParameter("unknown rule");
}

}  // namespace gd
