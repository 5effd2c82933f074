#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "graphdenoise/graph.hpp"
#include "graphdenoise/kernels.hpp"

namespace gd {

/// How ECDR sizes each round: from the edge count (default) or from the node count.
enum class EcdrBasis { Edges, Nodes };

/// Kernel scale selection for NPDR.
struct EpsilonChoice {
    enum class Kind { MedianHalf, Value, Infinite };
    Kind kind = Kind::MedianHalf;
    double value = 0.0;

    static EpsilonChoice median_half() { return {}; }
    static EpsilonChoice fixed(double v) { return {Kind::Value, v}; }
    static EpsilonChoice infinite() { return {Kind::Infinite, 0.0}; }

    double resolve(const NNGraph& graph) const;
};

/// Parses "inf", "median-half" or a positive number.
EpsilonChoice parse_epsilon(const std::string& text);

struct RuleConfig {
    double q = 0.99;   // good-edge fraction, in (0, 1)
    std::size_t K = 15;
    EcdrBasis ecdr_basis = EcdrBasis::Edges;
    double p = 0.01;
    EpsilonChoice epsilon;
    ProbabilityMode mode = ProbabilityMode::Dense;
    /// Automatic mode selection: dense up to this many nodes, low rank above.
    bool auto_mode = true;
    std::size_t dense_threshold = 600;
    std::optional<std::size_t> J;  // low-rank terms; min(n, 50) when unset

    void validate() const;
};

/// Nearest-rank quantile: element ceil(q m) - 1 (clamped) of the ascending sort.
double quantile(std::span<const double> values, double q);

/// Index ceil(q m) - 1 clamped to [0, m-1], with a 1e-9 guard so that products like
/// 0.92 * 100 do not round up past an exact integer.
std::size_t nearest_rank_index(std::size_t m, double q);

/// d_kl / sqrt(d_k. d_l.), with d_k. the summed incident cost; 0 where a sum vanishes.
std::vector<double> normalized_lengths(const NNGraph& graph);
/// |F_l n F_m| / |F_l u F_m| per edge, F excluding the node itself.
std::vector<double> jaccard_similarities(const NNGraph& graph);

/// Flags edges whose statistic is strictly below the (1 - q) quantile.
BridgeSet flag_low_scores(const NNGraph& graph, const std::vector<double>& scores, Rule rule,
                          double q);

BridgeSet ldr(const NNGraph& graph, double q);
BridgeSet jdr(const NNGraph& graph, double q);

/// Ordered-pair edge betweenness under `weights` (edge costs when omitted). Tied
/// shortest paths share credit equally (Brandes accumulation). Path costs within a
/// relative 1e-12 are treated as ties.
std::vector<double> edge_betweenness(const NNGraph& graph);
std::vector<double> edge_betweenness(const NNGraph& graph, std::span<const double> weights);

/// Edge-centrality rule; `rounds` (optional) receives the flagged set after every round.
BridgeSet ecdr(const NNGraph& graph, double q, std::size_t K, EcdrBasis basis = EcdrBasis::Edges,
               std::vector<BridgeSet>* rounds = nullptr);

/// Symmetrized neighbor-probability score per edge id under the configured mode.
std::vector<double> npdr_scores(const NNGraph& graph, const RuleConfig& cfg);
BridgeSet npdr(const NNGraph& graph, const RuleConfig& cfg);

/// Dispatches on `rule`; Rule::None returns an empty set.
BridgeSet run_rule(Rule rule, const NNGraph& graph, const RuleConfig& cfg);

}  // namespace gd
