#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graphdenoise/graph.hpp"
#include "graphdenoise/rules.hpp"

namespace gd::swissroll {

// Parameter domain U = [pi, 4 pi] x [0, 21] of f(a, b) = (a cos a, b, a sin a).
inline constexpr double kMinA = 3.14159265358979323846;
inline constexpr double kMaxA = 4.0 * kMinA;
inline constexpr double kMaxB = 21.0;

Eigen::Vector3d embed(double a, double b);
/// Columns of the differential Df: d/da and d/db.
Eigen::Vector3d tangent_a(double a);
Eigen::Vector3d tangent_b();
/// Unit normal (d/da x d/db) / |d/da x d/db|.
Eigen::Vector3d normal(double a);

struct Sample {
    RowMatrix params;   // n x 2, (a, b)
    RowMatrix points;   // n x 3
    RowMatrix normals;  // n x 3, unit
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(params.rows()); }
    Eigen::Vector2d param(NodeId i) const { return params.row(static_cast<Eigen::Index>(i)).transpose(); }
};

/// n points uniform with respect to surface area (rejection on sqrt(1 + a^2)); the first
/// point is pinned to (a, b) = (pi, 0).
Sample sample_swiss_roll(std::size_t n, std::uint64_t seed);

struct NoiseRealization {
    double mu = 0.0;
    std::vector<double> u;  // uniform on [-1, 1]
    RowMatrix noisy;        // y_i = x_i + mu u_i n_i
    std::uint64_t seed = 0;
};

/// Draws u from `seed` and displaces each point along its normal.
NoiseRealization add_normal_noise(const Sample& sample, double mu, std::uint64_t seed);
/// Same displacement for a given u (so several amplitudes can share one draw).
NoiseRealization add_normal_noise(const Sample& sample, double mu, std::vector<double> u,
                                  std::uint64_t seed = 0);

/// Adaptive Simpson with absolute tolerance `tol` and recursion depth cap.
double integrate_adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  double tol = 1e-8, int max_depth = 40);

/// Length of the image of the straight parameter segment between two (a, b) points.
double true_geodesic(const Eigen::Vector2d& from, const Eigen::Vector2d& to);

/// Largest true geodesic between corners of U; caps errors for unreachable nodes.
double geodesic_diameter();

/// E = mean |truth - estimate| over the matrix; non-finite estimates contribute `cap`.
/// `capped` (optional) is set when any entry was capped.
double mean_error(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate, double cap,
                  bool* capped = nullptr);

/// Edges whose true geodesic exceeds factor times their ambient length.
std::size_t count_bridges(const NNGraph& graph, const Sample& sample, double factor = 5.0);
std::vector<bool> label_bridges(const NNGraph& graph, const Sample& sample, double factor = 5.0);

/// Five fixed anchors in U, the first being (pi, 0).
std::vector<Eigen::Vector2d> reference_anchors();
/// Nearest distinct sample node to each anchor in the clean embedding.
std::vector<NodeId> reference_nodes(const Sample& sample);

/// A rule with one quantile; Rule::None is plain shortest paths.
struct Method {
    Rule rule = Rule::None;
    double q = 1.0;

    std::string label() const;
    friend bool operator==(const Method&, const Method&) = default;
};

/// SP, LDR(.92), ECDR(.92/.95/.99), NPDR(.92/.95/.99).
std::vector<Method> default_methods();
std::vector<double> default_mu_grid();

struct BenchmarkConfig {
    std::size_t n = 500;
    double delta = 4.0;
    std::vector<double> mu = default_mu_grid();
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    std::vector<Method> methods = default_methods();
    RuleConfig rule;  // q is overridden per method
    double bridge_factor = 5.0;
};

struct TrialRecord {
    double mu = 0.0;
    Method method;
    std::size_t trial = 0;
    double error = 0.0;
    std::size_t bridges_flagged = 0;
    std::size_t bridges_true = 0;
    bool disconnected = false;
};

struct Aggregate {
    double mu = 0.0;
    Method method;
    double mean_error = 0.0;
    double median_error = 0.0;
    double median_flagged = 0.0;
    double median_true = 0.0;
    std::size_t disconnected_trials = 0;
};

/// Per-node 33/50/66% quantiles over trials of estimates from the first reference node.
struct GeodesicCurve {
    double mu = 0.0;
    Method method;
    std::vector<NodeId> nodes;  // sorted by true geodesic from the first reference
    std::vector<double> truth;
    std::vector<double> q33;
    std::vector<double> median;
    std::vector<double> q66;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<NodeId> references;
    std::vector<TrialRecord> records;  // ordered by (mu, trial, method)
    std::vector<Aggregate> aggregates;  // ordered by (mu, method)
    std::vector<GeodesicCurve> curves;

    const Aggregate& aggregate(double mu, const Method& method) const;
    /// Median over trials of the true bridge count at `mu`.
    double median_true_bridges(double mu) const;
};

/// Deterministic for a fixed config: trial t at every amplitude reuses the noise draw
/// u_t from derive_seed(seed, t + 1), and the clean sample comes from derive_seed(seed, 0).
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// Median of true bridge counts per amplitude without running any rule.
std::vector<double> median_bridge_counts(const BenchmarkConfig& config);

void write_trials_csv(std::ostream& out, const BenchmarkReport& report);
void write_aggregate_csv(std::ostream& out, const BenchmarkReport& report);
void write_curves_dat(std::ostream& out, const BenchmarkReport& report);
/// Rows per amplitude, columns SP | LDR | ECDR q= | NPDR q= in the mean-error table layout.
void write_error_table(std::ostream& out, const BenchmarkReport& report);
/// "# key=value" provenance lines.
void write_config_header(std::ostream& out, const BenchmarkConfig& config);

}  // namespace gd::swissroll
