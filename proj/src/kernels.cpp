#include "graphdenoise/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "graphdenoise/error.hpp"

namespace gd {

double default_epsilon(const NNGraph& graph) {
    if (graph.edge_count() == 0) return 1.0;
    auto costs = graph.costs();
    const std::size_t m = costs.size();
    std::sort(costs.begin(), costs.end());
    const double median = m % 2 == 1 ? costs[m / 2] : 0.5 * (costs[m / 2 - 1] + costs[m / 2]);
    // All-zero costs (duplicate points) would give epsilon = 0; any positive value yields
    // unit affinities in that case.
    return median > 0.0 ? median / 2.0 : 1.0;
}

DiffusionKernel diffusion_kernel(const NNGraph& graph, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive (or +inf)");
    const std::size_t n = graph.node_count();

    std::vector<double> affinity(graph.edge_count());
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const double d = graph.edge(e).cost;
        affinity[e] = std::isinf(epsilon) ? 1.0 : std::exp(-d * d / epsilon);
    }

    std::vector<double> w_sum(n, 1.0);  // unit diagonal
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        w_sum[graph.edge(e).u] += affinity[e];
        w_sum[graph.edge(e).v] += affinity[e];
    }

    // A = W_D^{-1} W W_D^{-1}
    std::vector<double> a_edge(graph.edge_count());
    std::vector<double> a_diag(n);
    std::vector<double> d_sum(n, 0.0);
    for (NodeId k = 0; k < n; ++k) {
        a_diag[k] = 1.0 / (w_sum[k] * w_sum[k]);
        d_sum[k] += a_diag[k];
    }
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const auto& edge = graph.edge(e);
        a_edge[e] = affinity[e] / (w_sum[edge.u] * w_sum[edge.v]);
        d_sum[edge.u] += a_edge[e];
        d_sum[edge.v] += a_edge[e];
    }

    std::vector<SparseMatrix::Triplet> t;
    t.reserve(n + 2 * graph.edge_count());
    for (NodeId k = 0; k < n; ++k) t.push_back({k, k, a_diag[k] / d_sum[k]});
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const auto& edge = graph.edge(e);
        t.push_back({edge.u, edge.v, a_edge[e] / d_sum[edge.u]});
        t.push_back({edge.v, edge.u, a_edge[e] / d_sum[edge.v]});
    }

    DiffusionKernel kernel;
    kernel.p = SparseMatrix(n, n, std::move(t));
    kernel.epsilon = epsilon;
    kernel.affinity_row_sums = std::move(w_sum);
    kernel.density_row_sums = std::move(d_sum);
    return kernel;
}

SparseMatrix graph_laplacian(const DiffusionKernel& kernel) {
    const std::size_t n = kernel.size();
    const double scale = std::isinf(kernel.epsilon) ? 1.0 : 1.0 / kernel.epsilon;
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(kernel.p.nonzeros() + n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, scale});
    const auto rp = kernel.p.row_pointers();
    const auto ci = kernel.p.column_indices();
    const auto v = kernel.p.values();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) t.push_back({i, ci[k], -scale * v[k]});
    return SparseMatrix(n, n, std::move(t));
}

void require_restart_probability(double p) {
    if (!(p > 1e-6 && p < 1.0)) throw InvalidParameter("restart probability p must lie in (1e-6, 1)");
}

NeighborProbability neighbor_probability_dense(const DiffusionKernel& kernel, double p) {
    require_restart_probability(p);
    const auto n = static_cast<Eigen::Index>(kernel.size());
    const double pbar = 1.0 - p;
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - pbar * kernel.p.to_dense();
    Eigen::MatrixXd result = dense_solve(system, p * Eigen::MatrixXd::Identity(n, n));

    const double floor = result.minCoeff();
    if (floor < -1e-12)
        throw SingularMatrix("neighbor probability has entry " + std::to_string(floor) +
                             " below -1e-12; system is ill-conditioned");
    result = result.cwiseMax(0.0);

    NeighborProbability out;
    out.mode = ProbabilityMode::Dense;
    out.p = p;
    out.dense = std::move(result);
    return out;
}

Eigen::MatrixXd neighbor_probability_series(const DiffusionKernel& kernel, double p, double tol) {
    require_restart_probability(p);
    if (!(tol > 0.0)) throw InvalidParameter("series tolerance must be positive");
    const auto n = static_cast<Eigen::Index>(kernel.size());
    const double pbar = 1.0 - p;

    const auto rp = kernel.p.row_pointers();
    const auto ci = kernel.p.column_indices();
    const auto v = kernel.p.values();

    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);  // P^m
    Eigen::MatrixXd sum = p * power;
    double weight = p;   // p (1-p)^m
    double tail = pbar;  // (1-p)^{m+1}
    Eigen::MatrixXd next(n, n);
    while (tail > tol) {
        // next = power * P, one sparse row of P at a time.
        next.setZero();
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            for (std::size_t idx = rp[kk]; idx < rp[kk + 1]; ++idx)
                next.col(static_cast<Eigen::Index>(ci[idx])) += v[idx] * power.col(k);
        }
        power.swap(next);
        weight *= pbar;
        tail *= pbar;
        sum += weight * power;
    }
    return sum;
}

std::vector<double> edge_scores_dense(const Eigen::MatrixXd& n, const NNGraph& graph) {
    std::vector<double> out(graph.edge_count());
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const auto l = static_cast<Eigen::Index>(graph.edge(e).u);
        const auto m = static_cast<Eigen::Index>(graph.edge(e).v);
        out[e] = 0.5 * (n(l, m) + n(m, l));
    }
    return out;
}

std::vector<double> edge_scores_lowrank(const DiffusionKernel& kernel, double p, std::size_t j,
                                        const NNGraph& graph, const EigenOptions& options) {
    require_restart_probability(p);
    if (graph.node_count() != kernel.size()) throw InvalidParameter("graph and kernel sizes differ");
    if (j == 0 || j > kernel.size()) throw InvalidParameter("low-rank J must satisfy 0 < J <= n");
    if (graph.edge_count() == 0) return {};

    const EigenPairs pairs = top_eigenpairs(kernel.p, kernel.density_row_sums, j, options);
    const double pbar = 1.0 - p;
    std::vector<double> coef(j);
    for (std::size_t c = 0; c < j; ++c)
        coef[c] = p / (1.0 - pbar * pairs.values[c]) / pairs.left[c].dot(pairs.right[c]);

    std::vector<double> out(graph.edge_count());
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const auto l = static_cast<Eigen::Index>(graph.edge(e).u);
        const auto m = static_cast<Eigen::Index>(graph.edge(e).v);
        double lm = 0.0;
        double ml = 0.0;
        for (std::size_t c = 0; c < j; ++c) {
            lm += coef[c] * pairs.right[c](l) * pairs.left[c](m);
            ml += coef[c] * pairs.right[c](m) * pairs.left[c](l);
        }
        out[e] = 0.5 * (lm + ml);
    }
    return out;
}

IdentityDeviation regularized_laplacian_identity_check(const DiffusionKernel& kernel, double p) {
    require_restart_probability(p);
    const auto n = static_cast<Eigen::Index>(kernel.size());
    const double pbar = 1.0 - p;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd pm = kernel.p.to_dense();
    const Eigen::MatrixXd system = eye - pbar * pm;

    const Eigen::MatrixXd inverse = dense_solve(system, eye);
    const Eigen::MatrixXd nmat = p * inverse;

    IdentityDeviation dev;
    dev.neighbor_laplacian = ((eye - nmat) - pbar * (eye - pm) * inverse).cwiseAbs().maxCoeff();
    dev.regularized_inverse = (system - (p * eye + pbar * (eye - pm))).cwiseAbs().maxCoeff();
    return dev;
}

}  // namespace gd
