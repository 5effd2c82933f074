#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "graphdenoise/graph.hpp"
#include "graphdenoise/linalg.hpp"

namespace gd {

/// Diffusion-maps random-walk kernel on a graph.
///
/// Built in three steps: edge affinities exp(-d^2 / epsilon) with unit diagonal (W),
/// density normalization A = W_D^{-1} W W_D^{-1} with W_D the row sums of W, then
/// P = D^{-1} A with D the row sums of A. `epsilon = +inf` gives unit weight on every
/// edge.
struct DiffusionKernel {
    SparseMatrix p;
    double epsilon = 0.0;
    std::vector<double> affinity_row_sums;  // diagonal of the first normalization
    std::vector<double> density_row_sums;   // D, the similarity scaling for P

    std::size_t size() const noexcept { return p.rows(); }
};

DiffusionKernel diffusion_kernel(const NNGraph& graph, double epsilon);

/// median(d_e) / 2 over the graph's edges; 1 for an edgeless graph.
double default_epsilon(const NNGraph& graph);

/// L = (I - P) / epsilon. For epsilon = +inf the unscaled I - P is returned.
SparseMatrix graph_laplacian(const DiffusionKernel& kernel);

enum class ProbabilityMode { Dense, LowRank, Series };

/// Stop-probability neighbor matrix N = p (I - (1-p) P)^{-1}.
struct NeighborProbability {
    ProbabilityMode mode = ProbabilityMode::Dense;
    double p = 0.0;
    std::optional<Eigen::MatrixXd> dense;
    std::optional<EigenPairs> lowrank;
};

/// Rejects p outside (1e-6, 1): smaller restart probabilities leave I - (1-p)P too
/// close to singular.
void require_restart_probability(double p);

/// Dense N via a direct solve of (I - (1-p) P) N = p I. Entries in [-1e-12, 0) are
/// clamped to zero; anything more negative is reported as a SingularMatrix failure.
NeighborProbability neighbor_probability_dense(const DiffusionKernel& kernel, double p);

/// Truncated series sum_{m=0}^{M} p (1-p)^m P^m with M the first index where
/// (1-p)^{M+1} <= tol. Independent of the direct solve.
Eigen::MatrixXd neighbor_probability_series(const DiffusionKernel& kernel, double p, double tol);

/// Symmetrized score (N_lm + N_ml) / 2 per edge id from the dense matrix.
std::vector<double> edge_scores_dense(const Eigen::MatrixXd& n, const NNGraph& graph);

/// Symmetrized scores per edge id from the top-J eigenpairs of P:
/// N_lm ~ sum_j p / (1 - (1-p) l_j) * (vR_j)_l (vL_j)_m / <vL_j, vR_j>.
std::vector<double> edge_scores_lowrank(const DiffusionKernel& kernel, double p, std::size_t j,
                                        const NNGraph& graph, const EigenOptions& options = {});

struct IdentityDeviation {
    /// max |(I - N) - (1-p)(I - P)(I - (1-p)P)^{-1}|
    double neighbor_laplacian = 0.0;
    /// max |(I - (1-p)P) - (p I + (1-p)(I - P))|
    double regularized_inverse = 0.0;

    double max() const noexcept { return std::max(neighbor_laplacian, regularized_inverse); }
};

/// Evaluates both sides of the identities tying N to the regularized graph Laplacian.
IdentityDeviation regularized_laplacian_identity_check(const DiffusionKernel& kernel, double p);

}  // namespace gd
