#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace gd {

/// Row-compressed real matrix. Column indices strictly increase within a row and no
/// explicit zeros are stored.
class SparseMatrix {
public:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };

    SparseMatrix() = default;
    /// Duplicate (row, col) entries are summed; entries that sum to zero are dropped.
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

    static SparseMatrix identity(std::size_t n);
    static SparseMatrix from_dense(const Eigen::MatrixXd& dense);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_pointers() const noexcept { return row_ptr_; }
    std::span<const std::size_t> column_indices() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Entry (i, j), zero when not stored.
    double coeff(std::size_t i, std::size_t j) const;
    Eigen::MatrixXd to_dense() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// A x. Throws InvalidParameter on dimension mismatch.
Eigen::VectorXd matvec(const SparseMatrix& a, const Eigen::VectorXd& x);
/// A^T x.
Eigen::VectorXd matvec_transposed(const SparseMatrix& a, const Eigen::VectorXd& x);

/// Solves A X = B by LU with partial pivoting. Throws SingularMatrix when a pivot falls
/// below 1e-14 * max|A|.
Eigen::MatrixXd dense_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Leading eigenpairs of a matrix similar to a symmetric one.
struct EigenPairs {
    std::vector<double> values;           // descending
    std::vector<Eigen::VectorXd> right;   // unit 2-norm
    std::vector<Eigen::VectorXd> left;    // unit 2-norm
    std::size_t iterations = 0;           // restart cycles; 0 when the dense route was taken
};

enum class EigenRoute { Automatic, Dense, Iterative };

struct EigenOptions {
    double tol = 1e-8;
    std::size_t max_iterations = 10'000;  // restart cycles of the iterative route
    EigenRoute route = EigenRoute::Automatic;
    /// Automatic route uses a dense decomposition up to this size.
    std::size_t dense_threshold = 600;
};

/// Top-J eigenpairs of P, where S = D^{1/2} P D^{-1/2} is symmetric for the supplied
/// positive diagonal D. Eigenvectors come from the symmetric problem: for S u = l u the
/// right vector is D^{-1/2} u and the left vector D^{1/2} u, each rescaled to unit norm.
///
/// Throws ConvergenceFailure if the iterative route does not reach `tol` (measured as
/// ||P v - l v|| / ||v|| on both sides) within the iteration cap.
EigenPairs top_eigenpairs(const SparseMatrix& p, std::span<const double> d_diag, std::size_t j,
                          const EigenOptions& options = {});

}  // namespace gd
