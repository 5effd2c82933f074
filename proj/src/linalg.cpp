#include "graphdenoise/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "graphdenoise/error.hpp"

namespace gd {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols) {
    for (const auto& t : triplets)
        if (t.row >= rows || t.col >= cols) throw InvalidParameter("sparse entry out of range");
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row < b.row || (a.row == b.row && a.col < b.col);
    });
    row_ptr_.assign(rows + 1, 0);
    std::size_t k = 0;
    while (k < triplets.size()) {
        std::size_t r = triplets[k].row;
        std::size_t c = triplets[k].col;
        double sum = 0.0;
        while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) sum += triplets[k++].value;
        if (sum != 0.0) {
            col_idx_.push_back(c);
            values_.push_back(sum);
            ++row_ptr_[r + 1];
        }
    }
    for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return SparseMatrix(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense) {
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < dense.rows(); ++i)
        for (Eigen::Index j = 0; j < dense.cols(); ++j)
            if (dense(i, j) != 0.0)
                t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), dense(i, j)});
    return SparseMatrix(static_cast<std::size_t>(dense.rows()), static_cast<std::size_t>(dense.cols()),
                        std::move(t));
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
    auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    auto it = std::lower_bound(first, last, j);
    if (it != last && *it == j) return values_[static_cast<std::size_t>(it - col_idx_.begin())];
    return 0.0;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                                static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_idx_[k])) = values_[k];
    return out;
}

Eigen::VectorXd matvec(const SparseMatrix& a, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != a.cols()) throw InvalidParameter("matvec: dimension mismatch");
    const auto rp = a.row_pointers();
    const auto ci = a.column_indices();
    const auto v = a.values();
    Eigen::VectorXd y(static_cast<Eigen::Index>(a.rows()));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x(static_cast<Eigen::Index>(ci[k]));
        y(static_cast<Eigen::Index>(i)) = s;
    }
    return y;
}

Eigen::VectorXd matvec_transposed(const SparseMatrix& a, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != a.rows())
        throw InvalidParameter("matvec_transposed: dimension mismatch");
    const auto rp = a.row_pointers();
    const auto ci = a.column_indices();
    const auto v = a.values();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(a.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x(static_cast<Eigen::Index>(i));
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) y(static_cast<Eigen::Index>(ci[k])) += v[k] * xi;
    }
    return y;
}

Eigen::MatrixXd dense_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw InvalidParameter("dense_solve: matrix must be square");
    if (b.rows() != n) throw InvalidParameter("dense_solve: right-hand side has wrong row count");

    const double scale = n > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
    const double pivot_floor = 1e-14 * scale;

    Eigen::MatrixXd lu = a;
    Eigen::MatrixXd x = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot_row = 0;
        const double pivot = lu.col(k).tail(n - k).cwiseAbs().maxCoeff(&pivot_row);
        pivot_row += k;
        if (!(pivot > pivot_floor) || scale == 0.0)
            throw SingularMatrix("dense_solve: pivot " + std::to_string(pivot) + " at column " +
                                 std::to_string(k) + " below threshold");
        if (pivot_row != k) {
            lu.row(k).swap(lu.row(pivot_row));
            x.row(k).swap(x.row(pivot_row));
        }
        const Eigen::Index rest = n - k - 1;
        if (rest > 0) {
            lu.col(k).tail(rest) /= lu(k, k);
            lu.bottomRightCorner(rest, rest).noalias() -= lu.col(k).tail(rest) * lu.row(k).tail(rest);
        }
    }
    lu.triangularView<Eigen::UnitLower>().solveInPlace(x);
    lu.triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

namespace {

void fix_sign(Eigen::VectorXd& u) {
    Eigen::Index idx = 0;
    u.cwiseAbs().maxCoeff(&idx);
    if (u(idx) < 0.0) u = -u;
}

struct SymmetricOperator {
    const SparseMatrix& p;
    Eigen::VectorXd sqrt_d;
    Eigen::VectorXd inv_sqrt_d;

    // S x = D^{1/2} P D^{-1/2} x
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd out(x.rows(), x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            Eigen::VectorXd scaled = x.col(c).cwiseProduct(inv_sqrt_d);
            out.col(c) = matvec(p, scaled).cwiseProduct(sqrt_d);
        }
        return out;
    }
};

double right_residual(const SparseMatrix& p, const Eigen::VectorXd& v, double lambda) {
    return (matvec(p, v) - lambda * v).norm() / v.norm();
}

double left_residual(const SparseMatrix& p, const Eigen::VectorXd& v, double lambda) {
    return (matvec_transposed(p, v) - lambda * v).norm() / v.norm();
}

EigenPairs pairs_from_symmetric(const Eigen::MatrixXd& u, const std::vector<double>& values,
                                const SymmetricOperator& op) {
    EigenPairs out;
    out.values = values;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::VectorXd col = u.col(c);
        fix_sign(col);
        Eigen::VectorXd r = col.cwiseProduct(op.inv_sqrt_d);
        Eigen::VectorXd l = col.cwiseProduct(op.sqrt_d);
        out.right.push_back(r / r.norm());
        out.left.push_back(l / l.norm());
    }
    return out;
}

EigenPairs dense_route(const SymmetricOperator& op, std::size_t j) {
    const auto n = static_cast<Eigen::Index>(op.p.rows());
    Eigen::MatrixXd s = op.p.to_dense();
    s = op.sqrt_d.asDiagonal() * s * op.inv_sqrt_d.asDiagonal();
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("dense symmetric eigensolver failed", NAN);
    // Eigen returns ascending order.
    std::vector<double> values;
    Eigen::MatrixXd u(n, static_cast<Eigen::Index>(j));
    for (std::size_t c = 0; c < j; ++c) {
        const Eigen::Index src = n - 1 - static_cast<Eigen::Index>(c);
        values.push_back(es.eigenvalues()(src));
        u.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(src);
    }
    return pairs_from_symmetric(u, values, op);
}

// Appends the columns of y to the orthonormal basis v after two rounds of classical
// Gram-Schmidt; columns that vanish against the basis are dropped.
Eigen::MatrixXd orthonormal_extension(const Eigen::MatrixXd& v, Eigen::MatrixXd y) {
    Eigen::MatrixXd out(y.rows(), 0);
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        Eigen::VectorXd col = y.col(c);
        const double before = col.norm();
        if (before == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            if (v.cols() > 0) col -= v * (v.transpose() * col);
            if (out.cols() > 0) col -= out * (out.transpose() * col);
        }
        const double after = col.norm();
        if (after <= 1e-10 * before) continue;
        out.conservativeResize(Eigen::NoChange, out.cols() + 1);
        out.col(out.cols() - 1) = col / after;
    }
    return out;
}

// Restarted block Krylov iteration with Rayleigh-Ritz: each cycle grows the basis
// span{X, SX, S^2 X, ...} to at most `limit` vectors, extracts the algebraically largest
// Ritz pairs and restarts from the leading block of them.
EigenPairs iterative_route(const SymmetricOperator& op, std::size_t j, const EigenOptions& opt) {
    const auto n = static_cast<Eigen::Index>(op.p.rows());
    const auto want = static_cast<Eigen::Index>(j);
    const Eigen::Index block = std::min<Eigen::Index>(n, want + std::min<Eigen::Index>(want, 8) + 2);
    const Eigen::Index limit = std::min<Eigen::Index>(n, std::max<Eigen::Index>(3 * block, block + 40));

    // Residuals on P are at most sqrt(max D / min D) times the residual on S.
    const double spread = op.sqrt_d.maxCoeff() / op.sqrt_d.minCoeff();
    const double sym_tol = opt.tol / std::max(1.0, spread);

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(n, block);
    for (Eigen::Index c = 0; c < block; ++c)
        for (Eigen::Index r = 0; r < n; ++r) x(r, c) = normal(rng);

    double worst = NAN;
    for (std::size_t cycle = 1; cycle <= opt.max_iterations; ++cycle) {
        Eigen::MatrixXd v(n, 0);
        Eigen::MatrixXd sv(n, 0);
        Eigen::MatrixXd grow = x;
        while (v.cols() < limit) {
            Eigen::MatrixXd fresh = orthonormal_extension(v, grow);
            if (fresh.cols() == 0) break;
            if (v.cols() + fresh.cols() > limit) fresh.conservativeResize(Eigen::NoChange, limit - v.cols());
            const Eigen::MatrixXd s_fresh = op.apply(fresh);
            v.conservativeResize(Eigen::NoChange, v.cols() + fresh.cols());
            v.rightCols(fresh.cols()) = fresh;
            sv.conservativeResize(Eigen::NoChange, sv.cols() + fresh.cols());
            sv.rightCols(fresh.cols()) = s_fresh;
            grow = s_fresh;
        }

        Eigen::MatrixXd h = v.transpose() * sv;
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success) throw ConvergenceFailure("Rayleigh-Ritz step failed", NAN);
        const Eigen::Index m = h.rows();
        const Eigen::Index keep = std::min(block, m);
        if (keep < want) throw ConvergenceFailure("Krylov basis collapsed below J vectors", NAN);
        const Eigen::MatrixXd u = es.eigenvectors().rightCols(keep).rowwise().reverse();
        const Eigen::VectorXd theta = es.eigenvalues().tail(keep).reverse();
        const Eigen::MatrixXd ritz = v * u;
        const Eigen::MatrixXd ritz_s = sv * u;

        worst = 0.0;
        for (Eigen::Index c = 0; c < want; ++c)
            worst = std::max(worst, (ritz_s.col(c) - theta(c) * ritz.col(c)).norm());
        if (worst <= sym_tol || m == n) {
            std::vector<double> values(theta.data(), theta.data() + want);
            auto out = pairs_from_symmetric(ritz.leftCols(want), values, op);
            out.iterations = cycle;
            return out;
        }
        x = ritz;
    }
    throw ConvergenceFailure("Krylov iteration hit the cycle cap of " + std::to_string(opt.max_iterations),
                             worst);
}

}  // namespace

EigenPairs top_eigenpairs(const SparseMatrix& p, std::span<const double> d_diag, std::size_t j,
                          const EigenOptions& options) {
    const std::size_t n = p.rows();
    if (p.cols() != n) throw InvalidParameter("top_eigenpairs: matrix must be square");
    if (d_diag.size() != n) throw InvalidParameter("top_eigenpairs: diagonal size mismatch");
    if (j == 0 || j > n) throw InvalidParameter("top_eigenpairs: need 0 < J <= n");

    SymmetricOperator op{p, Eigen::VectorXd(static_cast<Eigen::Index>(n)),
                         Eigen::VectorXd(static_cast<Eigen::Index>(n))};
    for (std::size_t i = 0; i < n; ++i) {
        if (!(d_diag[i] > 0.0)) throw InvalidParameter("top_eigenpairs: diagonal must be positive");
        op.sqrt_d(static_cast<Eigen::Index>(i)) = std::sqrt(d_diag[i]);
        op.inv_sqrt_d(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(d_diag[i]);
    }

    bool dense = options.route == EigenRoute::Dense ||
                 (options.route == EigenRoute::Automatic && n <= options.dense_threshold);
    // The block would span the whole space; the dense route is exact and cheaper.
    if (options.route != EigenRoute::Iterative && j + std::max<std::size_t>(j, 8) >= n) dense = true;

    EigenPairs out = dense ? dense_route(op, j) : iterative_route(op, j, options);

    if (!dense) {
        for (std::size_t c = 0; c < j; ++c) {
            double res = std::max(right_residual(p, out.right[c], out.values[c]),
                                  left_residual(p, out.left[c], out.values[c]));
            if (res > options.tol)
                throw ConvergenceFailure("eigenpair " + std::to_string(c) + " misses tolerance", res);
        }
    }
    return out;
}

}  // namespace gd
