#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstddef>

namespace tracerec {

struct SvdOptions {
    /// Off-diagonal tolerance of the Jacobi eigen-solver, relative to the
    /// geometric mean of the two diagonal entries.
    double tolerance = 1e-10;
    int max_sweeps = 100;
    /// Singular values at or below this fraction of the largest are treated as zero.
    double rank_cutoff = 1e-12;
};

struct SymmetricEigen {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // columns, matching `values`
    int sweeps = 0;
};

/// Eigen-decomposition of a symmetric matrix by the cyclic Jacobi method.
/// Throws NumericalError if the off-diagonal mass does not vanish within
/// `max_sweeps` sweeps.
SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tolerance = 1e-10, int max_sweeps = 100);

/// A ≈ U diag(σ) Vᵀ restricted to the leading singular triplets.
struct SvdResult {
    Eigen::MatrixXd u;               // rows(A) × k, orthonormal columns
    Eigen::VectorXd singular_values; // k, positive, non-increasing
    Eigen::MatrixXd v;               // cols(A) × k, orthonormal columns
    int sweeps = 0;                  // Jacobi sweeps spent (eigen + polishing)
};

/// Leading `k` singular triplets, computed from the Jacobi eigen-decomposition
/// of the smaller Gram matrix (AᵀA or AAᵀ) and polished by one-sided Jacobi
/// rotations on A·V. Singular vectors are signed so the largest-magnitude
/// entry of each left vector is non-negative.
///
/// Requires 1 <= k <= min(rows, cols) and a non-zero matrix (ValidationError).
/// Triplets whose singular value falls below rank_cutoff·σ₁ are dropped with
/// a warning, so the result may hold fewer than `k` columns.
SvdResult truncated_svd(const Eigen::MatrixXd& a, std::size_t k, const SvdOptions& options = {});
SvdResult truncated_svd(const Eigen::SparseMatrix<double>& a, std::size_t k, const SvdOptions& options = {});

}  // namespace tracerec
