#include "tracerec/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "tracerec/diagnostics.hpp"
#include "tracerec/error.hpp"

namespace tracerec {

namespace {

constexpr int kMaxPolishSweeps = 30;
constexpr double kPolishTolerance = 1e-15;
// Columns this small relative to the largest are numerically null; rotating
// them against each other only churns rounding noise.
constexpr double kNullColumn = 1e-14;

// Rotation (c, s) that annihilates the off-diagonal entry of the 2×2
// symmetric matrix [[app, apq], [apq, aqq]].
void jacobi_rotation(double app, double aqq, double apq, double& c, double& s) {
    const double theta = (aqq - app) / (2.0 * apq);
    const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = c * t;
}

// One-sided Jacobi on the columns of b, applying the same rotations to v.
// Returns the number of sweeps used.
int polish_columns(Eigen::MatrixXd& b, Eigen::MatrixXd& v) {
    const auto n = b.cols();
    for (int sweep = 1; sweep <= kMaxPolishSweeps; ++sweep) {
        Eigen::VectorXd norms2 = b.colwise().squaredNorm().transpose();
        const double largest = norms2.size() ? norms2.maxCoeff() : 0.0;
        const double floor2 = kNullColumn * kNullColumn * largest;
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = norms2(p);
                const double beta = norms2(q);
                if (alpha <= floor2 || beta <= floor2) continue;
                const double gamma = b.col(p).dot(b.col(q));
                if (std::abs(gamma) <= kPolishTolerance * std::sqrt(alpha * beta)) continue;
                double c = 0.0;
                double s = 0.0;
                jacobi_rotation(alpha, beta, gamma, c, s);
                const double t = s / c;
                Eigen::VectorXd bp = b.col(p);
                b.col(p) = c * bp - s * b.col(q);
                b.col(q) = s * bp + c * b.col(q);
                Eigen::VectorXd vp = v.col(p);
                v.col(p) = c * vp - s * v.col(q);
                v.col(q) = s * vp + c * v.col(q);
                norms2(p) = alpha - t * gamma;
                norms2(q) = beta + t * gamma;
                rotated = true;
            }
        }
        if (!rotated) return sweep;
    }
    throw NumericalError("one-sided Jacobi polishing did not converge after " + std::to_string(kMaxPolishSweeps) +
                         " sweeps");
}

// SVD of a matrix with rows >= cols.
SvdResult tall_svd(const Eigen::MatrixXd& a, std::size_t k, const SvdOptions& options) {
    const Eigen::MatrixXd gram = a.transpose() * a;
    auto eig = jacobi_eigen(gram, options.tolerance, options.max_sweeps);

    Eigen::MatrixXd v = std::move(eig.vectors);
    Eigen::MatrixXd b = a * v;
    const int polish_sweeps = polish_columns(b, v);

    const auto n = b.cols();
    Eigen::VectorXd sigma = b.colwise().norm().transpose();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return sigma(i) > sigma(j); });

    const double sigma1 = sigma(order.front());
    if (!(sigma1 > 0.0)) throw ValidationError("cannot decompose an all-zero matrix");

    std::size_t kept = 0;
    while (kept < k && sigma(order[kept]) > options.rank_cutoff * sigma1) ++kept;
    if (kept < k) {
        warn("requested " + std::to_string(k) + " singular triplets but only " + std::to_string(kept) +
             " exceed the rank cutoff; truncating");
    }

    SvdResult result;
    result.u.resize(a.rows(), static_cast<Eigen::Index>(kept));
    result.v.resize(a.cols(), static_cast<Eigen::Index>(kept));
    result.singular_values.resize(static_cast<Eigen::Index>(kept));
    result.sweeps = eig.sweeps + polish_sweeps;
    for (std::size_t i = 0; i < kept; ++i) {
        const auto src = order[i];
        const auto dst = static_cast<Eigen::Index>(i);
        Eigen::VectorXd u = b.col(src) / sigma(src);
        Eigen::VectorXd vi = v.col(src);
        Eigen::Index pivot = 0;
        u.cwiseAbs().maxCoeff(&pivot);
        if (u(pivot) < 0.0) {
            u = -u;
            vi = -vi;
        }
        result.u.col(dst) = u;
        result.v.col(dst) = vi;
        result.singular_values(dst) = sigma(src);
    }
    return result;
}

}  // namespace

SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tolerance, int max_sweeps) {
    if (a.rows() != a.cols()) throw ValidationError("jacobi_eigen needs a square matrix");
    const auto n = a.rows();
    Eigen::MatrixXd vectors = Eigen::MatrixXd::Identity(n, n);
    const double scale = n ? a.diagonal().cwiseAbs().maxCoeff() : 0.0;
    const double absolute_floor = kNullColumn * scale;

    int sweep = 0;
    bool converged = n < 2;
    while (!converged) {
        if (sweep == max_sweeps) {
            throw NumericalError("Jacobi eigen-solver did not converge after " + std::to_string(sweep) + " sweeps");
        }
        ++sweep;
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                if (std::abs(apq) <= tolerance * std::sqrt(std::abs(app * aqq)) || std::abs(apq) <= absolute_floor) {
                    continue;
                }
                double c = 0.0;
                double s = 0.0;
                jacobi_rotation(app, aqq, apq, c, s);
                // A ← JᵀAJ, touching rows/columns p and q only.
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double apr = a(p, r);
                    const double aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double vrp = vectors(r, p);
                    const double vrq = vectors(r, q);
                    vectors(r, p) = c * vrp - s * vrq;
                    vectors(r, q) = s * vrp + c * vrq;
                }
                rotated = true;
            }
        }
        converged = !rotated;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
    }
    out.sweeps = sweep;
    return out;
}

SvdResult truncated_svd(const Eigen::MatrixXd& a, std::size_t k, const SvdOptions& options) {
    const auto smaller = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
    if (k == 0 || k > smaller) {
        throw ValidationError("truncated_svd: k=" + std::to_string(k) + " must lie in 1.." + std::to_string(smaller));
    }
    if (a.rows() >= a.cols()) return tall_svd(a, k, options);
    SvdResult t = tall_svd(a.transpose(), k, options);
    // Re-sign so the convention holds for the left vectors of A.
    for (Eigen::Index i = 0; i < t.v.cols(); ++i) {
        Eigen::Index pivot = 0;
        t.v.col(i).cwiseAbs().maxCoeff(&pivot);
        if (t.v(pivot, i) < 0.0) {
            t.v.col(i) *= -1.0;
            t.u.col(i) *= -1.0;
        }
    }
    std::swap(t.u, t.v);
    return t;
}

SvdResult truncated_svd(const Eigen::SparseMatrix<double>& a, std::size_t k, const SvdOptions& options) {
    return truncated_svd(Eigen::MatrixXd(a), k, options);
}

}  // namespace tracerec
