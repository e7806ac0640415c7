#include <doctest.h>

#include <Eigen/SVD>

#include "support.hpp"
#include "tracerec/diagnostics.hpp"
#include "tracerec/error.hpp"
#include "tracerec/svd.hpp"

using namespace tracerec;

namespace {

Eigen::MatrixXd random_matrix(testing::Gen& g, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g.real(-1.0, 1.0);
    return m;
}

void check_triplets(const Eigen::MatrixXd& a, const SvdResult& r) {
    const auto k = r.singular_values.size();
    const double s1 = r.singular_values(0);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
    CHECK((r.u.transpose() * r.u - id).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((r.v.transpose() * r.v - id).cwiseAbs().maxCoeff() <= 1e-8);
    for (Eigen::Index i = 0; i < k; ++i) {
        CHECK(r.singular_values(i) > 0.0);
        if (i > 0) CHECK(r.singular_values(i) <= r.singular_values(i - 1));
        CHECK((a * r.v.col(i) - r.singular_values(i) * r.u.col(i)).norm() <= 1e-10 * s1);
        Eigen::Index arg = 0;
        r.u.col(i).cwiseAbs().maxCoeff(&arg);
        CHECK(r.u(arg, i) >= 0.0);
    }
}

}  // namespace

TEST_CASE("jacobi_eigen matches a library eigen-solver") {
    testing::Gen g(21);
    for (int n : {1, 2, 5, 9}) {
        const Eigen::MatrixXd b = random_matrix(g, n, n);
        const Eigen::MatrixXd s = b + b.transpose();
        const auto mine = jacobi_eigen(s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(s);
        Eigen::VectorXd expected = ref.eigenvalues().reverse();
        CHECK((mine.values - expected).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((s * mine.vectors - mine.vectors * mine.values.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("jacobi_eigen reports non-convergence with the sweep count") {
    testing::Gen g(4);
    const Eigen::MatrixXd b = random_matrix(g, 12, 12);
    try {
        jacobi_eigen(b * b.transpose(), 1e-10, 1);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("1 sweep") != std::string::npos);
    }
}

TEST_CASE("truncated_svd of a diagonal matrix") {
    Eigen::MatrixXd a = Eigen::Vector3d(3, 2, 1).asDiagonal();
    const auto r = truncated_svd(a, 2);
    CHECK(r.singular_values(0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(r.singular_values(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.u.col(0).isApprox(Eigen::Vector3d(1, 0, 0), 1e-12));
    CHECK(r.u.col(1).isApprox(Eigen::Vector3d(0, 1, 0), 1e-12));
    CHECK(r.v.col(0).cwiseAbs().isApprox(Eigen::Vector3d(1, 0, 0), 1e-12));
}

TEST_CASE("truncated_svd full-rank reconstruction") {
    testing::Gen g(8);
    const Eigen::MatrixXd a = random_matrix(g, 8, 6);
    const auto r = truncated_svd(a, 6);
    const Eigen::MatrixXd back = r.u * r.singular_values.asDiagonal() * r.v.transpose();
    CHECK((a - back).norm() <= 1e-8 * a.norm());
    check_triplets(a, r);
}

TEST_CASE("truncated_svd of a rank-one matrix") {
    Eigen::VectorXd u(4), v(3);
    u << 1, -2, 0.5, 3;
    v << 2, 1, -1;
    const Eigen::MatrixXd a = u * v.transpose();
    const auto r = truncated_svd(a, 1);
    CHECK(std::abs(r.singular_values(0) - u.norm() * v.norm()) <= 1e-10);

    WarningCapture warnings;
    const auto more = truncated_svd(a, 3);
    CHECK(more.singular_values.size() == 1);
    CHECK_FALSE(warnings.messages().empty());
}

TEST_CASE("truncated_svd agrees with a bidiagonal-divide-and-conquer SVD") {
    testing::Gen g(99);
    for (int round = 0; round < 25; ++round) {
        const auto rows = static_cast<Eigen::Index>(g.between(1, 30));
        const auto cols = static_cast<Eigen::Index>(g.between(1, 30));
        Eigen::MatrixXd a = random_matrix(g, rows, cols);
        // sparsify like a term-document matrix
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                if (g.chance(0.6)) a(i, j) = 0.0;
        if (a.isZero()) a(0, 0) = 1.0;
        Eigen::BDCSVD<Eigen::MatrixXd> ref(a);
        const auto& sv = ref.singularValues();
        Eigen::Index rank = 0;
        while (rank < sv.size() && sv(rank) > 1e-9 * sv(0)) ++rank;
        const auto k = static_cast<std::size_t>(g.between(1, static_cast<std::size_t>(std::min(rows, cols))));

        WarningCapture quiet;
        const auto r = truncated_svd(a, k);
        const auto kept = r.singular_values.size();
        CHECK(kept == std::min<Eigen::Index>(static_cast<Eigen::Index>(k), rank));
        for (Eigen::Index i = 0; i < kept; ++i) CHECK(std::abs(r.singular_values(i) - sv(i)) <= 1e-10 * sv(0));
        check_triplets(a, r);

        const Eigen::SparseMatrix<double> sparse = a.sparseView();
        const auto rs = truncated_svd(sparse, k);
        CHECK(rs.singular_values.isApprox(r.singular_values, 1e-14));
    }
}

TEST_CASE("truncated_svd errors") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 2);
    CHECK_THROWS_AS(truncated_svd(a, 0), ValidationError);
    CHECK_THROWS_AS(truncated_svd(a, 3), ValidationError);
    CHECK_THROWS_AS(truncated_svd(Eigen::MatrixXd::Zero(3, 3), 1), ValidationError);
}
