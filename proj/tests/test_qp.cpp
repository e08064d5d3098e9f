#include <gtest/gtest.h>

#include "dlrsim/qp.h"

#include <Eigen/Dense>

#include <random>

using namespace dlrsim::qp;

namespace {

Eigen::SparseMatrix<double> sparse(const Eigen::MatrixXd& m) { return m.sparseView(); }

Problem small_qp() {
    Eigen::MatrixXd p(2, 2), a(3, 2);
    p << 4, 1, 1, 2;
    a << 1, 1, 1, 0, 0, 1;
    Problem pr;
    pr.P = sparse(p);
    pr.q = Eigen::Vector2d(1, 1);
    pr.A = sparse(a);
    pr.l = Eigen::Vector3d(1, 0, 0);
    pr.u = Eigen::Vector3d(1, 0.7, 0.7);
    return pr;
}

// Box-constrained strictly convex QP by projected gradient: an independent
// first-order oracle.
Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& p, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const double step = 1.0 / p.selfadjointView<Eigen::Upper>().eigenvalues().maxCoeff();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(q.size()).cwiseMax(lo).cwiseMin(hi);
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXd xn = (x - step * (p * x + q)).cwiseMax(lo).cwiseMin(hi);
        if ((xn - x).lpNorm<Eigen::Infinity>() < 1e-13) return xn;
        x = xn;
    }
    return x;
}

}  // namespace

TEST(QpSolver, SmallQp) {
    Solver s(small_qp());
    auto r = s.solve();
    ASSERT_EQ(r.status, Status::Solved);
    EXPECT_NEAR(r.x(0), 0.3, 1e-6);
    EXPECT_NEAR(r.x(1), 0.7, 1e-6);
    EXPECT_NEAR(r.objective, 1.88, 1e-6);
}

TEST(QpSolver, LinearProgram) {
    Problem pr;
    pr.P = Eigen::SparseMatrix<double>(2, 2);
    pr.q = Eigen::Vector2d(-1, -1);
    Eigen::MatrixXd a(4, 2);
    a << 1, 2, 3, 1, 1, 0, 0, 1;
    pr.A = sparse(a);
    pr.l = Eigen::Vector4d(-kInf, -kInf, 0, 0);
    pr.u = Eigen::Vector4d(4, 6, kInf, kInf);
    Solver s(pr);
    auto r = s.solve();
    ASSERT_EQ(r.status, Status::Solved);
    EXPECT_NEAR(r.x(0), 1.6, 1e-7);
    EXPECT_NEAR(r.x(1), 1.2, 1e-7);
    EXPECT_NEAR(r.objective, -2.8, 1e-7);
}

TEST(QpSolver, ConstantIsReported) {
    auto pr = small_qp();
    pr.constant = 10.0;
    EXPECT_NEAR(Solver(pr).solve().objective, 11.88, 1e-6);
}

TEST(QpSolver, InfeasibleBoundsDetectedBeforeSolve) {
    auto pr = small_qp();
    pr.l(1) = 0.8;
    EXPECT_THROW(Solver{pr}, InfeasibleBounds);
    Solver s(small_qp());
    Eigen::VectorXd l = small_qp().l, u = small_qp().u;
    l(2) = 2.0;
    EXPECT_THROW(s.update(small_qp().q, l, u), InfeasibleBounds);
}

TEST(QpSolver, MaxIterationsStatus) {
    Settings set;
    set.max_iter = 2;
    auto r = Solver(small_qp(), set).solve();
    EXPECT_EQ(r.status, Status::MaxIterations);
    EXPECT_EQ(r.iterations, 2);
}

TEST(QpSolver, RandomBoxQpsMatchProjectedGradient) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 6;
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = g(rng);
        Eigen::MatrixXd p = m * m.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd q(n), lo(n), hi(n);
        for (int i = 0; i < n; ++i) {
            q(i) = 5.0 * g(rng);
            lo(i) = -1.0 - std::abs(g(rng));
            hi(i) = 1.0 + std::abs(g(rng));
        }
        Problem pr;
        pr.P = sparse(p);
        pr.q = q;
        pr.A = sparse(Eigen::MatrixXd::Identity(n, n));
        pr.l = lo;
        pr.u = hi;
        auto r = Solver(pr).solve();
        ASSERT_EQ(r.status, Status::Solved);
        auto oracle = projected_gradient(p, q, lo, hi);
        EXPECT_LT((r.x - oracle).lpNorm<Eigen::Infinity>(), 1e-6) << "trial " << trial;
    }
}

TEST(QpSolver, EqualityConstrainedMatchesKktSolve) {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6, me = 2;
        Eigen::MatrixXd m(n, n), a(me, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = g(rng);
        for (int i = 0; i < me; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = g(rng);
        Eigen::MatrixXd p = m * m.transpose() + Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd q(n), b(me);
        for (int i = 0; i < n; ++i) q(i) = g(rng);
        for (int i = 0; i < me; ++i) b(i) = g(rng);
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + me, n + me);
        kkt.topLeftCorner(n, n) = p;
        kkt.topRightCorner(n, me) = a.transpose();
        kkt.bottomLeftCorner(me, n) = a;
        Eigen::VectorXd rhs(n + me);
        rhs << -q, b;
        Eigen::VectorXd oracle = kkt.fullPivLu().solve(rhs).head(n);
        Problem pr;
        pr.P = sparse(p);
        pr.q = q;
        pr.A = sparse(a);
        pr.l = b;
        pr.u = b;
        auto r = Solver(pr).solve();
        ASSERT_EQ(r.status, Status::Solved);
        EXPECT_LT((r.x - oracle).lpNorm<Eigen::Infinity>(), 1e-7);
    }
}

TEST(QpSolver, UpdateReusesFactorizationAndIsDeterministic) {
    Solver s(small_qp());
    s.solve();
    EXPECT_EQ(s.analyses(), 1);
    Eigen::VectorXd l = small_qp().l, u = small_qp().u;
    u(2) = 0.6;
    s.update(small_qp().q, l, u);
    auto r2 = s.solve();
    ASSERT_EQ(r2.status, Status::Solved);
    EXPECT_NEAR(r2.x(0), 0.4, 1e-6);
    EXPECT_NEAR(r2.x(1), 0.6, 1e-6);
    EXPECT_EQ(s.analyses(), 1);

    Solver a(small_qp()), b(small_qp());
    auto ra = a.solve(), rb = b.solve();
    EXPECT_EQ(ra.x, rb.x);
    EXPECT_EQ(ra.objective, rb.objective);
}
