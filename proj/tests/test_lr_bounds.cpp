#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "tachyquench/lr_bounds.hpp"

using namespace tachyquench;

constexpr double e = std::numbers::e;

TEST(Velocity, Examples) {
    auto s = QuenchSpec::chain(41, 1.0, 1.0);
    s.omega = 10;
    EXPECT_NEAR(v_lr(s), e * std::sqrt(401.0), 1e-12);
    EXPECT_NEAR(v_lr(s), 54.4335511947474426, 1e-12);
    s.m_sq_final = 0;
    EXPECT_DOUBLE_EQ(v_lr(s), 2 * e * s.light_speed());
    EXPECT_DOUBLE_EQ(v_lr_ratio(s), 1.0);
    auto t = QuenchSpec::hypercube(2, 7, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(v_lr(t), 2 * std::sqrt(2.0) * e * t.light_speed());
    EXPECT_DOUBLE_EQ(v_lr_ratio(t), 1.0);
    // tachyonic mass lowers the band top
    s.m_sq_final = -1;
    EXPECT_NEAR(v_lr(s), e * std::sqrt(399.0), 1e-12);
    s.m_sq_final = -400;
    EXPECT_THROW(v_lr(s), std::domain_error);
}

TEST(NormX, BandTop) {
    auto s = QuenchSpec::chain(41, 1.0, 1.0);
    s.omega = 5;
    EXPECT_EQ(norm_x(s), 101.0);
    s.m_sq_final = -1;
    EXPECT_EQ(norm_x(s), 99.0);
    const auto h = oracle::QuadraticHamiltonian::lattice(s, Branch::Final);
    EXPECT_NEAR(h.norm(), norm_x(s), 0.05 * norm_x(s)); // finite grid misses the exact band edge
    EXPECT_LE(h.norm(), norm_x(s) * (1 + 1e-12));
}

TEST(Envelope, Limits) {
    for (auto kind : {CommutatorKind::qq, CommutatorKind::pp}) {
        EXPECT_EQ(commutator_bound({100, 0.0, 5}, kind), 0.0);
        EXPECT_LT(commutator_bound({100, 1e-6, 5}, kind), 1e-50);
        EXPECT_THROW(commutator_bound({100, 2 * 5 / e, 5}, kind), std::domain_error);
        EXPECT_THROW(commutator_bound({100, 1.0, 0}, kind), std::invalid_argument);
    }
    const LRParams p{100, 1.0, 3};
    EXPECT_NEAR(commutator_bound(p, CommutatorKind::pp) / commutator_bound(p, CommutatorKind::qq), 100.0, 1e-12);
}

TEST(Envelope, Monotonicity) {
    for (int d : {1, 3, 10}) {
        double prev = 0;
        for (int i = 1; i < 50; ++i) {
            const double tau = i / 50.0 * 2 * d / e;
            const double b = commutator_bound({50, tau, d}, CommutatorKind::qq);
            EXPECT_GT(b, prev);
            prev = b;
        }
    }
    for (double tau : {0.3, 1.0, 3.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int d = static_cast<int>(std::ceil(e * tau / 2 + 0.01)); d < 40; ++d) {
            const double b = commutator_bound({50, tau, d}, CommutatorKind::qq);
            EXPECT_LT(b, prev);
            prev = b;
        }
    }
}

TEST(TailBound, HoldsForScalarSeries) {
    for (int c = 1; c <= 30; ++c)
        for (int i = 1; i <= 95; ++i) {
            const double x = i / 100.0; // e tau / 2c
            const double tau = 2 * c * x / e;
            EXPECT_LE(even_tail_sum(tau, c), even_tail_bound(tau, c)) << "c=" << c << " x=" << x;
        }
}

TEST(TailBound, SumMatchesCoshMinusPartialSum) {
    const double tau = 1.7;
    double partial = 0, term = 1;
    for (int s = 0; s < 3; ++s) {
        partial += term;
        term *= tau * tau / ((2.0 * s + 1) * (2.0 * s + 2));
    }
    EXPECT_NEAR(even_tail_sum(tau, 3), std::cosh(tau) - partial, 1e-14);
}

TEST(Domination, ChainBothSigns) {
    for (double msq : {1.0, -1.0}) {
        auto s = QuenchSpec::chain(41, 1.0, msq);
        s.omega = 5;
        std::vector<double> t;
        const double tmax = 2 * 20 / (e * std::sqrt(norm_x(s)));
        for (int i = 1; i <= 10; ++i)
            t.push_back(tmax * i / 10);
        const auto r = lr_comparison(s, t);
        EXPECT_TRUE(r.all_passed());
        EXPECT_EQ(r.columns, (std::vector<std::string>{"n", "m", "t", "exact", "bound", "margin"}));
        EXPECT_GT(r.rows.size(), 1000u);
        for (std::size_t i = 0; i < r.rows.size(); ++i)
            EXPECT_GE(r.number(i, "margin"), 0.0);
    }
}

TEST(Domination, EnvelopeAtEdgeOfCone) {
    // e tau = d: the exact commutator is still dominated
    auto s = QuenchSpec::chain(41, 1.0, 1.0);
    s.omega = 5;
    const auto h = oracle::QuadraticHamiltonian::lattice(s, Branch::Final);
    for (int d = 1; d <= 20; ++d) {
        const double t = d / (e * std::sqrt(norm_x(s)));
        const Eigen::MatrixXd k = oracle::commutator_series(h, t, 400);
        EXPECT_LE(std::abs(k(0, d)), commutator_bound(lr_params(s, t, d), CommutatorKind::qq));
    }
}
