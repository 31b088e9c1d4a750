#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pupilcover/solver.hpp"

using namespace pupilcover;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::invalid_input;
}

} // namespace

TEST(SolveDense, SmallSystemAndSingular) {
    Matrix a(2, 2);
    a(0, 0) = 2;
    a(0, 1) = 1;
    a(1, 0) = 1;
    a(1, 1) = 3;
    const auto x = solve_dense(a, {3, 5});
    EXPECT_NEAR(x[0], 0.8, 1e-14);
    EXPECT_NEAR(x[1], 1.4, 1e-14);
    Matrix s(2, 2);
    s(0, 0) = s(0, 1) = s(1, 0) = s(1, 1) = 1;
    EXPECT_EQ(code_of([&] { solve_dense(s, {1, 2}); }), ErrorCode::singular_system);
}

TEST(SolveLp, Examples) {
    auto x = solve_lp({{1.0}, {{{1.0}, 3.0}}, {}, std::nullopt});
    EXPECT_NEAR(x[0], 3.0, 1e-12);

    x = solve_lp({{1.0, 1.0}, {{{1.0, 1.0}, 2.0}}, {}, std::nullopt});
    EXPECT_NEAR(x[0] + x[1], 2.0, 1e-12);

    EXPECT_EQ(code_of([] { solve_lp({{1.0}, {{{1.0}, 1.0}}, {}, std::vector<double>{0.0}}); }),
              ErrorCode::infeasible);
    EXPECT_EQ(code_of([] { solve_lp({{-1.0}, {}, {}, std::nullopt}); }), ErrorCode::unbounded);
}

TEST(SolveLp, FreeVariables) {
    const double inf = std::numeric_limits<double>::infinity();
    // min 2x + y over x - y >= -1, x + y >= 1, both free: the corner (0, 1).
    const auto x = solve_lp({{2.0, 1.0}, {{{1.0, -1.0}, -1.0}, {{1.0, 1.0}, 1.0}}, {-inf, -inf}, std::nullopt});
    EXPECT_NEAR(x[0], 0.0, 1e-12);
    EXPECT_NEAR(x[1], 1.0, 1e-12);
}

// Random instances shaped like the radius program: rho_i + rho_j >= b_ij, rho >= 0.
TEST(SolveLp, MatchesVertexEnumerationOnPairRows) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-0.5, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Constraint> rows;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j) {
                std::vector<double> c(3, 0.0);
                c[i] += 1.0;
                c[j] += 1.0;
                rows.push_back({c, u(rng)});
            }
        const LinearProgram lp{{1.0, 1.0, 1.0}, rows, {}, std::vector<double>(3, 5.0)};
        const auto ref = oracle::lp_vertex_enumeration(lp);
        ASSERT_TRUE(ref);
        const auto x = solve_lp(lp);
        EXPECT_NEAR(x[0] + x[1] + x[2], *ref, 1e-7);
    }
}

TEST(SolveQp, Examples) {
    auto x = solve_qp({Matrix::identity(1, 2.0), {0.0}, {{{1.0}, 3.0}}, {}, std::nullopt});
    EXPECT_NEAR(x[0], 3.0, 1e-12);

    x = solve_qp({Matrix::identity(2, 2.0), {-2.0, -4.0}, {}, {}, std::nullopt});
    EXPECT_NEAR(x[0], 1.0, 1e-12);
    EXPECT_NEAR(x[1], 2.0, 1e-12);

    x = solve_qp({Matrix::identity(2, 2.0), {0.0, 0.0}, {{{1.0, 1.0}, 2.0}}, {}, std::nullopt});
    EXPECT_NEAR(x[0], 1.0, 1e-12);
    EXPECT_NEAR(x[1], 1.0, 1e-12);

    EXPECT_EQ(code_of([] {
                  solve_qp({Matrix::identity(1, 2.0), {0.0}, {{{1.0}, 1.0}, {{-1.0}, 0.0}}, {}, std::nullopt});
              }),
              ErrorCode::infeasible);
}

TEST(SolveQp, MatchesDualGradientOnDiagonalInstances) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-0.5, 1.0), diag(0.5, 3.0), lin(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Constraint> rows;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j) {
                std::vector<double> c(3, 0.0);
                c[i] += 1.0;
                c[j] += 1.0;
                rows.push_back({c, u(rng)});
            }
        Matrix q(3, 3);
        for (std::size_t k = 0; k < 3; ++k) q(k, k) = diag(rng);
        const QuadraticProgram qp{q, {lin(rng), lin(rng), lin(rng)}, rows, std::vector<double>(3, 0.0),
                                  std::nullopt};
        const auto x = solve_qp(qp);
        const auto ref = oracle::qp_dual_gradient(qp, 100000);
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(x[k], ref[k], 1e-5);
    }
}

TEST(SolveQp, RejectsBadMatrices) {
    Matrix q(2, 2);
    q(0, 0) = 1;
    q(1, 1) = 1;
    q(0, 1) = 0.5;
    EXPECT_EQ(code_of([&] { solve_qp({q, {0, 0}, {}, {}, std::nullopt}); }), ErrorCode::invalid_input);
    EXPECT_EQ(code_of([] { solve_qp({Matrix::identity(2, -1.0), {0, 0}, {}, {}, std::nullopt}); }),
              ErrorCode::invalid_input);
}
