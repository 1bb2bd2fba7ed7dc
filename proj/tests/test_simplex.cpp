#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "wgqkd/errors.hpp"
#include "wgqkd/simplex.hpp"

using namespace wgqkd;

namespace {

// Independent oracle: enumerate every candidate vertex (n active constraints
// out of the rows plus the coordinate planes), keep the feasible ones, and
// take the best objective.  Exponential but fine for the sizes tested.
double brute_force_min(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c, bool& feasible)
{
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    const int total = m + n; // rows, then x_j = 0 planes
    std::vector<int> pick(static_cast<size_t>(n));
    double best = std::numeric_limits<double>::infinity();
    feasible = false;

    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        idx[static_cast<size_t>(i)] = i;
    for (;;) {
        Eigen::MatrixXd g(n, n);
        Eigen::VectorXd h(n);
        for (int r = 0; r < n; ++r) {
            const int k = idx[static_cast<size_t>(r)];
            if (k < m) {
                g.row(r) = a.row(k);
                h[r] = b[k];
            } else {
                g.row(r).setZero();
                g(r, k - m) = 1.0;
                h[r] = 0.0;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
        if (lu.isInvertible()) {
            const Eigen::VectorXd x = lu.solve(h);
            bool ok = x.minCoeff() >= -1e-9;
            for (int i = 0; ok && i < m; ++i)
                ok = a.row(i).dot(x) <= b[i] + 1e-9;
            if (ok) {
                feasible = true;
                best = std::min(best, c.dot(x));
            }
        }
        // next n-combination of {0..total-1}
        int r = n - 1;
        while (r >= 0 && idx[static_cast<size_t>(r)] == total - n + r)
            --r;
        if (r < 0)
            break;
        ++idx[static_cast<size_t>(r)];
        for (int j = r + 1; j < n; ++j)
            idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    return best;
}

} // namespace

TEST_CASE("hand-built programs hit their known optima")
{
    // min -x - y  s.t.  x + y <= 1, x <= 0.5
    Eigen::MatrixXd a(2, 2);
    a << 1, 1, 1, 0;
    Eigen::VectorXd b(2);
    b << 1, 0.5;
    Eigen::VectorXd c(2);
    c << -1, -1;
    const LpSolution s = solve_lp(a, b, c);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(s.x[0] + s.x[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("negative right-hand sides go through phase 1")
{
    // min x  s.t.  x >= 0.25  (as -x <= -0.25)
    Eigen::MatrixXd a(1, 1);
    a << -1;
    Eigen::VectorXd b(1);
    b << -0.25;
    Eigen::VectorXd c(1);
    c << 1;
    const LpSolution s = solve_lp(a, b, c);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.x[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("an equality enforced as a bracket pins the variable")
{
    Eigen::MatrixXd a(2, 2);
    a << 1, 0, -1, 0; // x = 0.7
    Eigen::VectorXd b(2);
    b << 0.7, -0.7;

    Eigen::VectorXd c(2);
    c << 1, 0;
    LpSolution s = solve_lp(a, b, c);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0.7).epsilon(1e-12));

    c << -1, 0;
    s = solve_lp(a, b, c);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-0.7).epsilon(1e-12));
}

TEST_CASE("contradictory constraints are reported infeasible")
{
    Eigen::MatrixXd a(2, 1);
    a << 1, -1; // x <= 1 and x >= 2
    Eigen::VectorXd b(2);
    b << 1, -2;
    Eigen::VectorXd c(1);
    c << 0;
    CHECK(solve_lp(a, b, c).status == LpStatus::Infeasible);
}

TEST_CASE("an uncapped improving direction is reported unbounded")
{
    Eigen::MatrixXd a(1, 2);
    a << 0, 1; // only y is capped
    Eigen::VectorXd b(1);
    b << 1;
    Eigen::VectorXd c(2);
    c << -1, 0;
    CHECK(solve_lp(a, b, c).status == LpStatus::Unbounded);
}

TEST_CASE("no rows means the origin unless a cost is negative")
{
    Eigen::MatrixXd a(0, 2);
    Eigen::VectorXd b(0);
    Eigen::VectorXd c(2);
    c << 1, 0;
    CHECK(solve_lp(a, b, c).status == LpStatus::Optimal);
    CHECK(solve_lp(a, b, c).objective == 0.0);
    c << -1, 0;
    CHECK(solve_lp(a, b, c).status == LpStatus::Unbounded);
}

TEST_CASE("redundant duplicated rows do not disturb the optimum")
{
    Eigen::MatrixXd a(3, 1);
    a << 1, 1, -1; // x <= 0.5 twice, x >= 0.5
    Eigen::VectorXd b(3);
    b << 0.5, 0.5, -0.5;
    Eigen::VectorXd c(1);
    c << 1;
    const LpSolution s = solve_lp(a, b, c);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mismatched dimensions are a domain error")
{
    Eigen::MatrixXd a(1, 2);
    a << 1, 1;
    Eigen::VectorXd b(2);
    b << 1, 1;
    Eigen::VectorXd c(2);
    c << 1, 1;
    CHECK_THROWS_AS(solve_lp(a, b, c), DomainError);
}

TEST_CASE("coefficients spanning many orders of magnitude stay stable")
{
    // A tiny column entry must not become a catastrophic pivot.
    Eigen::MatrixXd a(3, 2);
    a << 1e-30, 5e-3, 1, 0, 0, 1;
    Eigen::VectorXd b(3);
    b << 1e-5, 1, 1;
    Eigen::VectorXd c(2);
    c << 0, -1;
    const LpSolution s = solve_lp(a, b, c);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-2e-3).epsilon(1e-10));
}

TEST_CASE("random bounded programs agree with vertex enumeration")
{
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> rhs(-0.3, 1.0);
    std::uniform_int_distribution<int> pick_n(2, 3);
    std::uniform_int_distribution<int> pick_m(3, 6);

    int optimal_seen = 0;
    int infeasible_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = pick_n(rng);
        const int m = pick_m(rng);
        Eigen::MatrixXd a(m + 1, n);
        Eigen::VectorXd b(m + 1);
        Eigen::VectorXd c(n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j)
                a(i, j) = coef(rng);
            b[i] = rhs(rng);
        }
        // keep the feasible set bounded so "unbounded" never appears
        a.row(m).setOnes();
        b[m] = 10.0;
        for (int j = 0; j < n; ++j)
            c[j] = coef(rng);

        bool feasible = false;
        const double ref = brute_force_min(a, b, c, feasible);
        const LpSolution s = solve_lp(a, b, c);
        if (!feasible) {
            CHECK(s.status == LpStatus::Infeasible);
            ++infeasible_seen;
            continue;
        }
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.objective == doctest::Approx(ref).epsilon(1e-7));
        CHECK(s.x.minCoeff() >= -1e-9);
        for (int i = 0; i <= m; ++i)
            CHECK(a.row(i).dot(s.x) <= b[i] + 1e-7);
        ++optimal_seen;
    }
    // the generator must exercise both outcomes
    CHECK(optimal_seen > 100);
    CHECK(infeasible_seen > 5);
}
