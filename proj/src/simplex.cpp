#include "wgqkd/simplex.hpp"

#include <cmath>
#include <vector>

#include "wgqkd/errors.hpp"

namespace wgqkd {

namespace {

// Pivot admission threshold on rows equilibrated to unit max-norm.  Entries
// below it are treated as zero for basis changes; they still participate in
// eliminations, so the algebra stays exact to roundoff.
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-12;
constexpr double kPhase1Tol = 1e-9;
constexpr double kFeasTol = 1e-8;

// Dense simplex tableau; row m is the reduced-cost row and its RHS entry
// holds minus the current objective value.
struct Tableau {
    Eigen::MatrixXd t;
    std::vector<int> basis;
    int m = 0;
    int ncols = 0;

    void pivot(int row, int col)
    {
        t.row(row) /= t(row, col);
        for (int i = 0; i <= m; ++i) {
            if (i == row)
                continue;
            const double f = t(i, col);
            if (f != 0.0)
                t.row(i) -= f * t.row(row);
        }
        basis[row] = col;
    }

    // Bland's rule: enter the lowest-index improving column, leave by the
    // minimum ratio with exact-tie breaks toward the lowest basic index.
    // The pair guarantees termination even on degenerate vertices; the
    // iteration cap only trips when roundoff livelocks the cost row.
    LpStatus iterate(const std::vector<bool>& allowed)
    {
        const long max_iters = 200L * (m + ncols);
        for (long iter = 0; iter <= max_iters; ++iter) {
            int enter = -1;
            for (int j = 0; j < ncols; ++j) {
                if (allowed[j] && t(m, j) < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0)
                return LpStatus::Optimal;

            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = t(i, enter);
                if (a <= kPivotTol)
                    continue;
                const double ratio = t(i, ncols) / a;
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0)
                return LpStatus::Unbounded;
            pivot(leave, enter);
        }
        throw Error("solve_lp: pivot count exceeded its cap");
    }
};

} // namespace

LpSolution solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c)
{
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (b.size() != m || c.size() != n)
        throw DomainError("solve_lp: inconsistent dimensions");

    if (m == 0) {
        // Only x >= 0 constrains the problem; the optimum is x = 0 unless
        // some cost is negative, in which case it is unbounded.
        LpSolution sol;
        sol.x = Eigen::VectorXd::Zero(n);
        sol.status =
            (c.minCoeff() < -kCostTol) ? LpStatus::Unbounded : LpStatus::Optimal;
        return sol;
    }

    // Equilibrate each row to unit max-norm.  Positive row scalings leave
    // the feasible set and the objective untouched but give the absolute
    // pivot tolerances a uniform meaning.
    Eigen::MatrixXd as = a;
    Eigen::VectorXd bs = b;
    for (int i = 0; i < m; ++i) {
        const double s = as.row(i).cwiseAbs().maxCoeff();
        if (s > 0.0) {
            as.row(i) /= s;
            bs[i] /= s;
        }
    }

    int n_art = 0;
    for (int i = 0; i < m; ++i)
        if (bs[i] < 0.0)
            ++n_art;

    Tableau tab;
    tab.m = m;
    tab.ncols = n + m + n_art;
    tab.t = Eigen::MatrixXd::Zero(m + 1, tab.ncols + 1);
    tab.basis.assign(m, -1);
    std::vector<bool> is_artificial(tab.ncols, false);

    int next_art = n + m;
    for (int i = 0; i < m; ++i) {
        const double sign = bs[i] < 0.0 ? -1.0 : 1.0;
        tab.t.block(i, 0, 1, n) = sign * as.row(i);
        tab.t(i, n + i) = sign;
        tab.t(i, tab.ncols) = sign * bs[i];
        if (bs[i] < 0.0) {
            tab.t(i, next_art) = 1.0;
            tab.basis[i] = next_art;
            is_artificial[next_art] = true;
            ++next_art;
        } else {
            tab.basis[i] = n + i;
        }
    }

    std::vector<bool> allow_all(tab.ncols, true);

    if (n_art > 0) {
        // Phase 1: minimize the artificial total, priced out over the
        // initial basis.
        for (int j = 0; j < tab.ncols; ++j)
            tab.t(m, j) = is_artificial[j] ? 1.0 : 0.0;
        tab.t(m, tab.ncols) = 0.0;
        for (int i = 0; i < m; ++i)
            if (is_artificial[tab.basis[i]])
                tab.t.row(m) -= tab.t.row(i);

        if (tab.iterate(allow_all) != LpStatus::Optimal ||
            -tab.t(m, tab.ncols) > kPhase1Tol) {
            LpSolution sol;
            sol.status = LpStatus::Infeasible;
            sol.x = Eigen::VectorXd::Zero(n);
            return sol;
        }

        // Drive leftover artificials out of the basis; a row that offers no
        // real pivot is a redundant constraint and is dropped.
        std::vector<int> keep;
        for (int i = 0; i < m; ++i) {
            if (!is_artificial[tab.basis[i]]) {
                keep.push_back(i);
                continue;
            }
            int col = -1;
            for (int j = 0; j < n + m; ++j) {
                if (std::abs(tab.t(i, j)) > kPivotTol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                tab.pivot(i, col);
                keep.push_back(i);
            }
        }
        if (static_cast<int>(keep.size()) != m) {
            Eigen::MatrixXd reduced(static_cast<int>(keep.size()) + 1,
                                    tab.ncols + 1);
            std::vector<int> new_basis;
            for (size_t r = 0; r < keep.size(); ++r) {
                reduced.row(static_cast<int>(r)) = tab.t.row(keep[r]);
                new_basis.push_back(tab.basis[keep[r]]);
            }
            reduced.row(static_cast<int>(keep.size())) = tab.t.row(m);
            tab.t = reduced;
            tab.basis = new_basis;
            tab.m = static_cast<int>(keep.size());
        }
    }

    // Phase 2: the real objective, artificial columns locked out.
    for (int j = 0; j < tab.ncols; ++j)
        tab.t(tab.m, j) = j < n ? c[j] : 0.0;
    tab.t(tab.m, tab.ncols) = 0.0;
    for (int i = 0; i < tab.m; ++i) {
        const int bj = tab.basis[i];
        const double cost = bj < n ? c[bj] : 0.0;
        if (cost != 0.0)
            tab.t.row(tab.m) -= cost * tab.t.row(i);
    }
    std::vector<bool> allow_real(tab.ncols, true);
    for (int j = 0; j < tab.ncols; ++j)
        if (is_artificial[j])
            allow_real[j] = false;

    const LpStatus status = tab.iterate(allow_real);

    LpSolution sol;
    sol.status = status;
    sol.x = Eigen::VectorXd::Zero(n);
    if (status == LpStatus::Optimal) {
        for (int i = 0; i < tab.m; ++i)
            if (tab.basis[i] < n)
                sol.x[tab.basis[i]] = tab.t(i, tab.ncols);

        // Tripwire: a vertex that violates the original system means the
        // pivoting lost feasibility to roundoff; report it instead of
        // returning a silently wrong optimum.
        if (sol.x.minCoeff() < -kFeasTol)
            throw Error("solve_lp: negative component in reported vertex");
        for (int i = 0; i < m; ++i) {
            const double scale =
                1.0 + std::abs(b[i]) + a.row(i).cwiseAbs().maxCoeff();
            if (a.row(i).dot(sol.x) - b[i] > kFeasTol * scale)
                throw Error("solve_lp: reported vertex violates row " +
                            std::to_string(i));
        }
        sol.x = sol.x.cwiseMax(0.0);
        sol.objective = c.dot(sol.x);
    }
    return sol;
}

} // namespace wgqkd
