#ifndef WGQKD_SIMPLEX_HPP
#define WGQKD_SIMPLEX_HPP

#include <Eigen/Dense>

namespace wgqkd {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
};

// Minimizes c.x subject to A x <= b, x >= 0, with a dense two-phase simplex
// using Bland's anti-cycling rule.  Exact in the usual floating-point sense:
// the optimum is attained at a basic feasible solution, no interior-point
// tolerance gap.
LpSolution solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c);

} // namespace wgqkd

#endif
