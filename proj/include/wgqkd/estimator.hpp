#ifndef WGQKD_ESTIMATOR_HPP
#define WGQKD_ESTIMATOR_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgqkd/channel.hpp"

namespace wgqkd {

// Linear program over the per-photon-number unknowns
//   Y_n (yields) and x_n = Y_n e_n (error products), n = 0..n_cut,
// constrained by each state's gain and gain*QBER within its uncertainty
// plus the prepared-statistics tail bound, and by 0 <= x_n <= Y_n <= 1.
// Variables are ordered [Y_0..Y_ncut, x_0..x_ncut]; rows are A v <= b.
struct LpProblem {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    std::vector<std::string> row_labels;
    int n_cut = 0;

    int num_vars() const { return 2 * (n_cut + 1); }
    int y_index(int n) const { return n; }
    int x_index(int n) const { return n_cut + 1 + n; }
};

LpProblem build_lp(const ObservedStatistics& states, int n_cut);

enum class BoundStatus { Ok, Infeasible };

// Certified bounds on the single-photon contribution: a lower bound on the
// yield Y_1 and an upper bound on the error rate e_1.
struct BoundResult {
    double y1_lower = 0.0;
    double e1_upper = 1.0;
    BoundStatus status = BoundStatus::Ok;
    std::string diagnostics; // active constraints at the optimizing vertices
};

// Exact bounds by minimizing Y_1 and maximizing x_1 over the LP's feasible
// set.  Throws InfeasibleObservationsError when the constraints admit no
// decomposition at all.
BoundResult solve_bounds_lp(const LpProblem& lp);

// Closed-form two-intensity bounds for Poisson statistics with signal mu and
// weak decoy nu, given the observed gains/QBERs, the vacuum yield y0 and the
// vacuum error rate e0.  Valid for 0 < nu < mu.
BoundResult analytic_bounds_wcs(double q_mu, double e_mu, double q_nu,
                                double e_nu, double y0, double e0, double mu,
                                double nu);

} // namespace wgqkd

#endif
