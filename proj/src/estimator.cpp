#include "wgqkd/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "wgqkd/errors.hpp"
#include "wgqkd/simplex.hpp"

namespace wgqkd {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::string active_rows(const LpProblem& lp, const Eigen::VectorXd& v)
{
    std::string out;
    for (int i = 0; i < lp.a.rows(); ++i) {
        const double slack = lp.b[i] - lp.a.row(i).dot(v);
        if (std::abs(slack) <= 1e-9 * std::max(1.0, std::abs(lp.b[i]))) {
            if (!out.empty())
                out += ", ";
            out += lp.row_labels[static_cast<size_t>(i)];
        }
    }
    return out.empty() ? "(none)" : out;
}

} // namespace

LpProblem build_lp(const ObservedStatistics& states, int n_cut)
{
    if (n_cut < 1)
        throw DomainError("build_lp: n_cut must be >= 1");
    bool has_vacuum = false;
    for (const auto& st : states) {
        if (st.distribution.n_cut() != n_cut)
            throw TruncationMismatchError(
                "build_lp: state '" + st.label + "' is truncated at n=" +
                std::to_string(st.distribution.n_cut()) + ", expected n=" +
                std::to_string(n_cut));
        validate_distribution(st.distribution);
        if (!(st.uncertainty >= 0.0))
            throw DomainError("build_lp: state '" + st.label +
                              "' has negative uncertainty");
        if (st.role == SourceRole::VacuumDecoy)
            has_vacuum = true;
    }
    if (!has_vacuum)
        throw MissingVacuumStateError(
            "build_lp: a vacuum-decoy state is required to pin the "
            "background yield");

    const int nv = 2 * (n_cut + 1);
    const int rows = 4 * static_cast<int>(states.size()) + 2 * (n_cut + 1);
    LpProblem lp;
    lp.n_cut = n_cut;
    lp.a = Eigen::MatrixXd::Zero(rows, nv);
    lp.b = Eigen::VectorXd::Zero(rows);
    lp.row_labels.reserve(static_cast<size_t>(rows));

    int r = 0;
    for (const auto& st : states) {
        const Eigen::VectorXd& p = st.distribution.probs;
        const double tau = st.distribution.tail_mass;
        const double u = st.uncertainty;
        const double eq = st.gain * st.qber;

        // Observed gain brackets sum_n p_n Y_n; the untracked tail can add
        // at most tau to the observation, which loosens the lower side.
        lp.a.row(r).head(n_cut + 1) = p.transpose();
        lp.b[r] = st.gain + u;
        lp.row_labels.push_back(st.label + ":gain-upper");
        ++r;
        lp.a.row(r).head(n_cut + 1) = -p.transpose();
        lp.b[r] = -(st.gain - u - tau);
        lp.row_labels.push_back(st.label + ":gain-lower");
        ++r;
        // Same bracketing for the error product sum_n p_n Y_n e_n.
        lp.a.row(r).tail(n_cut + 1) = p.transpose();
        lp.b[r] = eq + u;
        lp.row_labels.push_back(st.label + ":error-upper");
        ++r;
        lp.a.row(r).tail(n_cut + 1) = -p.transpose();
        lp.b[r] = -(eq - u - tau);
        lp.row_labels.push_back(st.label + ":error-lower");
        ++r;
    }
    for (int n = 0; n <= n_cut; ++n) {
        lp.a(r, lp.y_index(n)) = 1.0;
        lp.b[r] = 1.0;
        lp.row_labels.push_back("Y" + std::to_string(n) + "<=1");
        ++r;
        lp.a(r, lp.x_index(n)) = 1.0;
        lp.a(r, lp.y_index(n)) = -1.0;
        lp.b[r] = 0.0;
        lp.row_labels.push_back("x" + std::to_string(n) + "<=Y" +
                                std::to_string(n));
        ++r;
    }
    return lp;
}

BoundResult solve_bounds_lp(const LpProblem& lp)
{
    if (lp.n_cut < 1)
        throw DomainError("solve_bounds_lp: n_cut must be >= 1");

    Eigen::VectorXd c = Eigen::VectorXd::Zero(lp.num_vars());
    c[lp.y_index(1)] = 1.0;
    const LpSolution min_y1 = solve_lp(lp.a, lp.b, c);
    if (min_y1.status == LpStatus::Infeasible)
        throw InfeasibleObservationsError(
            "solve_bounds_lp: the observed gains and error rates admit no "
            "photon-number decomposition within their uncertainties");
    if (min_y1.status != LpStatus::Optimal)
        throw Error("solve_bounds_lp: unexpected unbounded program");

    c.setZero();
    c[lp.x_index(1)] = -1.0;
    const LpSolution max_x1 = solve_lp(lp.a, lp.b, c);
    if (max_x1.status != LpStatus::Optimal)
        throw Error("solve_bounds_lp: error-product stage failed after a "
                    "feasible yield stage");

    BoundResult res;
    res.y1_lower = clamp01(min_y1.objective);
    const double x1_max = clamp01(-max_x1.objective);
    res.e1_upper = res.y1_lower > 0.0
                       ? std::min(1.0, x1_max / res.y1_lower)
                       : 1.0;
    res.status = BoundStatus::Ok;
    res.diagnostics = "active at min Y1: " + active_rows(lp, min_y1.x) +
                      "; active at max x1: " + active_rows(lp, max_x1.x);
    return res;
}

BoundResult analytic_bounds_wcs(double q_mu, [[maybe_unused]] double e_mu,
                                double q_nu, double e_nu, double y0, double e0,
                                double mu, double nu)
{
    if (!(nu > 0.0) || !(mu > nu) || !std::isfinite(mu))
        throw DegenerateIntensitiesError(
            "analytic_bounds_wcs: intensities must satisfy 0 < nu < mu");
    for (double v : {q_mu, e_mu, q_nu, e_nu, y0, e0})
        if (!(v >= 0.0) || !(v <= 1.0))
            throw DomainError(
                "analytic_bounds_wcs: observables must lie in [0, 1]");

    // Two-intensity yield bound: the nu gain rescaled against the mu gain,
    // with the vacuum contribution removed.
    const double mu2 = mu * mu;
    const double nu2 = nu * nu;
    const double y1 =
        (mu / (mu * nu - nu2)) *
        (q_nu * std::exp(nu) - q_mu * std::exp(mu) * nu2 / mu2 -
         (mu2 - nu2) / mu2 * y0);
    if (!(y1 > 0.0))
        throw VanishingYieldError(
            "analytic_bounds_wcs: the yield lower bound is non-positive; "
            "the observations carry no usable single-photon signal");

    BoundResult res;
    res.y1_lower = std::min(1.0, y1);
    const double e1 =
        (e_nu * q_nu * std::exp(nu) - e0 * y0) / (res.y1_lower * nu);
    res.e1_upper = clamp01(e1);
    res.status = BoundStatus::Ok;
    res.diagnostics = "closed-form two-intensity bound";
    return res;
}

} // namespace wgqkd
