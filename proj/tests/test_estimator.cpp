#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "wgqkd/channel.hpp"
#include "wgqkd/errors.hpp"
#include "wgqkd/estimator.hpp"
#include "wgqkd/sources.hpp"

using namespace wgqkd;

namespace {

ObservedState observe(const std::string& label, SourceRole role, double mu,
                      const ChannelParams& ch, const LinkBudget& link,
                      int n_cut)
{
    ObservedState st;
    st.label = label;
    st.role = role;
    st.distribution = role == SourceRole::VacuumDecoy
                          ? vacuum_distribution(n_cut, label)
                          : poisson_distribution(mu, n_cut);
    const GainQber g = gain_and_qber(st.distribution, ch, link);
    st.gain = g.gain;
    st.qber = g.qber;
    st.uncertainty = 0.0;
    return st;
}

ObservedStatistics observe_decoy_set(double mu, double nu, double l_km,
                                     const ChannelParams& ch, int n_cut)
{
    const LinkBudget link = link_budget(ch, l_km);
    return {observe("signal", SourceRole::Signal, mu, ch, link, n_cut),
            observe("weak", SourceRole::WeakDecoy, nu, ch, link, n_cut),
            observe("vacuum", SourceRole::VacuumDecoy, 0.0, ch, link, n_cut)};
}

// Closed-form gain/QBER of a Poisson state through the channel, used to
// drive the two-intensity formula with exactly reproducible inputs.
GainQber closed_form(const ChannelParams& ch, double l_km, double mu)
{
    const LinkBudget link = link_budget(ch, l_km);
    GainQber g;
    g.gain = 1.0 - (1.0 - ch.y0) * std::exp(-link.eta * mu);
    g.qber = (ch.e0 * ch.y0 + ch.ed * (g.gain - ch.y0)) / g.gain;
    return g;
}

} // namespace

TEST_CASE("the decoy LP has the documented shape")
{
    ChannelParams ch;
    const ObservedStatistics states = observe_decoy_set(0.5, 0.05, 20.0, ch, 10);
    const LpProblem lp = build_lp(states, 10);

    CHECK(lp.n_cut == 10);
    CHECK(lp.num_vars() == 22);
    CHECK(lp.a.rows() == 34); // 4 rows per state + 2 boxes per photon number
    CHECK(lp.a.cols() == 22);
    CHECK(lp.b.size() == 34);
    REQUIRE(lp.row_labels.size() == 34);
    CHECK(lp.row_labels[0] == "signal:gain-upper");
    CHECK(lp.row_labels[1] == "signal:gain-lower");
    CHECK(lp.row_labels[2] == "signal:error-upper");
    CHECK(lp.row_labels[3] == "signal:error-lower");
    CHECK(lp.row_labels[12] == "Y0<=1");
    CHECK(lp.row_labels[13] == "x0<=Y0");
    CHECK(lp.row_labels[15] == "x1<=Y1");

    // gain rows bracket the observation, widened below by the tail mass
    const auto& sig = states[0];
    const double tau = sig.distribution.tail_mass;
    CHECK(lp.b[0] == sig.gain);
    CHECK(lp.b[1] == doctest::Approx(-(sig.gain - tau)).epsilon(1e-15));
    CHECK(lp.a(0, lp.y_index(3)) == sig.distribution.probs[3]);
    CHECK(lp.a(2, lp.x_index(3)) == sig.distribution.probs[3]);
    CHECK(lp.a(0, lp.x_index(3)) == 0.0);

    CHECK(lp.y_index(1) == 1);
    CHECK(lp.x_index(1) == 12);
}

TEST_CASE("the LP builder rejects malformed inputs")
{
    ChannelParams ch;
    const LinkBudget link = link_budget(ch, 20.0);

    ObservedStatistics no_vac = {
        observe("signal", SourceRole::Signal, 0.5, ch, link, 10),
        observe("weak", SourceRole::WeakDecoy, 0.05, ch, link, 10)};
    CHECK_THROWS_AS(build_lp(no_vac, 10), MissingVacuumStateError);

    ObservedStatistics mixed = observe_decoy_set(0.5, 0.05, 20.0, ch, 10);
    mixed[1] = observe("weak", SourceRole::WeakDecoy, 0.05, ch, link, 8);
    CHECK_THROWS_AS(build_lp(mixed, 10), TruncationMismatchError);

    ObservedStatistics good = observe_decoy_set(0.5, 0.05, 20.0, ch, 10);
    CHECK_THROWS_AS(build_lp(good, 0), DomainError);

    good[0].uncertainty = -1e-3;
    CHECK_THROWS_AS(build_lp(good, 10), DomainError);
}

TEST_CASE("LP bounds hit the frozen vertex-exact values")
{
    // Reference optima from an exact rational-arithmetic simplex on the
    // identical constraint matrices.  The float solver may sit a hair on
    // either side, hence the asymmetric brackets.
    struct Pin {
        double mu, nu, l_km, y1, e1;
    };
    const Pin pins[] = {
        {0.50, 0.050, 0.0, 0.044354524140628675, 0.035169002864064942},
        {0.50, 0.050, 50.0, 0.0039519711707367445, 0.035422899825829419},
        {0.50, 0.050, 100.0, 0.0003537392215149958, 0.037519137450171484},
        {0.74, 0.005, 0.0, 0.044898672975152445, 0.033255443788044348},
        {0.10, 0.050, 130.0, 8.5272055740473333e-05, 0.044183518390649761},
        {0.48, 0.005, 20.0, 0.017086352497971687, 0.033256841745231205},
    };
    ChannelParams ch;
    for (const Pin& pin : pins) {
        CAPTURE(pin.mu);
        CAPTURE(pin.nu);
        CAPTURE(pin.l_km);
        const LpProblem lp =
            build_lp(observe_decoy_set(pin.mu, pin.nu, pin.l_km, ch, 10), 10);
        const BoundResult res = solve_bounds_lp(lp);
        CHECK(res.status == BoundStatus::Ok);
        CHECK(res.y1_lower >= pin.y1 - 1e-12);
        CHECK(res.y1_lower <= pin.y1 + 1e-10);
        CHECK(res.e1_upper <= pin.e1 + 1e-11);
        CHECK(res.e1_upper >= pin.e1 - 1e-8);

        // soundness: the channel's true single-photon behaviour obeys the
        // certified bounds at every pinned operating point
        const LinkBudget link = link_budget(ch, pin.l_km);
        CHECK(yield_n(ch, link, 1) >= res.y1_lower - 1e-12);
        CHECK(error_n(ch, link, 1) <= res.e1_upper + 1e-12);

        CHECK(res.diagnostics.find("active at min Y1:") != std::string::npos);
        CHECK(res.diagnostics.find("active at max x1:") != std::string::npos);
    }
}

TEST_CASE("the LP is never looser than the two-intensity formula")
{
    ChannelParams ch;
    for (const double l_km : {0.0, 50.0, 100.0}) {
        CAPTURE(l_km);
        const double mu = 0.5, nu = 0.05;
        const LpProblem lp =
            build_lp(observe_decoy_set(mu, nu, l_km, ch, 10), 10);
        const BoundResult lp_res = solve_bounds_lp(lp);

        const GainQber gmu = closed_form(ch, l_km, mu);
        const GainQber gnu = closed_form(ch, l_km, nu);
        const BoundResult an = analytic_bounds_wcs(
            gmu.gain, gmu.qber, gnu.gain, gnu.qber, ch.y0, ch.e0, mu, nu);

        CHECK(lp_res.y1_lower >= an.y1_lower - 1e-10);
        CHECK(lp_res.e1_upper <= an.e1_upper + 1e-10);
    }
}

TEST_CASE("the two-intensity formula matches its frozen evaluations")
{
    struct Pin {
        double l_km, q_mu, e_mu, q_nu, e_nu, y1, e1;
    };
    const Pin pins[] = {
        {0.0, 0.022250424983766865, 0.033035680217370194,
         0.0022491668266700087, 0.033352975150880828, 0.044354524139498291,
         0.035176830385849397},
        {50.0, 0.0020050019051550674, 0.033395959723508891,
         0.00020221101512126955, 0.03692609670409836, 0.0039519711706135869,
         0.035423830159161093},
        {100.0, 0.00018040757885321079, 0.037400591178300548,
         1.957219518838651e-05, 0.073562644729349209, 0.00035373922150383635,
         0.037519258548698388},
    };
    ChannelParams ch;
    for (const Pin& pin : pins) {
        CAPTURE(pin.l_km);
        // reproduce the frozen inputs from the closed-form channel model;
        // the QBERs divide by near-vanishing gains, which amplifies
        // last-ulp differences, hence their looser tolerance
        const GainQber gmu = closed_form(ch, pin.l_km, 0.5);
        const GainQber gnu = closed_form(ch, pin.l_km, 0.05);
        CHECK(gmu.gain == doctest::Approx(pin.q_mu).epsilon(1e-14));
        CHECK(gmu.qber == doctest::Approx(pin.e_mu).epsilon(1e-12));
        CHECK(gnu.gain == doctest::Approx(pin.q_nu).epsilon(1e-14));
        CHECK(gnu.qber == doctest::Approx(pin.e_nu).epsilon(1e-12));

        const BoundResult res = analytic_bounds_wcs(
            gmu.gain, gmu.qber, gnu.gain, gnu.qber, ch.y0, ch.e0, 0.5, 0.05);
        CHECK(res.y1_lower == doctest::Approx(pin.y1).epsilon(1e-12));
        CHECK(res.e1_upper == doctest::Approx(pin.e1).epsilon(1e-12));

        const LinkBudget link = link_budget(ch, pin.l_km);
        CHECK(yield_n(ch, link, 1) >= res.y1_lower - 1e-12);
        CHECK(error_n(ch, link, 1) <= res.e1_upper + 1e-12);
    }
}

TEST_CASE("contradictory observations are reported as infeasible")
{
    ChannelParams ch;
    ObservedStatistics states = observe_decoy_set(0.5, 0.05, 20.0, ch, 10);
    states[0].gain = 0.9; // signal near-saturating
    states[1].gain = 1e-6; // while the decoy sees nothing: impossible
    states[1].qber = 0.0;
    const LpProblem lp = build_lp(states, 10);
    CHECK_THROWS_AS(solve_bounds_lp(lp), InfeasibleObservationsError);
}

TEST_CASE("a vanishing yield bound degrades to the trivial error bound")
{
    // Only a vacuum state and one loosely observed signal: Y_1 = 0 stays
    // feasible, so the estimator must fall back to e_1 = 1.
    ChannelParams ch;
    const LinkBudget link = link_budget(ch, 20.0);
    ObservedState sig = observe("signal", SourceRole::Signal, 0.5, ch, link, 10);
    sig.uncertainty = 0.5;
    ObservedState vac =
        observe("vacuum", SourceRole::VacuumDecoy, 0.0, ch, link, 10);
    const LpProblem lp = build_lp({sig, vac}, 10);
    const BoundResult res = solve_bounds_lp(lp);
    CHECK(res.y1_lower <= 1e-15);
    CHECK(res.e1_upper == 1.0);
    CHECK(res.status == BoundStatus::Ok);
}

TEST_CASE("the two-intensity formula rejects bad inputs")
{
    CHECK_THROWS_AS(
        analytic_bounds_wcs(0.02, 0.03, 0.002, 0.03, 1.7e-6, 0.5, 0.05, 0.05),
        DegenerateIntensitiesError);
    CHECK_THROWS_AS(
        analytic_bounds_wcs(0.02, 0.03, 0.002, 0.03, 1.7e-6, 0.5, 0.05, 0.5),
        DegenerateIntensitiesError);
    CHECK_THROWS_AS(
        analytic_bounds_wcs(1.5, 0.03, 0.002, 0.03, 1.7e-6, 0.5, 0.5, 0.05),
        DomainError);
    // decoy gain at the dark-count floor carries no single-photon signal
    CHECK_THROWS_AS(
        analytic_bounds_wcs(0.05, 0.03, 1e-7, 0.03, 1.7e-6, 0.5, 0.5, 0.05),
        VanishingYieldError);
}
