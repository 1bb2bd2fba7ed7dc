// Acceptance gate: one PASS/FAIL line per shipped guarantee, nonzero exit
// when any of them fails.  Each check recomputes its own reference values.

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "wgqkd/channel.hpp"
#include "wgqkd/config.hpp"
#include "wgqkd/errors.hpp"
#include "wgqkd/estimator.hpp"
#include "wgqkd/figures.hpp"
#include "wgqkd/keyrate.hpp"
#include "wgqkd/output.hpp"
#include "wgqkd/scattering.hpp"
#include "wgqkd/sources.hpp"

using namespace wgqkd;

namespace {

const double kGosGrid[] = {0.2, 0.5, 1.0, 2.0, 5.0, 10.0};

int failures = 0;

void criterion(const std::string& name,
               const std::function<bool(std::string&)>& body)
{
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << ": " << name;
    if (!ok && !detail.empty())
        std::cout << " [" << detail << "]";
    std::cout << "\n" << std::flush;
    failures += !ok;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

EmitterSpec emitter_with_purcell(double purcell)
{
    return {1.0, std::isinf(purcell) ? 0.0 : 1.0 / purcell};
}

Scenario tlss_scenario(double sigma, double purcell)
{
    const EmitterSpec em = emitter_with_purcell(purcell);
    Scenario sc;
    sc.sources = {
        {"signal", SourceRole::Signal,
         TlssSource{em, PulseSpec{1.0, sigma, 0.0}}},
        {"decoy", SourceRole::WeakDecoy,
         TlssSource{em, PulseSpec{0.02, sigma, 0.0}}},
        {"vacuum", SourceRole::VacuumDecoy, VacuumSource{}}};
    return sc;
}

Scenario wcs_opt_scenario()
{
    Scenario sc;
    sc.sources = {{"signal", SourceRole::Signal, WcsSource{0.5}},
                  {"decoy", SourceRole::WeakDecoy, WcsSource{0.05}},
                  {"vacuum", SourceRole::VacuumDecoy, VacuumSource{}}};
    sc.optimize_wcs = true;
    return sc;
}

ObservedStatistics observe_wcs_set(double mu, double nu, double l_km,
                                   const ChannelParams& ch, int n_cut)
{
    const LinkBudget link = link_budget(ch, l_km);
    ObservedStatistics obs;
    for (const auto& [label, role, m] :
         {std::tuple<const char*, SourceRole, double>{
              "signal", SourceRole::Signal, mu},
          {"weak", SourceRole::WeakDecoy, nu},
          {"vacuum", SourceRole::VacuumDecoy, 0.0}}) {
        ObservedState st;
        st.label = label;
        st.role = role;
        st.distribution = role == SourceRole::VacuumDecoy
                              ? vacuum_distribution(n_cut, label)
                              : poisson_distribution(m, n_cut);
        const GainQber g = gain_and_qber(st.distribution, ch, link);
        st.gain = g.gain;
        st.qber = g.qber;
        st.uncertainty = 0.0;
        obs.push_back(std::move(st));
    }
    return obs;
}

bool emitter_statistics_dominate(std::string& detail)
{
    bool ok = true;
    for (const double gos : kGosGrid) {
        const double sigma = 1.0 / gos;
        const EmitterSpec em = emitter_with_purcell(20.0);
        const PulseSpec pulse{1.0, sigma, 0.0};
        const PhotonNumberDistribution d = tlss_distribution(em, pulse, 10);
        const PhotonNumberDistribution p = matched_poisson(d, 10);
        const DistributionStats sd = distribution_stats(d);
        const DistributionStats sp = distribution_stats(p);
        if (!(d.probs[1] >= p.probs[1]) || !(d.probs[0] <= p.probs[0]) ||
            !(sd.multiphoton_mass <= sp.multiphoton_mass)) {
            ok = false;
            detail += "dominance broken at gamma/sigma=" + fmt(gos) + "; ";
        }
        if (gos == 2.0 && !(sd.mandel_q < 0.0)) {
            ok = false;
            detail += "Mandel Q=" + fmt(sd.mandel_q) +
                      " not sub-Poissonian at sigma=gamma/2; ";
        }
    }
    return ok;
}

bool counting_is_conservative(std::string& detail)
{
    bool ok = true;
    for (const double nbar : {0.02, 1.0}) {
        for (const double sigma : {0.5, 2.0}) {
            for (const double purcell :
                 {5.0, 20.0, std::numeric_limits<double>::infinity()}) {
                const CountingResult res = count_channel_distributions(
                    emitter_with_purcell(purcell), PulseSpec{nbar, sigma, 0.0});
                const double miss = std::abs(res.mean_reflected +
                                             res.mean_transmitted +
                                             res.mean_lost - nbar);
                if (!(miss <= 1e-6) || !(res.step_halving_residual <= 1e-8) ||
                    !(res.trace_deviation <= 1e-8)) {
                    ok = false;
                    detail += "nbar=" + fmt(nbar) + " sigma=" + fmt(sigma) +
                              " purcell=" + fmt(purcell) + ": miss=" +
                              fmt(miss) + " residual=" +
                              fmt(res.step_halving_residual) + " trace=" +
                              fmt(res.trace_deviation) + "; ";
                }
            }
        }
    }
    return ok;
}

bool weak_drive_matches_quadrature(std::string& detail)
{
    bool ok = true;
    const double nbar = 0.01;
    for (const double gos : kGosGrid) {
        const double sigma = 1.0 / gos;
        const EmitterSpec em = emitter_with_purcell(20.0);
        const CountingResult res =
            count_channel_distributions(em, PulseSpec{nbar, sigma, 0.0});
        const double r1 = single_photon_reflectance(em, {1.0, sigma, 0.0});
        const double rel = std::abs(res.mean_reflected / nbar - r1) / r1;
        if (!(rel <= 0.02)) {
            ok = false;
            detail += "gamma/sigma=" + fmt(gos) + ": relative gap " +
                      fmt(rel) + "; ";
        }
    }
    return ok;
}

bool gains_match_closed_form(std::string& detail)
{
    ChannelParams ch;
    double worst = 0.0;
    for (const double mu : {0.02, 0.1, 0.5, 1.0}) {
        const PhotonNumberDistribution d = poisson_distribution(mu, 20);
        for (const double l : {0.0, 50.0, 100.0, 140.0}) {
            const LinkBudget link = link_budget(ch, l);
            const GainQber g = gain_and_qber(d, ch, link);
            const double closed =
                1.0 - (1.0 - ch.y0) * std::exp(-link.eta * mu);
            worst = std::max(worst, std::abs(g.gain - closed));
        }
    }
    if (worst <= 1e-12)
        return true;
    detail = "worst gain deviation " + fmt(worst);
    return false;
}

bool bounds_sound_and_dominant(std::string& detail)
{
    bool ok = true;
    ChannelParams ch;
    const double mu = 0.5, nu = 0.05;
    for (const double l : {0.0, 50.0, 100.0, 130.0}) {
        const ObservedStatistics obs = observe_wcs_set(mu, nu, l, ch, 10);
        const BoundResult lp = solve_bounds_lp(build_lp(obs, 10));
        const BoundResult an =
            analytic_bounds_wcs(obs[0].gain, obs[0].qber, obs[1].gain,
                                obs[1].qber, obs[2].gain, obs[2].qber, mu, nu);
        const LinkBudget link = link_budget(ch, l);
        const double y1_true = yield_n(ch, link, 1);
        const double e1_true = error_n(ch, link, 1);
        if (!(y1_true >= lp.y1_lower - 1e-12) ||
            !(e1_true <= lp.e1_upper + 1e-12) ||
            !(y1_true >= an.y1_lower - 1e-12) ||
            !(e1_true <= an.e1_upper + 1e-12)) {
            ok = false;
            detail += "bounds unsound at l=" + fmt(l) + "; ";
        }
        if (!(lp.y1_lower >= an.y1_lower - 1e-10) ||
            !(lp.e1_upper <= an.e1_upper + 1e-10)) {
            ok = false;
            detail += "LP looser than closed form at l=" + fmt(l) + " (dy1=" +
                      fmt(lp.y1_lower - an.y1_lower) + ", de1=" +
                      fmt(lp.e1_upper - an.e1_upper) + "); ";
        }
    }
    return ok;
}

bool emitter_beats_optimized_wcs(std::string& detail)
{
    const Scenario em_sc = tlss_scenario(0.5, 20.0);
    const Scenario wcs_sc = wcs_opt_scenario();
    const double r_em = simulate_point(em_sc, 20.0).rate;
    const double r_wcs = simulate_point(wcs_sc, 20.0).rate;
    const double ratio = r_em / r_wcs;
    const double l_em = max_distance(em_sc, 0.1);
    const double l_wcs = max_distance(wcs_sc, 0.1);

    bool ok = true;
    if (!(ratio >= 1.5 && ratio <= 2.5)) {
        ok = false;
        detail += "rate ratio at 20 km = " + fmt(ratio) + "; ";
    }
    if (!(l_em > l_wcs)) {
        ok = false;
        detail += "emitter reach " + fmt(l_em) + " <= WCS reach " +
                  fmt(l_wcs) + "; ";
    }
    if (!(l_wcs >= 130.0 && l_wcs <= 150.0)) {
        ok = false;
        detail += "WCS reach " + fmt(l_wcs) + " outside [130, 150]; ";
    }
    return ok;
}

bool robust_to_bandwidth_and_loss(std::string& detail)
{
    bool ok = true;
    const double l1 = max_distance(tlss_scenario(1.0, 20.0), 0.1);
    const double l2 = max_distance(tlss_scenario(0.5, 20.0), 0.1);
    const double change = std::abs(l1 - l2) / std::max(l1, l2);
    if (!(change < 0.02)) {
        ok = false;
        detail += "reach changes " + fmt(100.0 * change) +
                  "% between gamma/sigma=1 and 2; ";
    }

    const double purcells[] = {2.0, 5.0, 10.0, 20.0};
    for (const double l : {0.0, 20.0, 50.0}) {
        double prev = -std::numeric_limits<double>::infinity();
        for (const double p : purcells) {
            const double r = simulate_point(tlss_scenario(0.5, p), l).rate;
            if (!(r >= prev - 1e-12)) {
                ok = false;
                detail += "rate drops from " + fmt(prev) + " to " + fmt(r) +
                          " at purcell=" + fmt(p) + ", l=" + fmt(l) + "; ";
            }
            prev = r;
        }
    }

    const double l10 = max_distance(tlss_scenario(0.5, 10.0), 0.1);
    if (!(l10 >= 0.95 * l2)) {
        ok = false;
        detail += "reach at purcell=10 (" + fmt(l10) +
                  ") below 95% of purcell=20 (" + fmt(l2) + "); ";
    }
    return ok;
}

bool outputs_reproduce_bytewise(std::string& detail)
{
    bool ok = true;
    const std::string data_dir = std::string(WGQKD_SOURCE_DIR) + "/data";
    for (const char* id : {"fig1", "fig2", "fig3a", "fig3b"}) {
        const auto first = reproduce_figure(id, data_dir);
        const auto second = reproduce_figure(id, data_dir);
        if (first.size() != second.size()) {
            ok = false;
            detail += std::string(id) + ": table count differs; ";
            continue;
        }
        for (size_t i = 0; i < first.size(); ++i) {
            if (first[i].name != second[i].name ||
                render_csv(first[i].table) != render_csv(second[i].table)) {
                ok = false;
                detail += std::string(id) + ": run-to-run mismatch in '" +
                          first[i].name + "'; ";
            }
        }
    }

    // A sweep must be reconstructible from nothing but its own header.
    const ScenarioConfig cfg = parse_config_file(
        std::string(WGQKD_SOURCE_DIR) + "/scenarios/wcs_fixed.cfg");
    const std::string text = render_csv(run_sweep(cfg));
    const ScenarioConfig recovered =
        config_from_metadata(parse_csv_metadata(text));
    const std::string replay = render_csv(run_sweep(recovered));
    if (replay != text) {
        ok = false;
        detail += "metadata round-trip changed the sweep output; ";
    }
    return ok;
}

} // namespace

int main()
{
    criterion("scattered-pulse statistics dominate the mean-matched Poisson "
              "reference across the bandwidth grid",
              emitter_statistics_dominate);
    criterion("channel counting conserves photon number with certified "
              "step-halving convergence",
              counting_is_conservative);
    criterion("weak pulses reproduce the single-photon quadrature "
              "reflectance within 2%",
              weak_drive_matches_quadrature);
    criterion("simulated gains match the closed-form channel expression to "
              "1e-12",
              gains_match_closed_form);
    criterion("single-photon bounds are sound and never looser than the "
              "closed form",
              bounds_sound_and_dominant);
    criterion("the emitter source beats intensity-optimized coherent states "
              "in rate and reach",
              emitter_beats_optimized_wcs);
    criterion("performance is stable across pulse bandwidth and degrades "
              "monotonically with parasitic loss",
              robust_to_bandwidth_and_loss);
    criterion("canned studies and sweeps reproduce byte-identically from "
              "their own metadata",
              outputs_reproduce_bytewise);

    if (failures)
        std::cout << failures << " criterion(s) failed\n";
    return failures;
}
