#include "wgqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "wgqkd/errors.hpp"

namespace wgqkd {

namespace {

struct ResolvedState {
    const SourceStateSpec* spec = nullptr;
    PhotonNumberDistribution dist;
};

struct ResolvedScenario {
    std::vector<ResolvedState> states;
    int signal = -1;
    int weak = -1;
    int vacuum = -1;
    bool wcs_pair = false;
    double mu = 0.0;
    double nu = 0.0;
};

ResolvedScenario resolve_scenario(const Scenario& sc)
{
    sc.channel.validate();
    sc.protocol.validate();
    if (sc.n_cut < 1)
        throw DomainError("scenario: n_cut must be >= 1");

    ResolvedScenario rs;
    int weak_count = 0;
    for (const auto& spec : sc.sources) {
        const int idx = static_cast<int>(rs.states.size());
        switch (spec.role) {
        case SourceRole::Signal:
            if (rs.signal >= 0)
                throw Error("scenario: more than one signal state");
            rs.signal = idx;
            break;
        case SourceRole::WeakDecoy:
            if (rs.weak < 0)
                rs.weak = idx;
            ++weak_count;
            break;
        case SourceRole::VacuumDecoy:
            if (rs.vacuum < 0)
                rs.vacuum = idx;
            break;
        }
        rs.states.push_back({&spec, resolve_source(spec, sc.n_cut)});
    }
    if (rs.signal < 0)
        throw Error("scenario: a signal state is required");
    if (rs.vacuum < 0)
        throw MissingVacuumStateError("scenario: a vacuum-decoy state is "
                                      "required");
    if (rs.weak < 0)
        throw Error("scenario: a weak-decoy state is required");

    const auto* sig_wcs =
        std::get_if<WcsSource>(&rs.states[rs.signal].spec->params);
    const auto* weak_wcs =
        std::get_if<WcsSource>(&rs.states[rs.weak].spec->params);
    if (sig_wcs && weak_wcs) {
        rs.wcs_pair = true;
        rs.mu = sig_wcs->mu;
        rs.nu = weak_wcs->mu;
    }
    if (sc.estimator == EstimatorKind::Analytic) {
        if (!rs.wcs_pair)
            throw Error("scenario: the closed-form estimator needs WCS "
                        "signal and weak-decoy states");
        if (weak_count != 1)
            throw Error("scenario: the closed-form estimator needs exactly "
                        "one weak decoy");
    }
    if (sc.optimize_wcs) {
        if (!rs.wcs_pair || weak_count != 1)
            throw Error("scenario: intensity optimization needs exactly one "
                        "WCS signal and one WCS weak decoy");
    }
    return rs;
}

KeyRatePoint evaluate_resolved(const ResolvedScenario& rs, const Scenario& sc,
                               double distance_km)
{
    const LinkBudget link = link_budget(sc.channel, distance_km);
    ObservedStatistics obs;
    obs.reserve(rs.states.size());
    for (const auto& st : rs.states) {
        const GainQber g = gain_and_qber(st.dist, sc.channel, link);
        obs.push_back({st.spec->label, st.spec->role, st.dist, g.gain,
                       g.qber, 0.0});
    }
    const double q_s = obs[static_cast<size_t>(rs.signal)].gain;
    const double e_s = obs[static_cast<size_t>(rs.signal)].qber;
    const double p1 = rs.states[static_cast<size_t>(rs.signal)].dist.probs[1];

    BoundResult bounds;
    if (sc.estimator == EstimatorKind::Lp) {
        bounds = solve_bounds_lp(build_lp(obs, sc.n_cut));
    } else {
        try {
            bounds = analytic_bounds_wcs(
                q_s, e_s, obs[static_cast<size_t>(rs.weak)].gain,
                obs[static_cast<size_t>(rs.weak)].qber,
                obs[static_cast<size_t>(rs.vacuum)].gain,
                obs[static_cast<size_t>(rs.vacuum)].qber, rs.mu, rs.nu);
        } catch (const VanishingYieldError&) {
            // No certifiable single-photon contribution: the rate is just
            // the (negative) error-correction cost.
            bounds.y1_lower = 0.0;
            bounds.e1_upper = 1.0;
            bounds.status = BoundStatus::Ok;
            bounds.diagnostics = "yield bound vanished";
        }
    }

    KeyRatePoint pt;
    pt.distance_km = distance_km;
    pt.q_signal = q_s;
    pt.e_signal = e_s;
    pt.y1_lower = bounds.y1_lower;
    pt.q1_lower = p1 * bounds.y1_lower;
    pt.e1_upper = bounds.e1_upper;
    pt.rate = key_rate(q_s, e_s, p1, bounds, sc.protocol);
    pt.mu_signal = rs.wcs_pair ? rs.mu : 0.0;
    pt.nu_decoy = rs.wcs_pair ? rs.nu : 0.0;
    return pt;
}

// Re-resolves the WCS pair at the given intensities, keeping other states.
ResolvedScenario with_intensities(const ResolvedScenario& rs, int n_cut,
                                  double mu, double nu)
{
    ResolvedScenario out = rs;
    out.mu = mu;
    out.nu = nu;
    out.states[static_cast<size_t>(out.signal)].dist =
        poisson_distribution(mu, n_cut);
    out.states[static_cast<size_t>(out.signal)].dist.label =
        rs.states[static_cast<size_t>(rs.signal)].spec->label;
    out.states[static_cast<size_t>(out.weak)].dist =
        poisson_distribution(nu, n_cut);
    out.states[static_cast<size_t>(out.weak)].dist.label =
        rs.states[static_cast<size_t>(rs.weak)].spec->label;
    return out;
}

KeyRatePoint evaluate_point(const ResolvedScenario& rs, const Scenario& sc,
                            double distance_km)
{
    if (!sc.optimize_wcs)
        return evaluate_resolved(rs, sc, distance_km);
    const WcsOptimum opt = optimize_wcs_intensities(
        sc.channel, sc.protocol, distance_km, sc.estimator, sc.n_cut);
    return evaluate_resolved(with_intensities(rs, sc.n_cut, opt.mu, opt.nu),
                             sc, distance_km);
}

// Rate as a sign probe for bracketing.
double probe_rate(const ResolvedScenario& rs, const Scenario& sc, double l)
{
    return evaluate_point(rs, sc, l).rate;
}

} // namespace

void ProtocolParams::validate() const
{
    if (!(q > 0.0) || q > 1.0)
        throw DomainError("ProtocolParams: q must be in (0, 1]");
    if (!(f >= 1.0) || !std::isfinite(f))
        throw DomainError("ProtocolParams: f must be >= 1");
}

double binary_entropy(double x)
{
    if (!(x >= 0.0) || !(x <= 1.0))
        throw DomainError("binary_entropy: argument must be in [0, 1]");
    if (x == 0.0 || x == 1.0)
        return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double key_rate(double q_signal, double e_signal, double p1_signal,
                const BoundResult& bounds, const ProtocolParams& protocol)
{
    protocol.validate();
    if (!(q_signal >= 0.0) || q_signal > 1.0)
        throw DomainError("key_rate: q_signal must be in [0, 1]");
    if (!(p1_signal >= 0.0) || p1_signal > 1.0)
        throw DomainError("key_rate: p1_signal must be in [0, 1]");
    if (bounds.status != BoundStatus::Ok)
        throw DomainError("key_rate: bounds are not usable");
    const double q1 = p1_signal * bounds.y1_lower;
    return protocol.q *
           (-q_signal * protocol.f * binary_entropy(e_signal) +
            q1 * (1.0 - binary_entropy(bounds.e1_upper)));
}

KeyRatePoint simulate_point(const Scenario& scenario, double distance_km)
{
    return evaluate_point(resolve_scenario(scenario), scenario, distance_km);
}

std::vector<KeyRatePoint> sweep_distance(const Scenario& scenario,
                                         const std::vector<double>& grid_km)
{
    if (grid_km.empty())
        throw DomainError("sweep_distance: empty distance grid");
    for (size_t i = 0; i < grid_km.size(); ++i) {
        if (!(grid_km[i] >= 0.0))
            throw DomainError("sweep_distance: distances must be >= 0");
        if (i > 0 && !(grid_km[i] > grid_km[i - 1]))
            throw DomainError(
                "sweep_distance: grid must be strictly increasing");
    }
    const ResolvedScenario rs = resolve_scenario(scenario);
    std::vector<KeyRatePoint> points;
    points.reserve(grid_km.size());
    for (double l : grid_km)
        points.push_back(evaluate_point(rs, scenario, l));
    return points;
}

double max_distance(const Scenario& scenario, double tol_km)
{
    if (!(tol_km > 0.0))
        throw DomainError("max_distance: tol_km must be positive");
    const ResolvedScenario rs = resolve_scenario(scenario);
    if (!(probe_rate(rs, scenario, 0.0) > 0.0))
        throw NoPositiveRateError(
            "max_distance: the rate is non-positive already at zero "
            "distance");

    double lo = 0.0;
    double hi = 1.0;
    while (probe_rate(rs, scenario, hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 16384.0)
            throw Error("max_distance: rate stays positive beyond any "
                        "plausible fiber length");
    }
    while (hi - lo > tol_km) {
        const double mid = 0.5 * (lo + hi);
        (probe_rate(rs, scenario, mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

WcsOptimum optimize_wcs_intensities(const ChannelParams& channel,
                                    const ProtocolParams& protocol,
                                    double distance_km,
                                    EstimatorKind estimator, int n_cut)
{
    channel.validate();
    protocol.validate();
    if (n_cut < 1)
        throw DomainError("optimize_wcs_intensities: n_cut must be >= 1");
    const LinkBudget link = link_budget(channel, distance_km);
    const PhotonNumberDistribution vac = vacuum_distribution(n_cut);
    const GainQber vac_obs = gain_and_qber(vac, channel, link);

    auto rate_at = [&](double mu, double nu) {
        const PhotonNumberDistribution sig = poisson_distribution(mu, n_cut);
        const PhotonNumberDistribution dec = poisson_distribution(nu, n_cut);
        const GainQber sig_obs = gain_and_qber(sig, channel, link);
        const GainQber dec_obs = gain_and_qber(dec, channel, link);
        BoundResult bounds;
        if (estimator == EstimatorKind::Lp) {
            ObservedStatistics obs{
                {"signal", SourceRole::Signal, sig, sig_obs.gain,
                 sig_obs.qber, 0.0},
                {"decoy", SourceRole::WeakDecoy, dec, dec_obs.gain,
                 dec_obs.qber, 0.0},
                {"vacuum", SourceRole::VacuumDecoy, vac, vac_obs.gain,
                 vac_obs.qber, 0.0}};
            bounds = solve_bounds_lp(build_lp(obs, n_cut));
        } else {
            try {
                bounds = analytic_bounds_wcs(sig_obs.gain, sig_obs.qber,
                                             dec_obs.gain, dec_obs.qber,
                                             vac_obs.gain, vac_obs.qber, mu,
                                             nu);
            } catch (const VanishingYieldError&) {
                return -1.0;
            }
        }
        return key_rate(sig_obs.gain, sig_obs.qber, sig.probs[1], bounds,
                        protocol);
    };

    constexpr double kMuMin = 0.05, kMuMax = 1.0;
    constexpr double kNuMin = 0.005, kNuCap = 0.2;
    auto nu_max_for = [&](double mu) { return std::min(kNuCap, 0.5 * mu); };

    // Deterministic coarse scan; ascending order means ties keep the
    // smallest intensities.
    WcsOptimum best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
    for (int i = 5; i <= 100; ++i) {
        const double mu = static_cast<double>(i) / 100.0;
        for (int j = 0;; ++j) {
            const double nu = kNuMin + 0.01 * j;
            if (nu > nu_max_for(mu) + 1e-12)
                break;
            const double r = rate_at(mu, nu);
            if (r > best.rate)
                best = {mu, nu, r};
        }
    }
    // Local pattern refinement down to 1e-3 in both intensities.
    for (double step = 0.005; step >= 0.001; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (int dm = -1; dm <= 1; ++dm) {
                for (int dn = -1; dn <= 1; ++dn) {
                    if (dm == 0 && dn == 0)
                        continue;
                    double mu = std::clamp(best.mu + dm * step, kMuMin, kMuMax);
                    double nu = std::clamp(best.nu + dn * step, kNuMin,
                                           nu_max_for(mu));
                    if (mu == best.mu && nu == best.nu)
                        continue;
                    const double r = rate_at(mu, nu);
                    if (r > best.rate) {
                        best = {mu, nu, r};
                        improved = true;
                    }
                }
            }
        }
    }
    return best;
}

} // namespace wgqkd
