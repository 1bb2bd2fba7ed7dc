#include "wgqkd/channel.hpp"

#include <cmath>

#include "wgqkd/errors.hpp"

namespace wgqkd {

namespace {
constexpr double kGainTailTol = 1e-6;
}

void ChannelParams::validate() const
{
    if (!(alpha_db_per_km >= 0.0) || !std::isfinite(alpha_db_per_km))
        throw DomainError("ChannelParams: alpha_db_per_km must be >= 0");
    if (!(eta_bob > 0.0) || eta_bob > 1.0)
        throw DomainError("ChannelParams: eta_bob must be in (0, 1]");
    if (!(y0 >= 0.0) || y0 > 1.0)
        throw DomainError("ChannelParams: y0 must be in [0, 1]");
    if (!(e0 >= 0.0) || e0 > 1.0)
        throw DomainError("ChannelParams: e0 must be in [0, 1]");
    if (!(ed >= 0.0) || ed > 1.0)
        throw DomainError("ChannelParams: ed must be in [0, 1]");
}

LinkBudget link_budget(const ChannelParams& ch, double distance_km)
{
    ch.validate();
    if (!(distance_km >= 0.0) || !std::isfinite(distance_km))
        throw DomainError("link_budget: distance must be >= 0");
    LinkBudget link;
    link.distance_km = distance_km;
    link.t_ab = std::pow(10.0, -ch.alpha_db_per_km * distance_km / 10.0);
    link.eta = link.t_ab * ch.eta_bob;
    return link;
}

double yield_n(const ChannelParams& ch, const LinkBudget& link, int n)
{
    if (n < 0)
        throw DomainError("yield_n: n must be >= 0");
    // Background and at-least-one-photon detection, minus the coincidence.
    return 1.0 - (1.0 - ch.y0) * std::pow(1.0 - link.eta, n);
}

double error_n(const ChannelParams& ch, const LinkBudget& link, int n)
{
    const double yn = yield_n(ch, link, n);
    if (yn <= 0.0)
        return 0.0; // no detections, no errors to attribute
    return (ch.e0 * ch.y0 + ch.ed * (yn - ch.y0)) / yn;
}

GainQber gain_and_qber(const PhotonNumberDistribution& d,
                       const ChannelParams& ch, const LinkBudget& link)
{
    validate_distribution(d);
    if (d.tail_mass >= kGainTailTol)
        throw TailTooHeavyError("gain_and_qber: tail mass " +
                                std::to_string(d.tail_mass) +
                                " of '" + d.label +
                                "' exceeds the gain error budget");
    GainQber g;
    double errors = 0.0;
    for (int n = 0; n <= d.n_cut(); ++n) {
        const double yn = yield_n(ch, link, n);
        g.gain += d.probs[n] * yn;
        // Accumulate Y_n e_n directly; it is linear in Y_n so no division
        // by near-zero yields is ever needed.
        errors += d.probs[n] * (ch.e0 * ch.y0 + ch.ed * (yn - ch.y0));
    }
    g.qber = g.gain > 0.0 ? errors / g.gain : 0.0;
    g.gain_tail_bound = d.tail_mass;
    return g;
}

} // namespace wgqkd
