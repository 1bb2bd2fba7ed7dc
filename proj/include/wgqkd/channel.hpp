#ifndef WGQKD_CHANNEL_HPP
#define WGQKD_CHANNEL_HPP

#include <string>
#include <vector>

#include "wgqkd/distribution.hpp"
#include "wgqkd/sources.hpp"

namespace wgqkd {

// Fiber link and receiver model: attenuation, detector efficiency folded
// into eta, background/dark counts y0 at error rate e0, and misalignment
// error ed for detected signal photons.
struct ChannelParams {
    double alpha_db_per_km = 0.21;
    double eta_bob = 0.045;
    double y0 = 1.7e-6;
    double e0 = 0.5;
    double ed = 0.033;

    void validate() const;
};

struct LinkBudget {
    double distance_km = 0.0;
    double t_ab = 1.0; // fiber transmittance
    double eta = 1.0;  // overall n-independent transmittance incl. receiver
};

LinkBudget link_budget(const ChannelParams& ch, double distance_km);

// Yield and error rate conditioned on n photons leaving the source.
double yield_n(const ChannelParams& ch, const LinkBudget& link, int n);
double error_n(const ChannelParams& ch, const LinkBudget& link, int n);

// Gain and QBER of a source state: Q = sum_n p_n Y_n, E = sum_n p_n Y_n e_n / Q.
// The distribution tail contributes at most tail_mass to Q (yields are <= 1),
// which is reported so estimators can widen their constraints accordingly.
struct GainQber {
    double gain = 0.0;
    double qber = 0.0;
    double gain_tail_bound = 0.0;
};

GainQber gain_and_qber(const PhotonNumberDistribution& d,
                       const ChannelParams& ch, const LinkBudget& link);

// One protocol state as the estimator sees it: its prepared statistics plus
// the observed (or simulated) gain and error rate, with an uncertainty
// half-width on both observables.
struct ObservedState {
    std::string label;
    SourceRole role = SourceRole::Signal;
    PhotonNumberDistribution distribution;
    double gain = 0.0;
    double qber = 0.0;
    double uncertainty = 0.0;
};

using ObservedStatistics = std::vector<ObservedState>;

} // namespace wgqkd

#endif
