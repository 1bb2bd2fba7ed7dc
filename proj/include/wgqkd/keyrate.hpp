#ifndef WGQKD_KEYRATE_HPP
#define WGQKD_KEYRATE_HPP

#include <string>
#include <vector>

#include "wgqkd/channel.hpp"
#include "wgqkd/estimator.hpp"
#include "wgqkd/sources.hpp"

namespace wgqkd {

// Protocol-level constants: q is the sifting factor, f the error-correction
// inefficiency relative to the Shannon limit.
struct ProtocolParams {
    double q = 0.5;
    double f = 1.22;

    void validate() const;
};

enum class EstimatorKind { Lp, Analytic };

// A full decoy-state scenario: the prepared states, the link, the protocol
// constants, which single-photon estimator to use, and the shared photon
// number truncation.  When optimize_wcs is set the signal and weak-decoy
// states must be WCS and their intensities are re-optimized per distance.
struct Scenario {
    std::vector<SourceStateSpec> sources;
    ChannelParams channel;
    ProtocolParams protocol;
    EstimatorKind estimator = EstimatorKind::Lp;
    int n_cut = 10;
    bool optimize_wcs = false;
};

// Shannon binary entropy, in bits.
double binary_entropy(double x);

// Asymptotic secure-key rate per pulse:
//   R = q * ( -Q_s f H2(E_s) + Q_1_lower (1 - H2(e_1_upper)) )
// with Q_1_lower = p_1 * y1_lower.  Negative results are reported as-is.
double key_rate(double q_signal, double e_signal, double p1_signal,
                const BoundResult& bounds, const ProtocolParams& protocol);

struct KeyRatePoint {
    double distance_km = 0.0;
    double rate = 0.0;
    double q_signal = 0.0;
    double e_signal = 0.0;
    double q1_lower = 0.0;
    double e1_upper = 0.0;
    double y1_lower = 0.0;
    double mu_signal = 0.0; // WCS intensities actually used (0 when not WCS)
    double nu_decoy = 0.0;
};

// Evaluates the scenario at one distance: simulate every state's gain/QBER
// through the channel, bound the single-photon contribution, form the rate.
KeyRatePoint simulate_point(const Scenario& scenario, double distance_km);

// Same, over a strictly increasing distance grid (source statistics are
// resolved once and reused).
std::vector<KeyRatePoint> sweep_distance(const Scenario& scenario,
                                         const std::vector<double>& grid_km);

// Largest distance with positive rate, located by bracketing and bisection
// to within tol_km.  Throws NoPositiveRateError when even distance zero
// yields no key.
double max_distance(const Scenario& scenario, double tol_km = 0.1);

// Best WCS signal/decoy intensities at a fixed distance: deterministic
// coarse grid scan plus local refinement, ties broken toward smaller
// intensities.  The weak decoy is capped at min(0.2, mu/2).  Past the
// maximal distance the returned rate is simply non-positive.
struct WcsOptimum {
    double mu = 0.0;
    double nu = 0.0;
    double rate = 0.0;
};

WcsOptimum optimize_wcs_intensities(const ChannelParams& channel,
                                    const ProtocolParams& protocol,
                                    double distance_km,
                                    EstimatorKind estimator = EstimatorKind::Lp,
                                    int n_cut = 10);

} // namespace wgqkd

#endif
