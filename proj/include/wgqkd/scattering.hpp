#ifndef WGQKD_SCATTERING_HPP
#define WGQKD_SCATTERING_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "wgqkd/distribution.hpp"

namespace wgqkd {

// Two-level emitter side-coupled to a single-mode waveguide.  gamma_wg is
// the total decay rate into the waveguide (both directions together) and
// sets the time unit; gamma_loss collects every non-waveguide decay.
struct EmitterSpec {
    double gamma_wg = 1.0;
    double gamma_loss = 0.0;

    double gamma_total() const { return gamma_wg + gamma_loss; }
    // Ratio of waveguide decay to parasitic decay ("beta/(1-beta)" figure
    // of merit); infinite for a lossless emitter.
    double purcell() const;
    void validate() const;
};

// Gaussian coherent input pulse, resonant unless detuning says otherwise.
// spectral_width is the std deviation of the field's spectral density.
struct PulseSpec {
    double mean_photons = 1.0;
    double spectral_width = 0.5;
    double detuning = 0.0;

    void validate() const;
};

// Real pulse envelope alpha(t); |alpha|^2 integrates to mean_photons.
double pulse_amplitude(const PulseSpec& pulse, double t);

// Time grid for the counting integration.  n_max is the largest photon
// number tracked per output channel before the overflow bucket.
struct SimGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    double step = 0.0;
    int n_max = 8;

    void validate() const;
};

// Grid wide and fine enough for the given emitter/pulse: covers the pulse
// plus emitter ringdown, resolving both timescales.
SimGrid default_grid(const EmitterSpec& emitter, const PulseSpec& pulse);

// Single-photon scattering coefficients at detuning delta from resonance.
struct ScatterCoeffs {
    std::complex<double> reflection;
    std::complex<double> transmission;
};

ScatterCoeffs single_photon_coeffs(const EmitterSpec& emitter, double delta);

// Reflection/transmission/loss probabilities for a single photon with the
// pulse's Gaussian spectral density, by quadrature over detuning.
struct SinglePhotonProbs {
    double reflect = 0.0;
    double transmit = 0.0;
    double loss = 0.0;
};

SinglePhotonProbs single_photon_probabilities(const EmitterSpec& emitter,
                                              const PulseSpec& pulse);
double single_photon_reflectance(const EmitterSpec& emitter,
                                 const PulseSpec& pulse);

// Exact photon-number statistics of the three output channels, obtained by
// integrating one number-resolved master-equation hierarchy per channel.
struct CountingResult {
    PhotonNumberDistribution reflected;
    PhotonNumberDistribution transmitted;
    PhotonNumberDistribution lost;
    double mean_reflected = 0.0;   // channel means from rate integrals,
    double mean_transmitted = 0.0; // independent of the truncation
    double mean_lost = 0.0;
    double trace_deviation = 0.0;       // worst |sum_n Tr rho^(n) - 1| seen
    double step_halving_residual = 0.0; // max |P_n(h) - P_n(h/2)| over all channels
    int n_max_used = 0;
};

// Counts photons in the reflected, transmitted and lost channels for a
// coherent pulse scattering off the emitter.  The truncation grows
// automatically until every channel's untracked mass is below 1e-6, and the
// result is cross-checked by a step-halving pass.
CountingResult count_channel_distributions(const EmitterSpec& emitter,
                                           const PulseSpec& pulse,
                                           const SimGrid& grid);

CountingResult count_channel_distributions(const EmitterSpec& emitter,
                                           const PulseSpec& pulse);

// Diagnostic time series of the reflected-channel hierarchy: per-bucket
// traces and the emitter excitation, sampled every `stride` steps.
struct TimeTrace {
    std::vector<double> times;
    Eigen::MatrixXd bucket_traces;  // column n = Tr rho^(n)(t)
    std::vector<double> excitation; // count-summed P(emitter excited)
};

TimeTrace reflected_hierarchy_trace(const EmitterSpec& emitter,
                                    const PulseSpec& pulse,
                                    const SimGrid& grid, long stride = 1);

} // namespace wgqkd

#endif
