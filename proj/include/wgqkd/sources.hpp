#ifndef WGQKD_SOURCES_HPP
#define WGQKD_SOURCES_HPP

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wgqkd/distribution.hpp"
#include "wgqkd/scattering.hpp"

namespace wgqkd {

// Role a source state plays in the decoy-state protocol.
enum class SourceRole { Signal, WeakDecoy, VacuumDecoy };

// How a state's photon-number distribution is produced.
struct WcsSource {                 // phase-randomized weak coherent state
    double mu = 0.1;
};
struct TableSource {               // tabulated statistics loaded from file
    std::string path;
};
struct TlssSource {                // two-level-emitter scattered pulse
    EmitterSpec emitter;
    PulseSpec pulse;
};
struct VacuumSource {};            // deterministic vacuum

using SourceParams =
    std::variant<WcsSource, TableSource, TlssSource, VacuumSource>;

struct SourceStateSpec {
    std::string label;
    SourceRole role = SourceRole::Signal;
    SourceParams params;
};

const char* to_string(SourceRole role);

// Poisson photon-number statistics of a phase-randomized coherent state.
PhotonNumberDistribution poisson_distribution(double mu, int n_cut);

// Reflected-channel statistics of a coherent pulse scattered off the
// emitter, truncated to n_cut.
PhotonNumberDistribution tlss_distribution(const EmitterSpec& emitter,
                                           const PulseSpec& pulse, int n_cut);

// Distribution from explicit (n, p_n) rows.  Rejects negative entries,
// duplicate indices, and totals incompatible with normalization; a small
// deficit becomes tail mass.
PhotonNumberDistribution tabular_distribution(
    const std::vector<std::pair<long, double>>& rows, std::string label = {});

// Parses a whitespace-separated "n p_n" table with '#' comments.
PhotonNumberDistribution load_source_table(const std::string& path);

// Summary statistics of a truncated distribution.  Requires the tail to be
// small enough (< 1e-4) that truncated moments are meaningful.
struct DistributionStats {
    double mean = 0.0;
    double variance = 0.0;
    double mandel_q = 0.0;         // variance/mean - 1; zero for vacuum
    double multiphoton_mass = 0.0; // P(n >= 2), tail included
};

DistributionStats distribution_stats(const PhotonNumberDistribution& d);

// Poisson distribution with the same mean, for like-for-like comparisons.
PhotonNumberDistribution matched_poisson(const PhotonNumberDistribution& d,
                                         int n_cut);

// Materializes a source spec as a distribution at the given truncation.
// Vacuum-role states are always the exact vacuum.
PhotonNumberDistribution resolve_source(const SourceStateSpec& spec,
                                        int n_cut);

} // namespace wgqkd

#endif
