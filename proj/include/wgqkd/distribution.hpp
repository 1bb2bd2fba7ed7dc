#ifndef WGQKD_DISTRIBUTION_HPP
#define WGQKD_DISTRIBUTION_HPP

#include <string>

#include <Eigen/Dense>

namespace wgqkd {

// Photon-number distribution truncated at n_cut, with the probability mass
// beyond the truncation kept explicitly.  Invariants: probs[n] >= 0,
// tail_mass >= 0, and probs.sum() + tail_mass == 1 within 1e-10.
struct PhotonNumberDistribution {
    Eigen::VectorXd probs;   // probs[n] = P(n photons), n = 0..n_cut
    double tail_mass = 0.0;  // P(n > n_cut)
    std::string label;

    int n_cut() const { return static_cast<int>(probs.size()) - 1; }
};

// Builds a distribution from explicit per-n probabilities, assigning any
// normalization deficit to the tail.  Throws if entries are negative or the
// total exceeds one beyond rounding error.
PhotonNumberDistribution make_distribution(Eigen::VectorXd probs,
                                           std::string label = {});

// Checks the invariants above; throws on violation.
void validate_distribution(const PhotonNumberDistribution& d);

// Re-truncates to a new n_cut: folds the cut entries into the tail when
// shrinking, zero-pads when growing.
PhotonNumberDistribution retruncate(const PhotonNumberDistribution& d,
                                    int n_cut);

// The deterministic vacuum state: all mass at n = 0.
PhotonNumberDistribution vacuum_distribution(int n_cut,
                                             std::string label = "vacuum");

} // namespace wgqkd

#endif
