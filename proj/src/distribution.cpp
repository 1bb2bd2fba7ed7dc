#include "wgqkd/distribution.hpp"

#include <cmath>
#include <utility>

#include "wgqkd/errors.hpp"

namespace wgqkd {

namespace {
constexpr double kNormTol = 1e-10;
}

PhotonNumberDistribution make_distribution(Eigen::VectorXd probs,
                                           std::string label)
{
    if (probs.size() < 1)
        throw DomainError("make_distribution: need at least the n=0 entry");
    for (Eigen::Index n = 0; n < probs.size(); ++n) {
        if (!(probs[n] >= 0.0))
            throw NegativeProbabilityError(
                "make_distribution: negative probability at n=" +
                std::to_string(n));
    }
    const double total = probs.sum();
    if (total > 1.0 + kNormTol)
        throw NotNormalizedError("make_distribution: probabilities sum to " +
                                 std::to_string(total) + " > 1");
    PhotonNumberDistribution d;
    d.probs = std::move(probs);
    d.tail_mass = std::max(0.0, 1.0 - total);
    d.label = std::move(label);
    return d;
}

void validate_distribution(const PhotonNumberDistribution& d)
{
    if (d.probs.size() < 1)
        throw DomainError("distribution '" + d.label + "' is empty");
    for (Eigen::Index n = 0; n < d.probs.size(); ++n) {
        if (!(d.probs[n] >= 0.0))
            throw NegativeProbabilityError("distribution '" + d.label +
                                           "': negative probability at n=" +
                                           std::to_string(n));
    }
    if (!(d.tail_mass >= 0.0))
        throw NegativeProbabilityError("distribution '" + d.label +
                                       "': negative tail mass");
    const double total = d.probs.sum() + d.tail_mass;
    if (std::abs(total - 1.0) > kNormTol)
        throw NotNormalizedError("distribution '" + d.label +
                                 "': total mass deviates from 1 by " +
                                 std::to_string(total - 1.0));
}

PhotonNumberDistribution retruncate(const PhotonNumberDistribution& d,
                                    int n_cut)
{
    if (n_cut < 0)
        throw DomainError("retruncate: n_cut must be >= 0");
    PhotonNumberDistribution out;
    out.label = d.label;
    out.probs = Eigen::VectorXd::Zero(n_cut + 1);
    const int keep = std::min<int>(n_cut, d.n_cut());
    out.probs.head(keep + 1) = d.probs.head(keep + 1);
    out.tail_mass = d.tail_mass;
    for (int n = keep + 1; n <= d.n_cut(); ++n)
        out.tail_mass += d.probs[n];
    return out;
}

PhotonNumberDistribution vacuum_distribution(int n_cut, std::string label)
{
    if (n_cut < 0)
        throw DomainError("vacuum_distribution: n_cut must be >= 0");
    PhotonNumberDistribution d;
    d.probs = Eigen::VectorXd::Zero(n_cut + 1);
    d.probs[0] = 1.0;
    d.tail_mass = 0.0;
    d.label = std::move(label);
    return d;
}

} // namespace wgqkd
