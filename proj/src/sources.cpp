#include "wgqkd/sources.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wgqkd/errors.hpp"

namespace wgqkd {

namespace {
constexpr double kStatsTailTol = 1e-4;
constexpr double kTableDeficitTol = 1e-6;
constexpr double kTableExcessTol = 1e-10;
}

const char* to_string(SourceRole role)
{
    switch (role) {
    case SourceRole::Signal: return "signal";
    case SourceRole::WeakDecoy: return "weak-decoy";
    case SourceRole::VacuumDecoy: return "vacuum-decoy";
    }
    return "?";
}

PhotonNumberDistribution poisson_distribution(double mu, int n_cut)
{
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw DomainError("poisson_distribution: mu must be >= 0");
    if (n_cut < 0)
        throw DomainError("poisson_distribution: n_cut must be >= 0");
    PhotonNumberDistribution d;
    d.probs = Eigen::VectorXd::Zero(n_cut + 1);
    double p = std::exp(-mu);
    double total = 0.0;
    for (int n = 0; n <= n_cut; ++n) {
        d.probs[n] = p;
        total += p;
        p *= mu / static_cast<double>(n + 1);
    }
    d.tail_mass = std::max(0.0, 1.0 - total);
    d.label = "wcs";
    return d;
}

PhotonNumberDistribution tlss_distribution(const EmitterSpec& emitter,
                                           const PulseSpec& pulse, int n_cut)
{
    if (n_cut < 0)
        throw DomainError("tlss_distribution: n_cut must be >= 0");
    // Memoized on the exact parameter tuple: sweeps and figure runs ask for
    // the same source many times and the integration dominates their cost.
    // (The library is single-threaded by design.)
    using Key = std::array<double, 5>;
    static std::map<Key, PhotonNumberDistribution> cache;
    const Key key{emitter.gamma_wg, emitter.gamma_loss, pulse.mean_photons,
                  pulse.spectral_width, pulse.detuning};
    auto it = cache.find(key);
    if (it == cache.end()) {
        const CountingResult counts =
            count_channel_distributions(emitter, pulse);
        it = cache.emplace(key, counts.reflected).first;
    }
    PhotonNumberDistribution d = retruncate(it->second, n_cut);
    d.label = "tlss";
    return d;
}

PhotonNumberDistribution tabular_distribution(
    const std::vector<std::pair<long, double>>& rows, std::string label)
{
    if (rows.empty())
        throw DomainError("tabular_distribution: no entries");
    long max_n = 0;
    std::map<long, double> seen;
    for (const auto& [n, p] : rows) {
        if (n < 0)
            throw DomainError("tabular_distribution: photon number " +
                              std::to_string(n) + " is negative");
        if (!(p >= 0.0) || !std::isfinite(p))
            throw NegativeProbabilityError(
                "tabular_distribution: invalid probability at n=" +
                std::to_string(n));
        if (!seen.emplace(n, p).second)
            throw DuplicateIndexError(
                "tabular_distribution: duplicate photon number " +
                std::to_string(n));
        max_n = std::max(max_n, n);
    }
    double total = 0.0;
    for (const auto& [n, p] : seen)
        total += p;
    if (total > 1.0 + kTableExcessTol)
        throw NotNormalizedError("tabular_distribution: probabilities sum to " +
                                 std::to_string(total) + " > 1");
    if (total < 1.0 - kTableDeficitTol)
        throw NotNormalizedError("tabular_distribution: probabilities sum to " +
                                 std::to_string(total) +
                                 "; deficits above 1e-6 are rejected rather "
                                 "than renormalized");
    PhotonNumberDistribution d;
    d.probs = Eigen::VectorXd::Zero(max_n + 1);
    for (const auto& [n, p] : seen)
        d.probs[n] = p;
    d.tail_mass = std::max(0.0, 1.0 - total);
    d.label = std::move(label);
    return d;
}

PhotonNumberDistribution load_source_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigParseError("cannot open source table '" + path + "'");
    std::vector<std::pair<long, double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        long n = 0;
        double p = 0.0;
        if (!(ls >> n))
            continue; // blank or comment-only line
        if (!(ls >> p))
            throw ConfigParseError(path + ":" + std::to_string(lineno) +
                                   ": expected '<n> <probability>'");
        std::string rest;
        if (ls >> rest)
            throw ConfigParseError(path + ":" + std::to_string(lineno) +
                                   ": trailing token '" + rest + "'");
        rows.emplace_back(n, p);
    }
    if (rows.empty())
        throw ConfigParseError("source table '" + path + "' has no entries");
    try {
        return tabular_distribution(rows, path);
    } catch (const Error& e) {
        throw ConfigParseError("source table '" + path + "': " + e.what());
    }
}

DistributionStats distribution_stats(const PhotonNumberDistribution& d)
{
    validate_distribution(d);
    if (d.tail_mass >= kStatsTailTol)
        throw TailTooHeavyError(
            "distribution_stats: tail mass " + std::to_string(d.tail_mass) +
            " is too large for truncated moments to be meaningful");
    DistributionStats s;
    double m1 = 0.0, m2 = 0.0;
    for (int n = 0; n <= d.n_cut(); ++n) {
        m1 += n * d.probs[n];
        m2 += static_cast<double>(n) * n * d.probs[n];
    }
    s.mean = m1;
    s.variance = std::max(0.0, m2 - m1 * m1);
    s.mandel_q = m1 > 0.0 ? s.variance / m1 - 1.0 : 0.0;
    s.multiphoton_mass = d.tail_mass;
    for (int n = 2; n <= d.n_cut(); ++n)
        s.multiphoton_mass += d.probs[n];
    return s;
}

PhotonNumberDistribution matched_poisson(const PhotonNumberDistribution& d,
                                         int n_cut)
{
    validate_distribution(d);
    double mean = 0.0;
    for (int n = 0; n <= d.n_cut(); ++n)
        mean += n * d.probs[n];
    PhotonNumberDistribution out = poisson_distribution(mean, n_cut);
    out.label = d.label.empty() ? "matched-poisson"
                                : d.label + "-matched-poisson";
    return out;
}

PhotonNumberDistribution resolve_source(const SourceStateSpec& spec, int n_cut)
{
    if (spec.role == SourceRole::VacuumDecoy)
        return vacuum_distribution(n_cut, spec.label);
    PhotonNumberDistribution d = std::visit(
        [&](const auto& p) -> PhotonNumberDistribution {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, WcsSource>) {
                return poisson_distribution(p.mu, n_cut);
            } else if constexpr (std::is_same_v<T, TableSource>) {
                return retruncate(load_source_table(p.path), n_cut);
            } else if constexpr (std::is_same_v<T, TlssSource>) {
                return tlss_distribution(p.emitter, p.pulse, n_cut);
            } else {
                return vacuum_distribution(n_cut, spec.label);
            }
        },
        spec.params);
    d.label = spec.label;
    return d;
}

} // namespace wgqkd
