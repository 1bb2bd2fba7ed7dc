#include "wgqkd/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "wgqkd/errors.hpp"
#include "wgqkd/quadrature.hpp"
#include "wgqkd/rk4.hpp"

namespace wgqkd {

namespace {

constexpr double kTailTol = 1e-6;       // per-channel untracked mass budget
constexpr double kResidualTol = 1e-8;   // step-halving agreement on every P_n
constexpr double kEnvelopeTol = 1e-10;  // pulse amplitude at grid edges, rel.
constexpr double kExcitationTol = 1e-10;
constexpr int kNMaxCap = 40;
constexpr int kMaxRefinements = 3;

// State layout for one counting hierarchy: bucket n occupies 4 slots
// [p_e, p_g, Re rho_eg, Im rho_eg]; the last bucket absorbs overflow counts
// (n > n_max) and feeds itself, so the count-summed trace stays exactly 1.
struct HierarchyDims {
    int nb = 0; // buckets = n_max + 2 (incl. overflow)
    int size() const { return 4 * nb; }
};

struct EmitterConsts {
    double c;  // drive coupling sqrt(gamma_wg / 2)
    double g;  // total decay gamma_wg + gamma_loss
};

EmitterConsts consts_of(const EmitterSpec& e)
{
    return {std::sqrt(0.5 * e.gamma_wg), e.gamma_total()};
}

// Hierarchy for a channel monitored by a static jump operator
// sqrt(gc) sigma_-: a count moves population e -> g one bucket up.
struct RecycleCountingRhs {
    PulseSpec pulse;
    EmitterConsts em;
    double gc; // counted decay rate (gamma_wg/2 reflected, gamma_loss lost)
    HierarchyDims dims;

    template <typename VecIn, typename VecOut>
    void operator()(double t, const VecIn& y, VecOut& dy) const
    {
        const double a = pulse_amplitude(pulse, t);
        const double ca = em.c * a;
        const double g = em.g;
        for (int n = 0; n < dims.nb; ++n) {
            const int k = 4 * n;
            const double pe = y[k], pg = y[k + 1], x = y[k + 2], w = y[k + 3];
            dy[k]     = 2.0 * ca * x - g * pe;
            dy[k + 1] = -2.0 * ca * x + (g - gc) * pe;
            dy[k + 2] = ca * (pg - pe) - 0.5 * g * x;
            dy[k + 3] = -0.5 * g * w;
        }
        for (int n = 1; n < dims.nb; ++n)
            dy[4 * n + 1] += gc * y[4 * (n - 1)];
        dy[4 * (dims.nb - 1) + 1] += gc * y[4 * (dims.nb - 1)];
    }
};

// Hierarchy for the transmitted channel, whose monitored field is the
// interference of the input with the emitted field: jump operator
// alpha(t) - sqrt(gamma_wg/2) sigma_-, drive Hamiltonian halved to keep the
// count-summed evolution identical to the unconditional one.
struct TransmittedCountingRhs {
    PulseSpec pulse;
    EmitterConsts em;
    HierarchyDims dims;

    template <typename VecIn, typename VecOut>
    void operator()(double t, const VecIn& y, VecOut& dy) const
    {
        const double a = pulse_amplitude(pulse, t);
        const double c = em.c;
        const double g = em.g;
        const double ca = c * a;
        const double a2 = a * a;
        const double gr = g - c * c; // uncounted decay gamma_wg/2 + gamma_loss
        for (int n = 0; n < dims.nb; ++n) {
            const int k = 4 * n;
            const double pe = y[k], pg = y[k + 1], x = y[k + 2], w = y[k + 3];
            dy[k]     = 2.0 * ca * x - (a2 + g) * pe;
            dy[k + 1] = -a2 * pg + gr * pe;
            dy[k + 2] = ca * pg - (a2 + 0.5 * g) * x;
            dy[k + 3] = -(a2 + 0.5 * g) * w;
        }
        auto feed = [&](int dst, int src) {
            const double pe = y[4 * src], pg = y[4 * src + 1],
                         x = y[4 * src + 2], w = y[4 * src + 3];
            const int k = 4 * dst;
            dy[k]     += a2 * pe;
            dy[k + 1] += a2 * pg - 2.0 * ca * x + c * c * pe;
            dy[k + 2] += a2 * x - ca * pe;
            dy[k + 3] += a2 * w;
        };
        for (int n = 1; n < dims.nb; ++n)
            feed(n, n - 1);
        feed(dims.nb - 1, dims.nb - 1);
    }
};

// Unconditional evolution plus running channel means: slots are
// [p_e, p_g, x, w, m_reflected, m_transmitted, m_lost].
struct UnconditionalRhs {
    PulseSpec pulse;
    EmitterSpec emitter;
    EmitterConsts em;

    template <typename VecIn, typename VecOut>
    void operator()(double t, const VecIn& y, VecOut& dy) const
    {
        const double a = pulse_amplitude(pulse, t);
        const double ca = em.c * a;
        const double g = em.g;
        const double pe = y[0], pg = y[1], x = y[2], w = y[3];
        dy[0] = 2.0 * ca * x - g * pe;
        dy[1] = -2.0 * ca * x + g * pe;
        dy[2] = ca * (pg - pe) - 0.5 * g * x;
        dy[3] = -0.5 * g * w;
        dy[4] = 0.5 * emitter.gamma_wg * pe;
        dy[5] = a * a - 2.0 * ca * x + em.c * em.c * pe;
        dy[6] = emitter.gamma_loss * pe;
    }
};

Eigen::VectorXd ground_state(const HierarchyDims& dims)
{
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dims.size());
    y[1] = 1.0;
    return y;
}

struct HierarchySolution {
    Eigen::VectorXd y;
    double worst_trace_dev = 0.0;
};

template <typename Rhs>
HierarchySolution solve_hierarchy(const Rhs& rhs, const HierarchyDims& dims,
                                  const SimGrid& grid, long n_steps,
                                  bool monitor_trace)
{
    HierarchySolution sol{ground_state(dims), 0.0};
    if (monitor_trace) {
        rk4_integrate(sol.y, grid.t_start, grid.t_end, n_steps, rhs,
                      [&](long, double, const Eigen::VectorXd& y) {
                          double s = 0.0;
                          for (int n = 0; n < dims.nb; ++n)
                              s += y[4 * n] + y[4 * n + 1];
                          sol.worst_trace_dev =
                              std::max(sol.worst_trace_dev, std::abs(s - 1.0));
                      });
    } else {
        rk4_integrate(sol.y, grid.t_start, grid.t_end, n_steps, rhs);
    }
    return sol;
}

PhotonNumberDistribution distribution_of(const Eigen::VectorXd& y, int n_max,
                                         std::string label)
{
    PhotonNumberDistribution d;
    d.probs = Eigen::VectorXd::Zero(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        d.probs[n] = std::max(0.0, y[4 * n] + y[4 * n + 1]);
    d.tail_mass = std::max(0.0, y[4 * (n_max + 1)] + y[4 * (n_max + 1) + 1]);
    d.label = std::move(label);
    return d;
}

double max_abs_diff(const PhotonNumberDistribution& a,
                    const PhotonNumberDistribution& b)
{
    double m = std::abs(a.tail_mass - b.tail_mass);
    for (int n = 0; n <= a.n_cut(); ++n)
        m = std::max(m, std::abs(a.probs[n] - b.probs[n]));
    return m;
}

struct PassResult {
    CountingResult result;
    double worst_tail = 0.0;
    double excitation_end = 0.0;
};

PassResult solve_all_channels(const EmitterSpec& emitter,
                              const PulseSpec& pulse, const SimGrid& grid,
                              int n_max, long n_steps)
{
    const EmitterConsts em = consts_of(emitter);
    const HierarchyDims dims{n_max + 2};
    const bool lossless = emitter.gamma_loss == 0.0;

    const RecycleCountingRhs refl_rhs{pulse, em, 0.5 * emitter.gamma_wg, dims};
    const RecycleCountingRhs lost_rhs{pulse, em, emitter.gamma_loss, dims};
    const TransmittedCountingRhs trans_rhs{pulse, em, dims};

    auto run = [&](const auto& rhs, long steps, bool monitor,
                   const char* label) {
        auto sol = solve_hierarchy(rhs, dims, grid, steps, monitor);
        return std::pair(distribution_of(sol.y, n_max, label),
                         sol.worst_trace_dev);
    };

    // Coarse pass at the requested step, fine pass at half of it; the fine
    // pass is the result, the coarse one only certifies convergence.
    auto refl_h = run(refl_rhs, n_steps, false, "reflected").first;
    auto trans_h = run(trans_rhs, n_steps, false, "transmitted").first;
    auto [refl, dev_refl] = run(refl_rhs, 2 * n_steps, true, "reflected");
    auto [trans, dev_trans] = run(trans_rhs, 2 * n_steps, true, "transmitted");

    PhotonNumberDistribution lost_h, lost;
    double dev_lost = 0.0;
    if (lossless) {
        lost = vacuum_distribution(n_max, "lost");
        lost_h = lost;
    } else {
        lost_h = run(lost_rhs, n_steps, false, "lost").first;
        std::tie(lost, dev_lost) = run(lost_rhs, 2 * n_steps, true, "lost");
    }

    Eigen::VectorXd u = Eigen::VectorXd::Zero(7);
    u[1] = 1.0;
    rk4_integrate(u, grid.t_start, grid.t_end, 2 * n_steps,
                  UnconditionalRhs{pulse, emitter, em});

    PassResult pass;
    pass.result.reflected = refl;
    pass.result.transmitted = trans;
    pass.result.lost = lost;
    pass.result.mean_reflected = u[4];
    pass.result.mean_transmitted = u[5];
    pass.result.mean_lost = u[6];
    pass.result.trace_deviation = std::max({dev_refl, dev_trans, dev_lost});
    pass.result.step_halving_residual =
        std::max({max_abs_diff(refl_h, refl), max_abs_diff(trans_h, trans),
                  max_abs_diff(lost_h, lost)});
    pass.result.n_max_used = n_max;
    pass.worst_tail =
        std::max({refl.tail_mass, trans.tail_mass, lost.tail_mass});
    pass.excitation_end = u[0];
    return pass;
}

} // namespace

double EmitterSpec::purcell() const
{
    if (gamma_loss == 0.0)
        return std::numeric_limits<double>::infinity();
    return gamma_wg / gamma_loss;
}

void EmitterSpec::validate() const
{
    if (!(gamma_wg > 0.0) || !std::isfinite(gamma_wg))
        throw DomainError("EmitterSpec: gamma_wg must be positive");
    if (!(gamma_loss >= 0.0) || !std::isfinite(gamma_loss))
        throw DomainError("EmitterSpec: gamma_loss must be >= 0");
}

void PulseSpec::validate() const
{
    if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons))
        throw DomainError("PulseSpec: mean_photons must be >= 0");
    if (!(spectral_width > 0.0) || !std::isfinite(spectral_width))
        throw DomainError("PulseSpec: spectral_width must be positive");
    if (!std::isfinite(detuning))
        throw DomainError("PulseSpec: detuning must be finite");
}

double pulse_amplitude(const PulseSpec& pulse, double t)
{
    const double s2 = pulse.spectral_width * pulse.spectral_width;
    return std::sqrt(pulse.mean_photons) *
           std::pow(2.0 * s2 / M_PI, 0.25) * std::exp(-s2 * t * t);
}

void SimGrid::validate() const
{
    if (!(t_end > t_start))
        throw DomainError("SimGrid: t_end must exceed t_start");
    if (!(step > 0.0))
        throw DomainError("SimGrid: step must be positive");
    if (n_max < 1)
        throw DomainError("SimGrid: n_max must be >= 1");
}

SimGrid default_grid(const EmitterSpec& emitter, const PulseSpec& pulse)
{
    emitter.validate();
    pulse.validate();
    const double g = emitter.gamma_total();
    const double s = pulse.spectral_width;
    SimGrid grid;
    grid.t_start = -6.0 / s;
    // 6 sigma-widths of pulse on each side plus the emitter ringdown; the
    // ringdown margin keeps the residual excitation below 1e-11.
    grid.t_end = 6.0 / s + 26.0 / g;
    grid.step = std::min(1.0 / (100.0 * g), 1.0 / (100.0 * s));
    grid.n_max = 8;
    return grid;
}

ScatterCoeffs single_photon_coeffs(const EmitterSpec& emitter, double delta)
{
    emitter.validate();
    const std::complex<double> denom(0.5 * emitter.gamma_total(), -delta);
    ScatterCoeffs sc;
    sc.reflection = -0.5 * emitter.gamma_wg / denom;
    sc.transmission = 1.0 + sc.reflection;
    return sc;
}

SinglePhotonProbs single_photon_probabilities(const EmitterSpec& emitter,
                                              const PulseSpec& pulse)
{
    emitter.validate();
    pulse.validate();
    const double s = pulse.spectral_width;
    const double d0 = pulse.detuning;
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * s * s);
    auto weighted = [&](auto coeff) {
        return adaptive_simpson(
            [&](double d) {
                const double u = (d - d0) / s;
                return norm * std::exp(-0.5 * u * u) *
                       std::norm(coeff(single_photon_coeffs(emitter, d)));
            },
            d0 - 45.0 * s, d0 + 45.0 * s, 1e-12);
    };
    SinglePhotonProbs p;
    p.reflect = weighted([](const ScatterCoeffs& c) { return c.reflection; });
    p.transmit = weighted([](const ScatterCoeffs& c) { return c.transmission; });
    p.loss = std::max(0.0, 1.0 - p.reflect - p.transmit);
    return p;
}

double single_photon_reflectance(const EmitterSpec& emitter,
                                 const PulseSpec& pulse)
{
    return single_photon_probabilities(emitter, pulse).reflect;
}

CountingResult count_channel_distributions(const EmitterSpec& emitter,
                                           const PulseSpec& pulse,
                                           const SimGrid& grid)
{
    emitter.validate();
    pulse.validate();
    grid.validate();
    if (pulse.detuning != 0.0)
        throw DomainError(
            "count_channel_distributions: only resonant pulses are supported");

    if (pulse.mean_photons > 0.0) {
        const double peak = pulse_amplitude(pulse, 0.0);
        const double edge = std::max(pulse_amplitude(pulse, grid.t_start),
                                     pulse_amplitude(pulse, grid.t_end));
        if (edge > kEnvelopeTol * peak)
            throw GridTooShortError(
                "count_channel_distributions: pulse envelope at the grid "
                "edges is " +
                std::to_string(edge / peak) +
                " of its peak; widen [t_start, t_end]");
    }

    const double span = grid.t_end - grid.t_start;
    long n_steps = std::max<long>(1, static_cast<long>(std::ceil(span / grid.step)));

    int n_max = grid.n_max;
    for (;;) {
        PassResult pass = solve_all_channels(emitter, pulse, grid, n_max, n_steps);
        for (int r = 0;
             pass.result.step_halving_residual >= kResidualTol &&
             r < kMaxRefinements;
             ++r) {
            n_steps *= 2;
            pass = solve_all_channels(emitter, pulse, grid, n_max, n_steps);
        }
        if (pass.result.step_halving_residual >= kResidualTol)
            throw Error("count_channel_distributions: step-halving residual " +
                        std::to_string(pass.result.step_halving_residual) +
                        " did not converge below 1e-8");

        if (pass.worst_tail <= kTailTol) {
            if (pass.excitation_end > kExcitationTol)
                throw GridTooShortError(
                    "count_channel_distributions: emitter excitation at "
                    "t_end is " +
                    std::to_string(pass.excitation_end) +
                    "; extend the grid past the ringdown");
            validate_distribution(pass.result.reflected);
            validate_distribution(pass.result.transmitted);
            validate_distribution(pass.result.lost);
            return pass.result;
        }
        if (n_max + 2 > kNMaxCap)
            throw TruncationTooSmallError(
                "count_channel_distributions: untracked mass " +
                std::to_string(pass.worst_tail) +
                " still above 1e-6 at n_max=" + std::to_string(n_max));
        n_max += 2;
    }
}

CountingResult count_channel_distributions(const EmitterSpec& emitter,
                                           const PulseSpec& pulse)
{
    return count_channel_distributions(emitter, pulse,
                                       default_grid(emitter, pulse));
}

TimeTrace reflected_hierarchy_trace(const EmitterSpec& emitter,
                                    const PulseSpec& pulse,
                                    const SimGrid& grid, long stride)
{
    emitter.validate();
    pulse.validate();
    grid.validate();
    if (stride < 1)
        throw DomainError("reflected_hierarchy_trace: stride must be >= 1");

    const EmitterConsts em = consts_of(emitter);
    const HierarchyDims dims{grid.n_max + 2};
    const RecycleCountingRhs rhs{pulse, em, 0.5 * emitter.gamma_wg, dims};
    const double span = grid.t_end - grid.t_start;
    const long n_steps =
        std::max<long>(1, static_cast<long>(std::ceil(span / grid.step)));

    TimeTrace trace;
    std::vector<Eigen::VectorXd> rows;
    auto sample = [&](double t, const Eigen::VectorXd& y) {
        trace.times.push_back(t);
        Eigen::VectorXd tr(dims.nb - 1);
        double exc = 0.0;
        for (int n = 0; n < dims.nb; ++n) {
            if (n < dims.nb - 1)
                tr[n] = y[4 * n] + y[4 * n + 1];
            exc += y[4 * n];
        }
        rows.push_back(std::move(tr));
        trace.excitation.push_back(exc);
    };

    Eigen::VectorXd y = ground_state(dims);
    sample(grid.t_start, y);
    rk4_integrate(y, grid.t_start, grid.t_end, n_steps, rhs,
                  [&](long i, double t, const Eigen::VectorXd& yi) {
                      if ((i + 1) % stride == 0 || i + 1 == n_steps)
                          sample(t, yi);
                  });

    trace.bucket_traces.resize(static_cast<Eigen::Index>(rows.size()),
                               dims.nb - 1);
    for (size_t i = 0; i < rows.size(); ++i)
        trace.bucket_traces.row(static_cast<Eigen::Index>(i)) =
            rows[i].transpose();
    return trace;
}

} // namespace wgqkd
