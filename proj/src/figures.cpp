#include "wgqkd/figures.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "wgqkd/errors.hpp"

namespace wgqkd {

namespace {

std::vector<double> linear_grid(double start, double stop, double step)
{
    std::vector<double> g;
    for (int k = 0;; ++k) {
        const double v = start + k * step;
        if (v > stop + 1e-9)
            break;
        g.push_back(v);
    }
    return g;
}

SourceStateSpec wcs_state(std::string label, SourceRole role, double mu)
{
    SourceStateSpec s;
    s.label = std::move(label);
    s.role = role;
    s.params = WcsSource{mu};
    return s;
}

SourceStateSpec tlss_state(std::string label, SourceRole role, double nbar,
                           double sigma, double purcell)
{
    SourceStateSpec s;
    s.label = std::move(label);
    s.role = role;
    TlssSource t;
    t.emitter.gamma_wg = 1.0;
    t.emitter.gamma_loss = 1.0 / purcell;
    t.pulse.mean_photons = nbar;
    t.pulse.spectral_width = sigma;
    s.params = t;
    return s;
}

SourceStateSpec vacuum_state()
{
    SourceStateSpec s;
    s.label = "vacuum";
    s.role = SourceRole::VacuumDecoy;
    s.params = VacuumSource{};
    return s;
}

// Emitter source with the standard decoy pair: a bright pulse as signal and
// a dim one (nbar = 0.02) as weak decoy.
Scenario tlss_scenario(double sigma, double purcell, double nbar = 1.0)
{
    Scenario sc;
    sc.sources.push_back(
        tlss_state("signal", SourceRole::Signal, nbar, sigma, purcell));
    sc.sources.push_back(
        tlss_state("decoy", SourceRole::WeakDecoy, 0.02, sigma, purcell));
    sc.sources.push_back(vacuum_state());
    return sc;
}

Scenario wcs_opt_scenario()
{
    Scenario sc;
    sc.sources.push_back(wcs_state("signal", SourceRole::Signal, 0.1));
    sc.sources.push_back(wcs_state("decoy", SourceRole::WeakDecoy, 0.05));
    sc.sources.push_back(vacuum_state());
    sc.optimize_wcs = true;
    return sc;
}

Scenario hsps_scenario(const std::string& data_dir)
{
    namespace fs = std::filesystem;
    Scenario sc;
    SourceStateSpec sig;
    sig.label = "signal";
    sig.role = SourceRole::Signal;
    sig.params = TableSource{(fs::path(data_dir) / "hsps_signal.txt").string()};
    SourceStateSpec dec;
    dec.label = "decoy";
    dec.role = SourceRole::WeakDecoy;
    dec.params = TableSource{(fs::path(data_dir) / "hsps_decoy.txt").string()};
    sc.sources.push_back(std::move(sig));
    sc.sources.push_back(std::move(dec));
    sc.sources.push_back(vacuum_state());
    return sc;
}

OutputTable sweep_to_table(const ScenarioConfig& cfg, const char* command)
{
    const std::vector<KeyRatePoint> pts =
        sweep_distance(cfg.scenario, cfg.sweep.grid());
    OutputTable t;
    t.metadata.emplace_back("command", command);
    for (auto& kv : config_metadata(cfg))
        t.metadata.push_back(std::move(kv));
    t.columns = {"l_km", "R", "Q_s", "E_s", "Y1_lower", "e1_upper"};
    const bool emit_intensities = cfg.scenario.optimize_wcs;
    if (emit_intensities) {
        t.columns.push_back("mu");
        t.columns.push_back("nu");
    }
    for (const auto& p : pts) {
        std::vector<double> row{p.distance_km, p.rate,     p.q_signal,
                                p.e_signal,    p.y1_lower, p.e1_upper};
        if (emit_intensities) {
            row.push_back(p.mu_signal);
            row.push_back(p.nu_decoy);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace

OutputTable run_sweep(const ScenarioConfig& cfg)
{
    return sweep_to_table(cfg, "sweep");
}

OutputTable run_max_distance(const ScenarioConfig& cfg)
{
    const double lmax = max_distance(cfg.scenario, cfg.sweep.tol_km);
    OutputTable t;
    t.metadata.emplace_back("command", "max-distance");
    for (auto& kv : config_metadata(cfg))
        t.metadata.push_back(std::move(kv));
    t.columns = {"l_max_km"};
    t.rows.push_back({lmax});
    return t;
}

OutputTable run_source_stats(const ScenarioConfig& cfg)
{
    OutputTable t;
    t.metadata.emplace_back("command", "source-stats");
    for (auto& kv : config_metadata(cfg))
        t.metadata.push_back(std::move(kv));
    t.columns = {"state", "n", "p_n"};
    int idx = 0;
    for (const auto& spec : cfg.scenario.sources) {
        const PhotonNumberDistribution d =
            resolve_source(spec, cfg.scenario.n_cut);
        const DistributionStats st = distribution_stats(d);
        const std::string prefix = "state." + std::to_string(idx) + ".";
        t.metadata.emplace_back(prefix + "label", spec.label);
        t.metadata.emplace_back(prefix + "role", to_string(spec.role));
        t.metadata.emplace_back(prefix + "mean", format_double(st.mean));
        t.metadata.emplace_back(prefix + "variance",
                                format_double(st.variance));
        t.metadata.emplace_back(prefix + "mandel_q",
                                format_double(st.mandel_q));
        t.metadata.emplace_back(prefix + "multiphoton_mass",
                                format_double(st.multiphoton_mass));
        t.metadata.emplace_back(prefix + "tail_mass",
                                format_double(d.tail_mass));
        for (int n = 0; n <= d.n_cut(); ++n)
            t.rows.push_back({static_cast<double>(idx),
                              static_cast<double>(n), d.probs[n]});
        ++idx;
    }
    return t;
}

std::vector<MeasuredState> load_measurements(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigParseError("cannot open measurements file '" + path + "'");
    std::vector<MeasuredState> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        MeasuredState m;
        if (!(ls >> m.label))
            continue;
        if (!(ls >> m.gain >> m.qber >> m.uncertainty))
            throw ConfigParseError(
                path + ":" + std::to_string(lineno) +
                ": expected '<label> <gain> <qber> <uncertainty>'");
        std::string rest;
        if (ls >> rest)
            throw ConfigParseError(path + ":" + std::to_string(lineno) +
                                   ": trailing token '" + rest + "'");
        rows.push_back(std::move(m));
    }
    if (rows.empty())
        throw ConfigParseError("measurements file '" + path +
                               "' has no entries");
    return rows;
}

OutputTable run_estimate(const ScenarioConfig& cfg,
                         const std::string& measurements_path)
{
    const std::vector<MeasuredState> measured =
        load_measurements(measurements_path);
    std::map<std::string, const MeasuredState*> by_label;
    for (const auto& m : measured) {
        if (!by_label.emplace(m.label, &m).second)
            throw ConfigParseError("measurements file '" + measurements_path +
                                   "': duplicate label '" + m.label + "'");
    }

    const Scenario& sc = cfg.scenario;
    ObservedStatistics obs;
    const SourceStateSpec* signal_spec = nullptr;
    double p1_signal = 0.0;
    double q_s = 0.0, e_s = 0.0;
    const WcsSource* sig_wcs = nullptr;
    const WcsSource* weak_wcs = nullptr;
    double y0 = 0.0, e0 = 0.0, q_nu = 0.0, e_nu = 0.0;
    bool have_vac = false, have_weak = false;

    for (const auto& spec : sc.sources) {
        const auto it = by_label.find(spec.label);
        if (it == by_label.end())
            throw ConfigParseError("measurements file '" + measurements_path +
                                   "' has no row for state '" + spec.label +
                                   "'");
        const MeasuredState& m = *it->second;
        PhotonNumberDistribution d = resolve_source(spec, sc.n_cut);
        if (spec.role == SourceRole::Signal) {
            signal_spec = &spec;
            p1_signal = d.probs[1];
            q_s = m.gain;
            e_s = m.qber;
            sig_wcs = std::get_if<WcsSource>(&spec.params);
        } else if (spec.role == SourceRole::WeakDecoy && !have_weak) {
            have_weak = true;
            q_nu = m.gain;
            e_nu = m.qber;
            weak_wcs = std::get_if<WcsSource>(&spec.params);
        } else if (spec.role == SourceRole::VacuumDecoy && !have_vac) {
            have_vac = true;
            y0 = m.gain;
            e0 = m.qber;
        }
        obs.push_back({spec.label, spec.role, std::move(d), m.gain, m.qber,
                       m.uncertainty});
    }
    for (const auto& m : measured) {
        bool known = false;
        for (const auto& spec : sc.sources)
            known |= spec.label == m.label;
        if (!known)
            throw ConfigParseError("measurements file '" + measurements_path +
                                   "': label '" + m.label +
                                   "' matches no configured state");
    }
    if (!signal_spec)
        throw Error("run_estimate: the config has no signal state");

    BoundResult bounds;
    if (sc.estimator == EstimatorKind::Lp) {
        bounds = solve_bounds_lp(build_lp(obs, sc.n_cut));
    } else {
        if (!sig_wcs || !weak_wcs || !have_weak || !have_vac)
            throw Error("run_estimate: the closed-form estimator needs WCS "
                        "signal and weak-decoy states plus a vacuum state");
        bounds = analytic_bounds_wcs(q_s, e_s, q_nu, e_nu, y0, e0,
                                     sig_wcs->mu, weak_wcs->mu);
    }
    const double rate = key_rate(q_s, e_s, p1_signal, bounds, sc.protocol);

    OutputTable t;
    t.metadata.emplace_back("command", "estimate");
    for (auto& kv : config_metadata(cfg))
        t.metadata.push_back(std::move(kv));
    t.metadata.emplace_back("estimator.diagnostics", bounds.diagnostics);
    t.columns = {"y1_lower", "e1_upper", "q1_lower", "R"};
    t.rows.push_back(
        {bounds.y1_lower, bounds.e1_upper, p1_signal * bounds.y1_lower, rate});
    return t;
}

namespace {

OutputTable figure_preamble(const std::string& id,
                            std::vector<std::pair<std::string, std::string>>
                                params)
{
    OutputTable t;
    t.metadata.emplace_back("command", "reproduce");
    t.metadata.emplace_back("figure", id);
    for (auto& kv : params)
        t.metadata.push_back(std::move(kv));
    return t;
}

std::vector<FigureOutput> figure_source_stats()
{
    constexpr double kPurcell = 20.0;
    constexpr double kNbar = 1.0;
    const std::vector<double> gos = {0.2, 0.3, 0.5, 0.7, 1.0,
                                     1.5, 2.0, 3.0, 5.0, 10.0};
    OutputTable t = figure_preamble(
        "fig1", {{"purcell", format_double(kPurcell)},
                 {"nbar", format_double(kNbar)},
                 {"note", "reflected-channel statistics vs matched Poisson"}});
    t.columns = {"gamma_over_sigma", "p0_2lss", "p1_2lss", "p2plus_2lss",
                 "p0_cs",            "p1_cs",   "p2plus_cs", "mean_2lss",
                 "mandel_q_2lss"};
    EmitterSpec em;
    em.gamma_wg = 1.0;
    em.gamma_loss = 1.0 / kPurcell;
    for (double g : gos) {
        PulseSpec pulse;
        pulse.mean_photons = kNbar;
        pulse.spectral_width = 1.0 / g;
        const PhotonNumberDistribution d = tlss_distribution(em, pulse, 10);
        const PhotonNumberDistribution cs = matched_poisson(d, 10);
        const DistributionStats sd = distribution_stats(d);
        const DistributionStats sc = distribution_stats(cs);
        t.rows.push_back({g, d.probs[0], d.probs[1], sd.multiphoton_mass,
                          cs.probs[0], cs.probs[1], sc.multiphoton_mass,
                          sd.mean, sd.mandel_q});
    }
    return {{"fig1", std::move(t)}};
}

std::vector<FigureOutput> figure_rate_comparison(const std::string& data_dir)
{
    const std::vector<double> grid = linear_grid(0.0, 160.0, 2.0);

    Scenario wcs = wcs_opt_scenario();
    Scenario hsps = hsps_scenario(data_dir);
    Scenario tlss = tlss_scenario(0.5, 20.0);

    const auto wcs_pts = sweep_distance(wcs, grid);
    const auto hsps_pts = sweep_distance(hsps, grid);
    const auto tlss_pts = sweep_distance(tlss, grid);

    OutputTable t = figure_preamble(
        "fig2",
        {{"note", "key rate vs distance: optimized WCS, HSPS tables, "
                  "emitter source (sigma=0.5, purcell=20)"},
         {"data_dir", data_dir}});
    t.columns = {"l_km", "R_wcs", "mu_wcs", "nu_wcs", "R_hsps", "R_2lss"};
    for (size_t i = 0; i < grid.size(); ++i)
        t.rows.push_back({grid[i], wcs_pts[i].rate, wcs_pts[i].mu_signal,
                          wcs_pts[i].nu_decoy, hsps_pts[i].rate,
                          tlss_pts[i].rate});
    return {{"fig2", std::move(t)}};
}

std::vector<FigureOutput> figure_bandwidth_robustness()
{
    const std::vector<double> grid = linear_grid(0.0, 170.0, 2.0);
    const std::vector<double> curve_gos = {0.2, 0.5, 1.0, 2.0};
    const std::vector<double> inset_gos = {0.2, 0.5, 1.0, 2.0, 5.0, 10.0};

    OutputTable curves = figure_preamble(
        "fig3a", {{"purcell", "20"},
                  {"nbar", "1"},
                  {"note", "emitter-source key rate vs distance for several "
                           "pulse bandwidths gamma/sigma"}});
    curves.columns = {"l_km"};
    std::vector<std::vector<KeyRatePoint>> pts;
    for (double g : curve_gos) {
        curves.columns.push_back("R_gos_" + format_double(g));
        pts.push_back(sweep_distance(tlss_scenario(1.0 / g, 20.0), grid));
    }
    for (size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& c : pts)
            row.push_back(c[i].rate);
        curves.rows.push_back(std::move(row));
    }

    OutputTable inset = figure_preamble(
        "fig3a", {{"purcell", "20"},
                  {"nbar", "1"},
                  {"note", "maximal distance vs pulse bandwidth"}});
    inset.columns = {"gamma_over_sigma", "l_max_km"};
    for (double g : inset_gos)
        inset.rows.push_back(
            {g, max_distance(tlss_scenario(1.0 / g, 20.0), 0.1)});

    return {{"fig3a", std::move(curves)}, {"fig3a_lmax", std::move(inset)}};
}

std::vector<FigureOutput> figure_purcell_robustness()
{
    const std::vector<double> grid = linear_grid(0.0, 170.0, 2.0);
    const std::vector<double> purcells = {2.0, 5.0, 10.0, 20.0};

    OutputTable curves = figure_preamble(
        "fig3b", {{"sigma", "0.5"},
                  {"nbar", "1"},
                  {"note", "emitter-source key rate vs distance for several "
                           "Purcell factors"}});
    curves.columns = {"l_km"};
    std::vector<std::vector<KeyRatePoint>> pts;
    for (double p : purcells) {
        curves.columns.push_back("R_purcell_" + format_double(p));
        pts.push_back(sweep_distance(tlss_scenario(0.5, p), grid));
    }
    for (size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& c : pts)
            row.push_back(c[i].rate);
        curves.rows.push_back(std::move(row));
    }

    OutputTable inset = figure_preamble(
        "fig3b", {{"sigma", "0.5"},
                  {"nbar", "1"},
                  {"note", "maximal distance vs Purcell factor"}});
    inset.columns = {"purcell", "l_max_km"};
    for (double p : purcells)
        inset.rows.push_back({p, max_distance(tlss_scenario(0.5, p), 0.1)});

    return {{"fig3b", std::move(curves)}, {"fig3b_lmax", std::move(inset)}};
}

} // namespace

std::vector<FigureOutput> reproduce_figure(const std::string& id,
                                           const std::string& data_dir)
{
    if (id == "fig1")
        return figure_source_stats();
    if (id == "fig2")
        return figure_rate_comparison(data_dir);
    if (id == "fig3a")
        return figure_bandwidth_robustness();
    if (id == "fig3b")
        return figure_purcell_robustness();
    throw DomainError("reproduce_figure: unknown figure '" + id +
                      "'; expected fig1, fig2, fig3a or fig3b");
}

} // namespace wgqkd
