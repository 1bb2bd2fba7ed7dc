// Command-line front end: scenario files in, deterministic CSV out.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "wgqkd/config.hpp"
#include "wgqkd/errors.hpp"
#include "wgqkd/figures.hpp"
#include "wgqkd/keyrate.hpp"
#include "wgqkd/output.hpp"
#include "wgqkd/scattering.hpp"
#include "wgqkd/sources.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    bool verbose = false;
};

wgqkd::ScenarioConfig load_config(const CommonOpts& opts)
{
    wgqkd::ScenarioConfig cfg = wgqkd::parse_config_file(opts.config_path);
    for (const auto& w : cfg.warnings)
        std::cerr << "warning: " << w << "\n";
    if (opts.verbose) {
        std::cerr << "effective config (hash " << cfg.hash_hex << "):\n";
        for (const auto& [k, v] : cfg.echo)
            std::cerr << "  " << k << " = " << v << "\n";
    }
    return cfg;
}

void emit(const wgqkd::OutputTable& table, const CommonOpts& opts,
          const std::string& config_out_path)
{
    const std::string path =
        !opts.out_path.empty() ? opts.out_path : config_out_path;
    wgqkd::write_csv(table, path);
    if (opts.verbose && !path.empty())
        std::cerr << "wrote " << path << "\n";
}

// Time-resolved hierarchy diagnostics for every emitter-based source.
void dump_traces(const wgqkd::ScenarioConfig& cfg, const std::string& prefix,
                 bool verbose)
{
    for (const auto& spec : cfg.scenario.sources) {
        const auto* tlss = std::get_if<wgqkd::TlssSource>(&spec.params);
        if (!tlss || spec.role == wgqkd::SourceRole::VacuumDecoy)
            continue;
        const wgqkd::SimGrid grid =
            wgqkd::default_grid(tlss->emitter, tlss->pulse);
        const long n_steps = static_cast<long>(
            std::ceil((grid.t_end - grid.t_start) / grid.step));
        const long stride = std::max<long>(1, n_steps / 2000);
        const wgqkd::TimeTrace trace = wgqkd::reflected_hierarchy_trace(
            tlss->emitter, tlss->pulse, grid, stride);

        wgqkd::OutputTable t;
        t.metadata.emplace_back("command", "source-stats --debug-trace");
        t.metadata.emplace_back("state", spec.label);
        t.columns = {"t"};
        for (int n = 0; n < trace.bucket_traces.cols(); ++n)
            t.columns.push_back("trace_n" + std::to_string(n));
        t.columns.push_back("excitation");
        for (size_t i = 0; i < trace.times.size(); ++i) {
            std::vector<double> row{trace.times[i]};
            for (int n = 0; n < trace.bucket_traces.cols(); ++n)
                row.push_back(trace.bucket_traces(static_cast<int>(i), n));
            row.push_back(trace.excitation[i]);
            t.rows.push_back(std::move(row));
        }
        const std::string path = prefix + "_" + spec.label + ".csv";
        wgqkd::write_csv(t, path);
        if (verbose)
            std::cerr << "wrote " << path << "\n";
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Decoy-state QKD rates for waveguide-emitter, coherent and "
                 "heralded single-photon sources"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_flag("--verbose", opts.verbose,
                 "report effective config and progress on stderr");

    auto add_common = [&](CLI::App* sub, bool need_config = true) {
        auto* c = sub->add_option("--config", opts.config_path,
                                  "scenario config file");
        if (need_config)
            c->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_path,
                        "output CSV path (default: config output.path, else "
                        "stdout)");
    };

    auto* stats = app.add_subcommand(
        "source-stats", "photon-number statistics of the configured sources");
    std::string trace_prefix;
    add_common(stats);
    stats->add_option("--debug-trace", trace_prefix,
                      "also dump per-source hierarchy time traces to "
                      "<prefix>_<label>.csv");

    auto* sweep = app.add_subcommand(
        "sweep", "key rate over the configured distance grid");
    add_common(sweep);

    auto* maxd = app.add_subcommand(
        "max-distance", "largest distance with a positive key rate");
    add_common(maxd);

    auto* estimate = app.add_subcommand(
        "estimate", "single-photon bounds and rate from measured "
                    "gains/QBERs");
    add_common(estimate);
    std::string measurements_path;
    estimate
        ->add_option("--measurements", measurements_path,
                     "per-state measurement table")
        ->required()
        ->check(CLI::ExistingFile);

    auto* repro = app.add_subcommand(
        "reproduce", "canned comparison studies (fig1, fig2, fig3a, fig3b)");
    std::string figure_id;
    std::string data_dir = "data";
    std::string out_dir = ".";
    repro->add_option("figure", figure_id, "fig1 | fig2 | fig3a | fig3b")
        ->required();
    repro->add_option("--data-dir", data_dir,
                      "directory with the example HSPS tables");
    repro->add_option("--out", out_dir, "directory for the output CSV files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats->parsed()) {
            const auto cfg = load_config(opts);
            emit(wgqkd::run_source_stats(cfg), opts, cfg.output_path);
            if (!trace_prefix.empty())
                dump_traces(cfg, trace_prefix, opts.verbose);
        } else if (sweep->parsed()) {
            const auto cfg = load_config(opts);
            emit(wgqkd::run_sweep(cfg), opts, cfg.output_path);
        } else if (maxd->parsed()) {
            const auto cfg = load_config(opts);
            emit(wgqkd::run_max_distance(cfg), opts, cfg.output_path);
        } else if (estimate->parsed()) {
            const auto cfg = load_config(opts);
            emit(wgqkd::run_estimate(cfg, measurements_path), opts,
                 cfg.output_path);
        } else if (repro->parsed()) {
            const auto outputs = wgqkd::reproduce_figure(figure_id, data_dir);
            std::filesystem::create_directories(out_dir);
            for (const auto& fo : outputs) {
                const std::string path =
                    (std::filesystem::path(out_dir) / (fo.name + ".csv"))
                        .string();
                wgqkd::write_csv(fo.table, path);
                if (opts.verbose)
                    std::cerr << "wrote " << path << "\n";
            }
        }
    } catch (const wgqkd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
