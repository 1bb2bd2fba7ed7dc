#ifndef WGQKD_FIGURES_HPP
#define WGQKD_FIGURES_HPP

#include <string>
#include <vector>

#include "wgqkd/config.hpp"
#include "wgqkd/output.hpp"

namespace wgqkd {

// Scenario runners behind the CLI verbs.  Each returns a table whose
// metadata embeds the effective config, so results are self-describing and
// reproducible from their own header.
OutputTable run_sweep(const ScenarioConfig& config);
OutputTable run_max_distance(const ScenarioConfig& config);
OutputTable run_source_stats(const ScenarioConfig& config);
OutputTable run_estimate(const ScenarioConfig& config,
                         const std::string& measurements_path);

// Per-state measured observables for run_estimate: "label gain qber
// uncertainty" lines with '#' comments.
struct MeasuredState {
    std::string label;
    double gain = 0.0;
    double qber = 0.0;
    double uncertainty = 0.0;
};

std::vector<MeasuredState> load_measurements(const std::string& path);

// Canned studies of the emitter-based source against its baselines.  Valid
// ids: fig1 (source statistics vs coherent states), fig2 (key rate vs
// distance for WCS/HSPS/emitter sources), fig3a (emitter rate vs pulse
// bandwidth), fig3b (emitter rate vs Purcell factor).  fig3a/fig3b also
// return a second table with maximal distances.  data_dir locates the
// example HSPS tables used by fig2.
struct FigureOutput {
    std::string name; // output file stem
    OutputTable table;
};

std::vector<FigureOutput> reproduce_figure(const std::string& id,
                                           const std::string& data_dir);

} // namespace wgqkd

#endif
