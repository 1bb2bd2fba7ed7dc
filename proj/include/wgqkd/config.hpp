#ifndef WGQKD_CONFIG_HPP
#define WGQKD_CONFIG_HPP

#include <string>
#include <utility>
#include <vector>

#include "wgqkd/keyrate.hpp"
#include "wgqkd/output.hpp"

namespace wgqkd {

// Distance grid and search tolerance for sweep / max-distance runs.
struct SweepSpec {
    double l_start = 0.0;
    double l_stop = 150.0;
    double l_step = 5.0;
    double tol_km = 0.1;

    std::vector<double> grid() const;
};

// A parsed scenario file: flat "key = value" lines with '#' comments and
// dotted key prefixes (channel.*, protocol.*, sweep.*, source.<label>.*).
// `echo` lists every effective key/value after defaults, sorted by key; its
// serialization is the canonical config text and is what gets hashed.
struct ScenarioConfig {
    Scenario scenario;
    SweepSpec sweep;
    std::string output_path;
    std::vector<std::pair<std::string, std::string>> echo;
    std::string hash_hex;
    std::vector<std::string> warnings;
};

// Parses config text; relative source-table paths resolve against base_dir.
// Throws ConfigParseError with line information on unknown keys, malformed
// lines, bad values, or missing table files.
ScenarioConfig parse_config_text(const std::string& text,
                                 const std::string& base_dir);

ScenarioConfig parse_config_file(const std::string& path);

// The canonical "key = value" serialization of the effective config.
std::string canonical_config_text(const ScenarioConfig& config);

// Metadata block for output tables: every effective key as "config: <key>",
// plus the config hash.  config_from_metadata inverts it.
std::vector<std::pair<std::string, std::string>>
config_metadata(const ScenarioConfig& config);

ScenarioConfig config_from_metadata(
    const std::vector<std::pair<std::string, std::string>>& metadata);

} // namespace wgqkd

#endif
