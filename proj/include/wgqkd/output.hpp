#ifndef WGQKD_OUTPUT_HPP
#define WGQKD_OUTPUT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wgqkd {

// A numeric table with ordered "# key = value" metadata lines.  Rendering is
// deterministic: same table, same bytes.
struct OutputTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Shortest round-trippable-enough decimal form ("%.12g"), with negative
// zero normalized to "0".
std::string format_double(double v);

std::string render_csv(const OutputTable& table);

// Writes to the path, or to stdout when the path is empty.
void write_csv(const OutputTable& table, const std::string& path);

// Recovers the metadata key/value pairs from rendered CSV text.
std::vector<std::pair<std::string, std::string>>
parse_csv_metadata(const std::string& text);

// 64-bit FNV-1a, used to fingerprint effective configurations.
std::uint64_t fnv1a(const std::string& text);
std::string fnv1a_hex(const std::string& text);

} // namespace wgqkd

#endif
