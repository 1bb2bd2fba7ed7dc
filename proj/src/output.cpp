#include "wgqkd/output.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wgqkd/errors.hpp"

namespace wgqkd {

std::string format_double(double v)
{
    if (v == 0.0)
        return "0"; // fold negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string render_csv(const OutputTable& table)
{
    std::ostringstream out;
    for (const auto& [key, value] : table.metadata)
        out << "# " << key << " = " << value << "\n";
    for (size_t j = 0; j < table.columns.size(); ++j) {
        if (j)
            out << ",";
        out << table.columns[j];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw Error("render_csv: row width does not match the header");
        for (size_t j = 0; j < row.size(); ++j) {
            if (j)
                out << ",";
            out << format_double(row[j]);
        }
        out << "\n";
    }
    return out.str();
}

void write_csv(const OutputTable& table, const std::string& path)
{
    const std::string text = render_csv(table);
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("write_csv: cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw Error("write_csv: short write to '" + path + "'");
}

std::vector<std::pair<std::string, std::string>>
parse_csv_metadata(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> meta;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#')
            break; // metadata is a contiguous leading block
        std::string body = line.substr(1);
        const auto eq = body.find(" = ");
        if (eq == std::string::npos)
            continue;
        std::string key = body.substr(0, eq);
        std::string value = body.substr(eq + 3);
        if (!key.empty() && key.front() == ' ')
            key.erase(0, 1);
        meta.emplace_back(std::move(key), std::move(value));
    }
    return meta;
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a_hex(const std::string& text)
{
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

} // namespace wgqkd
