#include "wgqkd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "wgqkd/errors.hpp"

namespace wgqkd {

namespace {

std::string trim(const std::string& s)
{
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

struct RawConfig {
    std::string name; // for error messages
    std::map<std::string, std::string> values;
    std::map<std::string, long> lines;
    std::vector<std::string> order;
    mutable std::map<std::string, bool> consumed;

    [[noreturn]] void fail(const std::string& key,
                           const std::string& msg) const
    {
        const auto it = lines.find(key);
        const std::string loc =
            it == lines.end() ? name : name + ":" + std::to_string(it->second);
        throw ConfigParseError(loc + ": key '" + key + "': " + msg);
    }

    const std::string* find(const std::string& key) const
    {
        const auto it = values.find(key);
        if (it == values.end())
            return nullptr;
        consumed[key] = true;
        return &it->second;
    }

    double number(const std::string& key, double fallback) const
    {
        const std::string* v = find(key);
        if (!v)
            return fallback;
        char* end = nullptr;
        const double r = std::strtod(v->c_str(), &end);
        if (end == v->c_str() || *end != '\0')
            fail(key, "expected a number, got '" + *v + "'");
        return r;
    }

    double required_number(const std::string& key) const
    {
        if (!values.count(key))
            throw ConfigParseError(name + ": missing required key '" + key +
                                   "'");
        return number(key, 0.0);
    }

    long integer(const std::string& key, long fallback) const
    {
        const std::string* v = find(key);
        if (!v)
            return fallback;
        char* end = nullptr;
        const long r = std::strtol(v->c_str(), &end, 10);
        if (end == v->c_str() || *end != '\0')
            fail(key, "expected an integer, got '" + *v + "'");
        return r;
    }

    bool boolean(const std::string& key, bool fallback) const
    {
        const std::string* v = find(key);
        if (!v)
            return fallback;
        if (*v == "true")
            return true;
        if (*v == "false")
            return false;
        fail(key, "expected true or false, got '" + *v + "'");
    }

    std::string text(const std::string& key, std::string fallback) const
    {
        const std::string* v = find(key);
        return v ? *v : fallback;
    }
};

RawConfig tokenize(const std::string& text, const std::string& name)
{
    RawConfig raw;
    raw.name = name;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty())
            continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError(name + ":" + std::to_string(lineno) +
                                   ": expected 'key = value', got '" +
                                   stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigParseError(name + ":" + std::to_string(lineno) +
                                   ": empty key");
        if (raw.values.count(key))
            throw ConfigParseError(name + ":" + std::to_string(lineno) +
                                   ": duplicate key '" + key + "'");
        raw.values[key] = value;
        raw.lines[key] = lineno;
        raw.order.push_back(key);
    }
    return raw;
}

SourceRole parse_role(const RawConfig& raw, const std::string& key,
                      const std::string& value)
{
    if (value == "signal")
        return SourceRole::Signal;
    if (value == "weak-decoy")
        return SourceRole::WeakDecoy;
    if (value == "vacuum-decoy")
        return SourceRole::VacuumDecoy;
    raw.fail(key, "expected signal, weak-decoy or vacuum-decoy, got '" +
                      value + "'");
}

bool valid_label(const std::string& label)
{
    if (label.empty())
        return false;
    return std::all_of(label.begin(), label.end(), [](unsigned char ch) {
        return std::isalnum(ch) || ch == '-' || ch == '_';
    });
}

SourceStateSpec parse_source(const RawConfig& raw, const std::string& label,
                             const std::string& base_dir, bool optimize_wcs)
{
    const std::string prefix = "source." + label + ".";
    SourceStateSpec spec;
    spec.label = label;

    const std::string* role = raw.find(prefix + "role");
    if (!role)
        throw ConfigParseError(raw.name + ": missing required key '" +
                               prefix + "role'");
    spec.role = parse_role(raw, prefix + "role", *role);

    std::string kind = raw.text(prefix + "kind", "");
    if (kind.empty()) {
        if (spec.role != SourceRole::VacuumDecoy)
            throw ConfigParseError(raw.name + ": missing required key '" +
                                   prefix + "kind'");
        kind = "vacuum";
    }

    if (spec.role == SourceRole::VacuumDecoy) {
        // A vacuum decoy is the exact vacuum no matter how it is labeled;
        // kind-specific keys are accepted and ignored.
        raw.text(prefix + "mu", "");
        raw.text(prefix + "file", "");
        raw.text(prefix + "nbar", "");
        raw.text(prefix + "sigma", "");
        raw.text(prefix + "purcell", "");
        spec.params = VacuumSource{};
        return spec;
    }

    if (kind == "wcs") {
        WcsSource w;
        const bool optimized = optimize_wcs &&
                               (spec.role == SourceRole::Signal ||
                                spec.role == SourceRole::WeakDecoy);
        if (!raw.values.count(prefix + "mu") && !optimized)
            throw ConfigParseError(raw.name + ": missing required key '" +
                                   prefix + "mu'");
        w.mu = raw.number(prefix + "mu",
                          spec.role == SourceRole::Signal ? 0.1 : 0.05);
        if (!(w.mu >= 0.0))
            raw.fail(prefix + "mu", "must be >= 0");
        spec.params = w;
    } else if (kind == "hsps-table") {
        TableSource t;
        const std::string* file = raw.find(prefix + "file");
        if (!file)
            throw ConfigParseError(raw.name + ": missing required key '" +
                                   prefix + "file'");
        std::filesystem::path p(*file);
        if (p.is_relative())
            p = std::filesystem::path(base_dir) / p;
        p = std::filesystem::absolute(p).lexically_normal();
        if (!std::filesystem::exists(p))
            raw.fail(prefix + "file",
                     "table file '" + p.string() + "' does not exist");
        t.path = p.string();
        spec.params = t;
    } else if (kind == "tlss") {
        TlssSource t;
        t.pulse.mean_photons = raw.required_number(prefix + "nbar");
        t.pulse.spectral_width = raw.required_number(prefix + "sigma");
        const double purcell =
            raw.number(prefix + "purcell",
                       std::numeric_limits<double>::infinity());
        if (!(purcell > 0.0))
            raw.fail(prefix + "purcell", "must be > 0");
        t.emitter.gamma_wg = 1.0;
        t.emitter.gamma_loss = 1.0 / purcell;
        t.emitter.validate();
        t.pulse.validate();
        spec.params = t;
    } else if (kind == "vacuum") {
        throw ConfigParseError(raw.name + ": source '" + label +
                               "' has kind vacuum but role " +
                               to_string(spec.role));
    } else {
        raw.fail(prefix + "kind",
                 "expected wcs, hsps-table or tlss, got '" + kind + "'");
    }
    return spec;
}

void append_source_echo(std::vector<std::pair<std::string, std::string>>& echo,
                        const SourceStateSpec& spec)
{
    const std::string prefix = "source." + spec.label + ".";
    echo.emplace_back(prefix + "role", to_string(spec.role));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, WcsSource>) {
                echo.emplace_back(prefix + "kind", "wcs");
                echo.emplace_back(prefix + "mu", format_double(p.mu));
            } else if constexpr (std::is_same_v<T, TableSource>) {
                echo.emplace_back(prefix + "kind", "hsps-table");
                echo.emplace_back(prefix + "file", p.path);
            } else if constexpr (std::is_same_v<T, TlssSource>) {
                echo.emplace_back(prefix + "kind", "tlss");
                echo.emplace_back(prefix + "nbar",
                                  format_double(p.pulse.mean_photons));
                echo.emplace_back(prefix + "sigma",
                                  format_double(p.pulse.spectral_width));
                echo.emplace_back(prefix + "purcell",
                                  format_double(p.emitter.purcell()));
            } else {
                echo.emplace_back(prefix + "kind", "vacuum");
            }
        },
        spec.params);
}

} // namespace

std::vector<double> SweepSpec::grid() const
{
    if (!(l_step > 0.0))
        throw DomainError("sweep: l_step must be positive");
    if (!(l_start >= 0.0) || !(l_stop >= l_start))
        throw DomainError("sweep: need 0 <= l_start <= l_stop");
    std::vector<double> g;
    for (int k = 0;; ++k) {
        const double l = l_start + k * l_step;
        if (l > l_stop + 1e-9)
            break;
        g.push_back(l);
    }
    return g;
}

ScenarioConfig parse_config_text(const std::string& text,
                                 const std::string& base_dir)
{
    const RawConfig raw = tokenize(text, "config");
    ScenarioConfig cfg;

    ChannelParams& ch = cfg.scenario.channel;
    ch.alpha_db_per_km = raw.number("channel.alpha_db_per_km",
                                    ch.alpha_db_per_km);
    ch.eta_bob = raw.number("channel.eta_bob", ch.eta_bob);
    ch.y0 = raw.number("channel.y0", ch.y0);
    ch.e0 = raw.number("channel.e0", ch.e0);
    ch.ed = raw.number("channel.ed", ch.ed);
    try {
        ch.validate();
    } catch (const Error& e) {
        throw ConfigParseError(raw.name + ": " + e.what());
    }

    ProtocolParams& pr = cfg.scenario.protocol;
    pr.q = raw.number("protocol.q", pr.q);
    pr.f = raw.number("protocol.f", pr.f);
    try {
        pr.validate();
    } catch (const Error& e) {
        throw ConfigParseError(raw.name + ": " + e.what());
    }

    const std::string est = raw.text("estimator", "lp");
    if (est == "lp")
        cfg.scenario.estimator = EstimatorKind::Lp;
    else if (est == "analytic")
        cfg.scenario.estimator = EstimatorKind::Analytic;
    else
        raw.fail("estimator", "expected lp or analytic, got '" + est + "'");

    const long n_cut = raw.integer("estimator.n_cut", 10);
    if (n_cut < 1 || n_cut > 64)
        raw.fail("estimator.n_cut", "must be in [1, 64]");
    cfg.scenario.n_cut = static_cast<int>(n_cut);

    cfg.scenario.optimize_wcs = raw.boolean("optimize_wcs", false);

    cfg.sweep.l_start = raw.number("sweep.l_start", cfg.sweep.l_start);
    cfg.sweep.l_stop = raw.number("sweep.l_stop", cfg.sweep.l_stop);
    cfg.sweep.l_step = raw.number("sweep.l_step", cfg.sweep.l_step);
    cfg.sweep.tol_km = raw.number("sweep.tol_km", cfg.sweep.tol_km);
    if (!(cfg.sweep.l_step > 0.0))
        raw.fail("sweep.l_step", "must be > 0");
    if (!(cfg.sweep.l_start >= 0.0))
        raw.fail("sweep.l_start", "must be >= 0");
    if (!(cfg.sweep.l_stop >= cfg.sweep.l_start))
        raw.fail("sweep.l_stop", "must be >= sweep.l_start");
    if (!(cfg.sweep.tol_km > 0.0))
        raw.fail("sweep.tol_km", "must be > 0");

    cfg.output_path = raw.text("output.path", "");

    // Sources, in first-appearance order.
    std::vector<std::string> labels;
    for (const auto& key : raw.order) {
        if (key.rfind("source.", 0) != 0)
            continue;
        const auto rest = key.substr(7);
        const auto dot = rest.find('.');
        if (dot == std::string::npos)
            raw.fail(key, "expected source.<label>.<field>");
        const std::string label = rest.substr(0, dot);
        if (!valid_label(label))
            raw.fail(key, "source label '" + label +
                              "' may only contain letters, digits, '-', '_'");
        if (std::find(labels.begin(), labels.end(), label) == labels.end())
            labels.push_back(label);
    }
    if (labels.empty())
        throw ConfigParseError(raw.name + ": no source states declared");

    int signals = 0;
    bool has_vacuum = false;
    for (const auto& label : labels) {
        SourceStateSpec spec =
            parse_source(raw, label, base_dir, cfg.scenario.optimize_wcs);
        signals += spec.role == SourceRole::Signal;
        has_vacuum |= spec.role == SourceRole::VacuumDecoy;
        cfg.scenario.sources.push_back(std::move(spec));
    }
    if (signals != 1)
        throw ConfigParseError(raw.name + ": exactly one source must have "
                               "role signal, found " +
                               std::to_string(signals));
    if (!has_vacuum) {
        for (const auto& s : cfg.scenario.sources)
            if (s.label == "vacuum")
                throw ConfigParseError(
                    raw.name + ": cannot inject a vacuum state because the "
                    "label 'vacuum' is already taken");
        SourceStateSpec vac;
        vac.label = "vacuum";
        vac.role = SourceRole::VacuumDecoy;
        vac.params = VacuumSource{};
        cfg.scenario.sources.push_back(std::move(vac));
        cfg.warnings.push_back("no vacuum-decoy state declared; adding the "
                               "exact vacuum state 'vacuum'");
    }

    for (const auto& key : raw.order)
        if (!raw.consumed[key])
            raw.fail(key, "unknown key");

    // Canonical echo of every effective setting, sorted by key.
    auto& echo = cfg.echo;
    echo.emplace_back("channel.alpha_db_per_km",
                      format_double(ch.alpha_db_per_km));
    echo.emplace_back("channel.e0", format_double(ch.e0));
    echo.emplace_back("channel.ed", format_double(ch.ed));
    echo.emplace_back("channel.eta_bob", format_double(ch.eta_bob));
    echo.emplace_back("channel.y0", format_double(ch.y0));
    echo.emplace_back("estimator", est);
    echo.emplace_back("estimator.n_cut", std::to_string(cfg.scenario.n_cut));
    echo.emplace_back("optimize_wcs",
                      cfg.scenario.optimize_wcs ? "true" : "false");
    if (!cfg.output_path.empty())
        echo.emplace_back("output.path", cfg.output_path);
    echo.emplace_back("protocol.f", format_double(pr.f));
    echo.emplace_back("protocol.q", format_double(pr.q));
    for (const auto& spec : cfg.scenario.sources)
        append_source_echo(echo, spec);
    echo.emplace_back("sweep.l_start", format_double(cfg.sweep.l_start));
    echo.emplace_back("sweep.l_step", format_double(cfg.sweep.l_step));
    echo.emplace_back("sweep.l_stop", format_double(cfg.sweep.l_stop));
    echo.emplace_back("sweep.tol_km", format_double(cfg.sweep.tol_km));
    std::sort(echo.begin(), echo.end());

    cfg.hash_hex = fnv1a_hex(canonical_config_text(cfg));
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigParseError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string base =
        std::filesystem::path(path).parent_path().string();
    try {
        return parse_config_text(buf.str(), base.empty() ? "." : base);
    } catch (const ConfigParseError& e) {
        std::string msg = e.what();
        if (msg.rfind("config", 0) == 0)
            msg = path + msg.substr(6);
        throw ConfigParseError(msg);
    }
}

std::string canonical_config_text(const ScenarioConfig& config)
{
    std::string out;
    for (const auto& [key, value] : config.echo) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    }
    return out;
}

std::vector<std::pair<std::string, std::string>>
config_metadata(const ScenarioConfig& config)
{
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("config_hash", config.hash_hex);
    for (const auto& [key, value] : config.echo)
        meta.emplace_back("config: " + key, value);
    return meta;
}

ScenarioConfig config_from_metadata(
    const std::vector<std::pair<std::string, std::string>>& metadata)
{
    std::string text;
    for (const auto& [key, value] : metadata) {
        if (key.rfind("config: ", 0) == 0) {
            text += key.substr(8);
            text += " = ";
            text += value;
            text += "\n";
        }
    }
    if (text.empty())
        throw ConfigParseError(
            "config_from_metadata: no embedded config found");
    return parse_config_text(text, ".");
}

} // namespace wgqkd
