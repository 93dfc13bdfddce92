#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "cli.hpp"

namespace levyrisk::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double(std::string_view token, std::size_t line, std::string_view what) {
    double v = 0.0;
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    if (!token.empty() && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(line, "invalid number '" + std::string(token) + "' for " + std::string(what));
    }
    return v;
}

std::uint64_t parse_uint(std::string_view token, std::size_t line, std::string_view what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ConfigError(line, "invalid non-negative integer '" + std::string(token) + "' for " + std::string(what));
    }
    return v;
}

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

// Parameter names accepted per kind; the first ones listed are required.
struct KindSpec {
    FactorKind kind;
    std::vector<std::string> required;
    std::vector<std::string> optional;
};

const KindSpec& kind_spec(FactorKind kind) {
    static const std::array<KindSpec, 4> specs{{
        {FactorKind::brownian_with_drift, {"sigma"}, {"mu"}},
        {FactorKind::gamma_subordinator, {"a", "b"}, {"mu"}},
        {FactorKind::alpha_stable_subordinator, {"alpha"}, {"mu"}},
        {FactorKind::compound_poisson_exp, {"lambda", "eta"}, {"mu"}},
    }};
    return specs[static_cast<std::size_t>(kind)];
}

LevyFactor parse_factor(const Entry& e) {
    std::map<std::string, double> params;
    std::optional<FactorKind> kind;
    for (std::string_view tok : split_tokens(e.value)) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(e.line, "factor '" + e.key + "': expected name=value, got '" + std::string(tok) + "'");
        }
        const std::string name(trim(tok.substr(0, eq)));
        const std::string_view value = trim(tok.substr(eq + 1));
        if (name == "kind") {
            try {
                kind = factor_kind_from_string(value);
            } catch (const InvalidArgument& ex) {
                throw ConfigError(e.line, ex.what());
            }
            continue;
        }
        if (params.count(name) != 0) throw ConfigError(e.line, "factor '" + e.key + "': duplicate parameter " + name);
        params[name] = parse_double(value, e.line, "factor '" + e.key + "' parameter " + name);
    }
    if (!kind) throw ConfigError(e.line, "factor '" + e.key + "' has no kind");
    const KindSpec& spec = kind_spec(*kind);
    for (const auto& [name, v] : params) {
        const bool known = std::find(spec.required.begin(), spec.required.end(), name) != spec.required.end() ||
                           std::find(spec.optional.begin(), spec.optional.end(), name) != spec.optional.end();
        if (!known) {
            throw ConfigError(e.line, "factor '" + e.key + "': parameter '" + name + "' is not valid for kind " +
                                          std::string(to_string(*kind)));
        }
    }
    for (const auto& name : spec.required) {
        if (params.count(name) == 0) {
            throw ConfigError(e.line, "factor '" + e.key + "': missing parameter '" + name + "'");
        }
    }
    const double mu = params.count("mu") ? params["mu"] : 0.0;
    try {
        switch (*kind) {
            case FactorKind::brownian_with_drift: return LevyFactor(BrownianWithDrift{mu, params["sigma"]});
            case FactorKind::gamma_subordinator: return LevyFactor(GammaSubordinator{params["a"], params["b"], mu});
            case FactorKind::alpha_stable_subordinator: return LevyFactor(AlphaStableSubordinator{params["alpha"], mu});
            case FactorKind::compound_poisson_exp:
                return LevyFactor(CompoundPoissonExp{params["lambda"], params["eta"], mu});
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& ex) {
        throw ConfigError(e.line, "factor '" + e.key + "': " + ex.what());
    }
    throw ConfigError(e.line, "unreachable factor kind");
}

void apply_run_entry(RunConfig& run, const Entry& e) {
    const std::string_view v = trim(e.value);
    try {
        if (e.key == "command") {
            run.command = command_from_string(v);
        } else if (e.key == "beta") {
            run.beta = parse_double(v, e.line, "beta");
        } else if (e.key == "T") {
            run.T = parse_double(v, e.line, "T");
        } else if (e.key == "format") {
            run.format = format_from_string(v);
        } else if (e.key == "seed") {
            run.seed = parse_uint(v, e.line, "seed");
        } else if (e.key == "tol_stationarity") {
            run.tol_stationarity = parse_double(v, e.line, "tol_stationarity");
        } else if (e.key == "tol_quad") {
            run.tol_quad = parse_double(v, e.line, "tol_quad");
        } else if (e.key == "paths") {
            run.paths = parse_uint(v, e.line, "paths");
        } else if (e.key == "steps") {
            run.steps = parse_uint(v, e.line, "steps");
        } else if (e.key == "curve_points") {
            run.curve_points = static_cast<int>(parse_uint(v, e.line, "curve_points"));
        } else if (e.key == "out") {
            run.out_path = std::string(v);
        } else {
            throw ConfigError(e.line, "unknown [run] key '" + e.key + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& ex) {
        throw ConfigError(e.line, ex.what());
    }
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string_view to_string(Command c) {
    switch (c) {
        case Command::evar: return "evar";
        case Command::cevar: return "cevar";
        case Command::allocate: return "allocate";
        case Command::validate: return "validate";
        case Command::curve: return "curve";
    }
    return "unknown";
}

std::string_view to_string(Format f) {
    switch (f) {
        case Format::json: return "json";
        case Format::csv: return "csv";
        case Format::table: return "table";
    }
    return "unknown";
}

Command command_from_string(std::string_view s) {
    for (Command c : {Command::evar, Command::cevar, Command::allocate, Command::validate, Command::curve}) {
        if (s == to_string(c)) return c;
    }
    throw InvalidArgument("unknown command '" + std::string(s) + "'");
}

Format format_from_string(std::string_view s) {
    for (Format f : {Format::json, Format::csv, Format::table}) {
        if (s == to_string(f)) return f;
    }
    throw InvalidArgument("unknown output format '" + std::string(s) + "'");
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), ptr);
}

FactorPortfolio ParsedConfig::portfolio() const {
    return {exposures, factors, premiums, run.T, run.beta, weight};
}

void validate_run(const ParsedConfig& config) {
    const RunConfig& run = config.run;
    if (!(run.beta > 0.0 && run.beta <= 1.0)) {
        throw ConfigError(0, "beta must lie in (0, 1] (got " + format_number(run.beta) + ")");
    }
    if (!(run.T > 0.0)) throw ConfigError(0, "T must be > 0 (got " + format_number(run.T) + ")");
    if (!(run.tol_stationarity > 0.0)) throw ConfigError(0, "tol_stationarity must be > 0");
    if (!(run.tol_quad > 0.0)) throw ConfigError(0, "tol_quad must be > 0");
    if (run.paths < 1 || run.steps < 1) throw ConfigError(0, "paths and steps must be >= 1");
    if (run.curve_points < 2) throw ConfigError(0, "curve_points must be >= 2");
    try {
        config.weight.check_normalized(run.T);
    } catch (const InvalidArgument& ex) {
        throw ConfigError(0, ex.what());
    }
}

ParsedConfig parse_config(std::string_view text) {
    static const std::set<std::string> kSections{"factors", "matrix", "premiums", "weight", "run"};
    std::map<std::string, std::vector<Entry>> sections;
    std::map<std::string, std::size_t> section_line;
    std::string current;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto hash = raw.find_first_of("#;");
        std::string_view line = trim(raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (kSections.count(current) == 0) throw ConfigError(line_no, "unknown section [" + current + "]");
            if (section_line.count(current) != 0) throw ConfigError(line_no, "duplicate section [" + current + "]");
            section_line[current] = line_no;
            sections[current];
            continue;
        }
        if (current.empty()) throw ConfigError(line_no, "entry outside of any section");
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        Entry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
        if (e.key.empty()) throw ConfigError(line_no, "empty key");
        for (const Entry& prev : sections[current]) {
            if (prev.key == e.key) {
                throw ConfigError(line_no, "duplicate key '" + e.key + "' in [" + current + "] (first on line " +
                                               std::to_string(prev.line) + ")");
            }
        }
        sections[current].push_back(std::move(e));
    }

    auto require_section = [&](const char* name) {
        if (sections.count(name) == 0 || sections[name].empty()) {
            throw ConfigError(0, std::string("missing or empty section [") + name + "]");
        }
    };

    ParsedConfig cfg;
    require_section("factors");
    for (const Entry& e : sections["factors"]) {
        cfg.factor_names.push_back(e.key);
        cfg.factors.push_back(parse_factor(e));
    }
    const std::size_t m = cfg.factors.size();
    require_section("matrix");

    for (const Entry& e : sections["matrix"]) {
        std::vector<double> row;
        for (std::string_view tok : split_tokens(e.value)) {
            const double a = parse_double(tok, e.line, "exposure of department '" + e.key + "'");
            if (a < 0.0) {
                throw ConfigError(e.line, "negative exposure " + std::string(tok) + " for department '" + e.key + "'");
            }
            row.push_back(a);
        }
        if (row.size() != m) {
            throw ConfigError(e.line, "dimension mismatch: department '" + e.key + "' has " +
                                          std::to_string(row.size()) + " exposures but [factors] declares " +
                                          std::to_string(m) + " factors");
        }
        cfg.department_names.push_back(e.key);
        cfg.exposures.push_back(std::move(row));
    }
    const std::size_t n = cfg.exposures.size();

    require_section("premiums");
    const auto& prem = sections["premiums"];
    if (prem.size() != n) {
        throw ConfigError(section_line["premiums"], "dimension mismatch: [matrix] has " + std::to_string(n) +
                                                        " rows but [premiums] has " + std::to_string(prem.size()) +
                                                        " entries");
    }
    cfg.premiums.assign(n, 0.0);
    for (const Entry& e : prem) {
        const auto it = std::find(cfg.department_names.begin(), cfg.department_names.end(), e.key);
        if (it == cfg.department_names.end()) {
            throw ConfigError(e.line, "premium for unknown department '" + e.key + "'");
        }
        const double c = parse_double(trim(e.value), e.line, "premium of '" + e.key + "'");
        if (c < 0.0) throw ConfigError(e.line, "premium of '" + e.key + "' must be >= 0");
        cfg.premiums[static_cast<std::size_t>(it - cfg.department_names.begin())] = c;
    }

    for (std::size_t j = 0; j < m; ++j) {
        double col = 0.0;
        for (const auto& row : cfg.exposures) col += row[j];
        if (!(col > 0.0)) {
            throw ConfigError(section_line["matrix"], "factor '" + cfg.factor_names[j] +
                                                          "' has zero total exposure (unused factor)");
        }
    }

    if (sections.count("weight") != 0) {
        std::string kind = "uniform";
        std::optional<Entry> knots;
        for (const Entry& e : sections["weight"]) {
            if (e.key == "kind") {
                kind = e.value;
            } else if (e.key == "knots") {
                knots = e;
            } else {
                throw ConfigError(e.line, "unknown [weight] key '" + e.key + "'");
            }
        }
        if (kind == "table") {
            if (!knots) throw ConfigError(section_line["weight"], "table weight requires 'knots'");
            std::vector<std::pair<double, double>> pts;
            for (std::string_view tok : split_tokens(knots->value)) {
                const auto colon = tok.find(':');
                if (colon == std::string_view::npos) {
                    throw ConfigError(knots->line, "weight knot '" + std::string(tok) + "' must be t:w");
                }
                pts.emplace_back(parse_double(tok.substr(0, colon), knots->line, "knot time"),
                                 parse_double(tok.substr(colon + 1), knots->line, "knot weight"));
            }
            try {
                cfg.weight = WeightFunction::table(std::move(pts));
            } catch (const InvalidArgument& ex) {
                throw ConfigError(knots->line, ex.what());
            }
        } else if (kind != "uniform") {
            throw ConfigError(section_line["weight"], "unknown weight kind '" + kind + "'");
        }
    }

    if (sections.count("run") != 0) {
        for (const Entry& e : sections["run"]) apply_run_entry(cfg.run, e);
        if (!(cfg.run.beta > 0.0 && cfg.run.beta <= 1.0)) {
            for (const Entry& e : sections["run"]) {
                if (e.key == "beta") throw ConfigError(e.line, "beta must lie in (0, 1] (got " + e.value + ")");
            }
        }
        if (!(cfg.run.T > 0.0)) {
            for (const Entry& e : sections["run"]) {
                if (e.key == "T") throw ConfigError(e.line, "T must be > 0 (got " + e.value + ")");
            }
        }
    }
    validate_run(cfg);
    if (cfg.run.beta < 1.0) {
        try {
            (void)cfg.portfolio();
        } catch (const InvalidArgument& ex) {
            throw ConfigError(0, ex.what());
        }
    }
    return cfg;
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    ParsedConfig cfg = parse_config(buf.str());
    cfg.run.config_path = path;
    return cfg;
}

std::string serialize_config(const ParsedConfig& config) {
    std::ostringstream os;
    os << "[factors]\n";
    for (std::size_t j = 0; j < config.factors.size(); ++j) {
        os << config.factor_names[j] << " = kind=" << to_string(config.factors[j].kind());
        std::visit(
            [&os](const auto& m) {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, BrownianWithDrift>) {
                    os << " mu=" << format_number(m.mu) << " sigma=" << format_number(m.sigma);
                } else if constexpr (std::is_same_v<M, GammaSubordinator>) {
                    os << " a=" << format_number(m.a) << " b=" << format_number(m.b) << " mu=" << format_number(m.mu);
                } else if constexpr (std::is_same_v<M, AlphaStableSubordinator>) {
                    os << " alpha=" << format_number(m.alpha) << " mu=" << format_number(m.mu);
                } else {
                    os << " lambda=" << format_number(m.lambda) << " eta=" << format_number(m.eta)
                       << " mu=" << format_number(m.mu);
                }
            },
            config.factors[j].model());
        os << '\n';
    }
    os << "\n[matrix]\n";
    for (std::size_t i = 0; i < config.exposures.size(); ++i) {
        os << config.department_names[i] << " =";
        for (double a : config.exposures[i]) os << ' ' << format_number(a);
        os << '\n';
    }
    os << "\n[premiums]\n";
    for (std::size_t i = 0; i < config.premiums.size(); ++i) {
        os << config.department_names[i] << " = " << format_number(config.premiums[i]) << '\n';
    }
    os << "\n[weight]\n";
    if (config.weight.kind() == WeightFunction::Kind::uniform) {
        os << "kind = uniform\n";
    } else {
        os << "kind = table\nknots =";
        for (const auto& [t, w] : config.weight.knots()) os << ' ' << format_number(t) << ':' << format_number(w);
        os << '\n';
    }
    const RunConfig& r = config.run;
    os << "\n[run]\n"
       << "command = " << to_string(r.command) << '\n'
       << "beta = " << format_number(r.beta) << '\n'
       << "T = " << format_number(r.T) << '\n'
       << "format = " << to_string(r.format) << '\n'
       << "seed = " << r.seed << '\n'
       << "tol_stationarity = " << format_number(r.tol_stationarity) << '\n'
       << "tol_quad = " << format_number(r.tol_quad) << '\n'
       << "paths = " << r.paths << '\n'
       << "steps = " << r.steps << '\n'
       << "curve_points = " << r.curve_points << '\n';
    if (!r.out_path.empty()) os << "out = " << r.out_path << '\n';
    return os.str();
}

}  // namespace levyrisk::cli
