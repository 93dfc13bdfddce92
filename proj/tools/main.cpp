#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
    using namespace levyrisk::cli;

    CLI::App app{"levyrisk: EVaR, CEVaR and Euler capital allocation for Levy factor portfolios"};
    app.option_defaults()->always_capture_default(false);

    std::string config_path;
    std::optional<std::string> command;
    std::optional<double> beta;
    std::optional<double> T;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    std::optional<double> tol_stationarity;
    std::optional<double> tol_quad;
    std::optional<std::size_t> paths;

    app.add_option("--config", config_path, "Portfolio configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--command", command, "evar | cevar | allocate | validate | curve")
        ->check(CLI::IsMember({"evar", "cevar", "allocate", "validate", "curve"}));
    app.add_option("--beta", beta, "Confidence parameter in (0, 1]");
    app.add_option("--T", T, "Horizon T > 0");
    app.add_option("--format", format, "json | csv | table")->check(CLI::IsMember({"json", "csv", "table"}));
    app.add_option("--seed", seed, "Monte Carlo seed (validate)");
    app.add_option("--out", out_path, "Write the report to this file instead of stdout");
    app.add_option("--tol-stationarity", tol_stationarity, "Stationarity residual tolerance");
    app.add_option("--tol-quad", tol_quad, "Relative quadrature tolerance");
    app.add_option("--paths", paths, "Monte Carlo paths (validate)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    ParsedConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return kExitParse;
    }

    RunConfig& run_cfg = config.run;
    if (command) run_cfg.command = command_from_string(*command);
    if (beta) run_cfg.beta = *beta;
    if (T) run_cfg.T = *T;
    if (format) run_cfg.format = format_from_string(*format);
    if (seed) run_cfg.seed = *seed;
    if (out_path) run_cfg.out_path = *out_path;
    if (tol_stationarity) run_cfg.tol_stationarity = *tol_stationarity;
    if (tol_quad) run_cfg.tol_quad = *tol_quad;
    if (paths) run_cfg.paths = *paths;

    return run(config, std::cout, std::cerr);
}
