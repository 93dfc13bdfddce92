#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "levyrisk/allocation.hpp"
#include "levyrisk/cevar.hpp"
#include "levyrisk/errors.hpp"
#include "levyrisk/levy_models.hpp"

namespace levyrisk::cli {

inline constexpr int kSchemaVersion = 1;

enum class Command { evar, cevar, allocate, validate, curve };
enum class Format { json, csv, table };

std::string_view to_string(Command c);
std::string_view to_string(Format f);
Command command_from_string(std::string_view s);
Format format_from_string(std::string_view s);

struct RunConfig {
    Command command = Command::allocate;
    std::string config_path;
    double beta = 0.05;
    double T = 1.0;
    Format format = Format::table;
    std::uint64_t seed = 20240611;
    double tol_stationarity = 1e-10;
    double tol_quad = 1e-9;
    std::size_t paths = 100000;
    std::size_t steps = 1;
    int curve_points = 21;
    std::string out_path;

    bool operator==(const RunConfig&) const = default;
};

/// Everything read from a portfolio file. Names keep the file's ordering.
struct ParsedConfig {
    std::vector<std::string> factor_names;
    std::vector<LevyFactor> factors;
    std::vector<std::string> department_names;
    std::vector<std::vector<double>> exposures;
    std::vector<double> premiums;
    WeightFunction weight = WeightFunction::uniform();
    RunConfig run;

    /// Portfolio at run.beta / run.T. Requires beta < 1.
    FactorPortfolio portfolio() const;

    bool operator==(const ParsedConfig&) const = default;
};

/// Parse failure anchored to a 1-based line of the input (0 when not line-specific).
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Sectioned key-value text: [factors], [matrix], [premiums], optional [weight] and [run].
ParsedConfig parse_config(std::string_view text);
ParsedConfig load_config(const std::string& path);
/// Inverse of parse_config; numbers are written in shortest round-trip form.
std::string serialize_config(const ParsedConfig& config);

/// Re-checks run-level invariants after command-line overrides.
void validate_run(const ParsedConfig& config);

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitParse = 2,
    kExitNonAttainment = 3,
    kExitQuadrature = 4,
    kExitValidation = 5,
};

/// Executes config.run.command and writes the report to `out`; diagnostics go to `err`.
int run(const ParsedConfig& config, std::ostream& out, std::ostream& err);

/// Locale-independent shortest round-trip formatting.
std::string format_number(double v);

}  // namespace levyrisk::cli
