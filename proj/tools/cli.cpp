#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "levyrisk/montecarlo.hpp"

namespace levyrisk::cli {

namespace {

using nlohmann::json;

// Plain-text table with right-aligned numeric columns.
class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& os) const {
        std::vector<std::size_t> width(header_.size(), 0);
        for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
        for (const auto& r : rows_) {
            for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
        }
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t c = 0; c < width.size(); ++c) {
                const std::string& cell = c < r.size() ? r[c] : std::string();
                if (c == 0) {
                    os << std::left << std::setw(static_cast<int>(width[c])) << cell;
                } else {
                    os << "  " << std::right << std::setw(static_cast<int>(width[c])) << cell;
                }
            }
            os << '\n';
        };
        line(header_);
        std::size_t total = 0;
        for (std::size_t w : width) total += w;
        os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
        for (const auto& r : rows_) line(r);
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json base_report(const ParsedConfig& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = std::string(to_string(config.run.command));
    j["beta"] = config.run.beta;
    j["T"] = config.run.T;
    return j;
}

EvarOptions evar_options(const RunConfig& run) {
    EvarOptions o;
    o.stationarity_tol = run.tol_stationarity;
    return o;
}

QuadratureOptions quad_options(const RunConfig& run) {
    QuadratureOptions q;
    q.rel_tol = run.tol_quad;
    return q;
}

std::vector<double> uniform_grid(double T, int points) {
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = T * k / (points - 1);
    grid.back() = T;
    return grid;
}

// Claims combination for every department, ignoring the beta < 1 restriction of FactorPortfolio.
std::vector<FactorCombination> department_combinations(const ParsedConfig& config) {
    std::vector<FactorCombination> out;
    for (const auto& row : config.exposures) out.emplace_back(config.factors, row);
    return out;
}

FactorCombination aggregate_combination(const ParsedConfig& config) {
    std::vector<double> D(config.factors.size(), 0.0);
    for (const auto& row : config.exposures) {
        for (std::size_t j = 0; j < D.size(); ++j) D[j] += row[j];
    }
    return {config.factors, D};
}

double premium_sum(const ParsedConfig& config) {
    return std::accumulate(config.premiums.begin(), config.premiums.end(), 0.0);
}

void report_evar(const ParsedConfig& config, std::ostream& out) {
    const RunConfig& run = config.run;
    const EvarOptions opts = evar_options(run);
    const EvarResult agg = evar({aggregate_combination(config), run.T, run.beta}, opts);
    const double net = agg.value + premium_sum(config) * run.T;
    std::vector<EvarResult> depts;
    for (const auto& combo : department_combinations(config)) depts.push_back(evar({combo, run.T, run.beta}, opts));

    switch (run.format) {
        case Format::json: {
            json j = base_report(config);
            auto entry = [](const EvarResult& r) {
                return json{{"evar", r.value},
                            {"s_star", opt_json(r.s_star)},
                            {"attained", std::string(to_string(r.attained))},
                            {"residual", r.residual},
                            {"iterations", r.iterations}};
            };
            j["aggregate"] = entry(agg);
            j["aggregate_net"] = net;
            json d = json::array();
            for (std::size_t i = 0; i < depts.size(); ++i) {
                json e = entry(depts[i]);
                e["name"] = config.department_names[i];
                d.push_back(std::move(e));
            }
            j["departments"] = std::move(d);
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: {
            out << "position,evar,s_star,attained\n";
            auto row = [&out](const std::string& name, const EvarResult& r) {
                out << name << ',' << format_number(r.value) << ',' << opt_number(r.s_star) << ','
                    << to_string(r.attained) << '\n';
            };
            row("aggregate", agg);
            out << "aggregate_net," << format_number(net) << ",,\n";
            for (std::size_t i = 0; i < depts.size(); ++i) row(config.department_names[i], depts[i]);
            break;
        }
        case Format::table: {
            out << "EVaR at T = " << format_number(run.T) << ", beta = " << format_number(run.beta) << "\n\n";
            Table t({"position", "evar", "s_star", "attained"});
            t.add({"aggregate", format_number(agg.value), opt_number(agg.s_star), std::string(to_string(agg.attained))});
            t.add({"aggregate_net", format_number(net), "", ""});
            for (std::size_t i = 0; i < depts.size(); ++i) {
                t.add({config.department_names[i], format_number(depts[i].value), opt_number(depts[i].s_star),
                       std::string(to_string(depts[i].attained))});
            }
            t.print(out);
            break;
        }
    }
}

void report_cevar(const ParsedConfig& config, std::ostream& out) {
    const RunConfig& run = config.run;
    CevarOptions opts{evar_options(run), quad_options(run)};
    auto query = [&](const FactorCombination& combo) { return CevarQuery{combo, run.T, run.beta, config.weight, 0.0}; };
    const double agg = cevar(query(aggregate_combination(config)), opts);
    const double moment = config.weight.time_moment(run.T);
    const double net = agg + premium_sum(config) * moment;
    std::vector<double> depts;
    for (const auto& combo : department_combinations(config)) depts.push_back(cevar(query(combo), opts));

    switch (run.format) {
        case Format::json: {
            json j = base_report(config);
            j["aggregate"] = agg;
            j["premium_moment"] = moment;
            j["aggregate_net"] = net;
            json d = json::array();
            for (std::size_t i = 0; i < depts.size(); ++i) {
                d.push_back({{"name", config.department_names[i]}, {"cevar", depts[i]}});
            }
            j["departments"] = std::move(d);
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: {
            out << "position,cevar\n";
            out << "aggregate," << format_number(agg) << '\n';
            out << "aggregate_net," << format_number(net) << '\n';
            for (std::size_t i = 0; i < depts.size(); ++i) {
                out << config.department_names[i] << ',' << format_number(depts[i]) << '\n';
            }
            break;
        }
        case Format::table: {
            out << "CEVaR over [0, " << format_number(run.T) << "], beta = " << format_number(run.beta) << "\n\n";
            Table t({"position", "cevar"});
            t.add({"aggregate", format_number(agg)});
            t.add({"aggregate_net", format_number(net)});
            for (std::size_t i = 0; i < depts.size(); ++i) t.add({config.department_names[i], format_number(depts[i])});
            t.print(out);
            break;
        }
    }
}

void write_curve_csv(const ParsedConfig& config, const std::vector<AllocationPoint>& curve, std::ostream& out) {
    out << "t,s_star";
    for (std::size_t i = 1; i <= config.exposures.size(); ++i) out << ",K_" << i;
    out << '\n';
    for (const auto& p : curve) {
        out << format_number(p.t) << ',' << opt_number(p.s_star);
        for (double k : p.K) out << ',' << format_number(k);
        out << '\n';
    }
}

json curve_json(const std::vector<AllocationPoint>& curve) {
    json arr = json::array();
    for (const auto& p : curve) arr.push_back({{"t", p.t}, {"s_star", opt_json(p.s_star)}, {"K", p.K}});
    return arr;
}

void print_curve_table(const ParsedConfig& config, const std::vector<AllocationPoint>& curve, std::ostream& out) {
    std::vector<std::string> header{"t", "s_star"};
    for (const auto& name : config.department_names) header.push_back("K[" + name + "]");
    Table t(std::move(header));
    for (const auto& p : curve) {
        std::vector<std::string> row{format_number(p.t), opt_number(p.s_star)};
        for (double k : p.K) row.push_back(format_number(k));
        t.add(std::move(row));
    }
    t.print(out);
}

AllocationReport run_allocation(const ParsedConfig& config) {
    AllocationOptions opts;
    opts.evar = evar_options(config.run);
    opts.quadrature = quad_options(config.run);
    opts.curve_points = config.run.curve_points;
    return allocate(config.portfolio(), opts);
}

void report_allocate(const ParsedConfig& config, std::ostream& out) {
    const AllocationReport rep = run_allocation(config);
    const double sum_L = std::accumulate(rep.L.begin(), rep.L.end(), 0.0);
    switch (config.run.format) {
        case Format::json: {
            json j = base_report(config);
            json L = json::array();
            for (std::size_t i = 0; i < rep.L.size(); ++i) {
                L.push_back({{"name", config.department_names[i]}, {"L", rep.L[i]}});
            }
            j["L"] = rep.L;
            j["departments"] = std::move(L);
            j["sum_L"] = sum_L;
            j["claims_cevar"] = rep.claims_cevar;
            j["premium_moment"] = rep.premium_moment;
            j["total_cevar"] = rep.total_cevar;
            j["full_allocation_gap"] = rep.full_allocation_gap;
            j["quadrature_evaluations"] = rep.quadrature_evaluations;
            j["K_curve"] = curve_json(rep.K_curve);
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: write_curve_csv(config, rep.K_curve, out); break;
        case Format::table: {
            out << "Allocation over [0, " << format_number(config.run.T) << "], beta = "
                << format_number(config.run.beta) << "\n\n";
            Table t({"department", "L"});
            for (std::size_t i = 0; i < rep.L.size(); ++i) t.add({config.department_names[i], format_number(rep.L[i])});
            t.add({"sum", format_number(sum_L)});
            t.print(out);
            out << "\nclaims CEVaR         " << format_number(rep.claims_cevar) << '\n'
                << "premium moment       " << format_number(rep.premium_moment) << '\n'
                << "total CEVaR          " << format_number(rep.total_cevar) << '\n'
                << "full allocation gap  " << format_number(rep.full_allocation_gap) << "\n\n";
            print_curve_table(config, rep.K_curve, out);
            break;
        }
    }
}

void report_curve(const ParsedConfig& config, std::ostream& out) {
    const RunConfig& run = config.run;
    const FactorPortfolio portfolio = config.portfolio();
    const EvarOptions opts = evar_options(run);
    std::vector<AllocationPoint> curve;
    for (double t : uniform_grid(run.T, run.curve_points)) {
        const EulerContributions ec = euler_contributions(portfolio, t, opts);
        curve.push_back({t, ec.aggregate.s_star, ec.K});
    }
    switch (run.format) {
        case Format::json: {
            json j = base_report(config);
            j["departments"] = config.department_names;
            j["curve"] = curve_json(curve);
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: write_curve_csv(config, curve, out); break;
        case Format::table: print_curve_table(config, curve, out); break;
    }
}

bool report_validate(const ParsedConfig& config, std::ostream& out) {
    const RunConfig& run = config.run;
    SimulationConfig sim;
    sim.seed = run.seed;
    sim.n_paths = run.paths;
    sim.n_steps = run.steps;
    sim.horizon = run.T;
    const std::vector<ValidationRecord> checks = validate_portfolio(config.portfolio(), sim);
    const bool all_pass = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    switch (run.format) {
        case Format::json: {
            json j = base_report(config);
            j["seed"] = run.seed;
            j["paths"] = run.paths;
            json arr = json::array();
            for (const auto& c : checks) {
                arr.push_back({{"check_name", c.check_name},
                               {"analytic", c.analytic},
                               {"estimate", c.estimate},
                               {"ci", c.ci},
                               {"pass", c.pass}});
            }
            j["checks"] = std::move(arr);
            j["all_pass"] = all_pass;
            out << j.dump(2) << '\n';
            break;
        }
        case Format::csv: {
            out << "check_name,analytic,estimate,ci,pass\n";
            for (const auto& c : checks) {
                out << c.check_name << ',' << format_number(c.analytic) << ',' << format_number(c.estimate) << ','
                    << format_number(c.ci) << ',' << (c.pass ? "true" : "false") << '\n';
            }
            break;
        }
        case Format::table: {
            Table t({"check", "analytic", "estimate", "ci", "pass"});
            for (const auto& c : checks) {
                t.add({c.check_name, format_number(c.analytic), format_number(c.estimate), format_number(c.ci),
                       c.pass ? "yes" : "NO"});
            }
            t.print(out);
            out << '\n' << (all_pass ? "all checks passed" : "some checks FAILED") << '\n';
            break;
        }
    }
    return all_pass;
}

int dispatch(const ParsedConfig& config, std::ostream& out) {
    switch (config.run.command) {
        case Command::evar: report_evar(config, out); return kExitOk;
        case Command::cevar: report_cevar(config, out); return kExitOk;
        case Command::allocate: report_allocate(config, out); return kExitOk;
        case Command::curve: report_curve(config, out); return kExitOk;
        case Command::validate: return report_validate(config, out) ? kExitOk : kExitValidation;
    }
    return kExitUsage;
}

}  // namespace

int run(const ParsedConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate_run(config);
        const bool needs_portfolio = config.run.command == Command::allocate ||
                                     config.run.command == Command::curve || config.run.command == Command::validate;
        if (needs_portfolio && !(config.run.beta < 1.0)) {
            err << "error: command '" << to_string(config.run.command) << "' requires beta < 1\n";
            return kExitParse;
        }
        // Render into a buffer first so a failing run never leaves a truncated report behind.
        std::ostringstream buffer;
        const int code = dispatch(config, buffer);
        if (config.run.out_path.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(config.run.out_path, std::ios::binary | std::ios::trunc);
            if (!file) {
                err << "error: cannot write '" << config.run.out_path << "'\n";
                return kExitUsage;
            }
            file << buffer.str();
        }
        if (code == kExitValidation) err << "validation: one or more checks failed\n";
        return code;
    } catch (const NoStationaryPoint& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitNonAttainment;
    } catch (const UnboundedRisk& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitNonAttainment;
    } catch (const SolverError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitNonAttainment;
    } catch (const QuadratureError& ex) {
        err << "error: " << ex.what() << " (error estimate " << format_number(ex.error_estimate()) << ")\n";
        return kExitQuadrature;
    } catch (const InvalidArgument& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitParse;
    }
}

}  // namespace levyrisk::cli
