// Command line front end.  Subcommands:
//   point     evaluate one (theta, delta, epsilon) cell, JSON to stdout
//   sweep     tabulate a parameter grid into a CSV or JSON file
//   verify    certify a strategy file against a scenario
//   selftest  run the acceptance suite
// Exit codes: 0 success, 1 infeasible verification or failed selftest,
// 2 usage error, 3 solver failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhtsep/acceptance.hpp"
#include "qhtsep/model.hpp"
#include "qhtsep/oracle.hpp"
#include "qhtsep/qcore.hpp"
#include "qhtsep/tradeoff.hpp"

namespace {

namespace qt = qhtsep::tradeoff;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

struct Args {
    std::vector<double> theta;
    std::vector<std::string> theta_frac;
    std::vector<double> delta;
    std::vector<double> epsilon;
    std::vector<std::string> methods;
    int grid_n = 200;
    double tol = 1e-9;
    std::string output;
    std::string format = "csv";
    std::string config;
    std::string strategy_file;
};

double parse_pi_fraction(const std::string& s) {
    const auto slash = s.find('/');
    long p = 0;
    long q = 0;
    const char* b = s.data();
    if (slash == std::string::npos || slash == 0 || slash + 1 >= s.size())
        throw std::invalid_argument("--theta-frac expects p/q");
    const auto r1 = std::from_chars(b, b + slash, p);
    const auto r2 = std::from_chars(b + slash + 1, b + s.size(), q);
    if (r1.ec != std::errc{} || r1.ptr != b + slash || r2.ec != std::errc{} ||
        r2.ptr != b + s.size() || p < 0 || q <= 0)
        throw std::invalid_argument(
            "--theta-frac expects a nonnegative integer over a positive one");
    return std::numbers::pi * static_cast<double>(p) / static_cast<double>(q);
}

// Flags always win over the config file; only options the user did not pass
// are read from it.
void apply_config(const CLI::App& cmd, Args& a) {
    if (a.config.empty()) return;
    std::ifstream in(a.config);
    if (!in) throw std::runtime_error("cannot read config file: " + a.config);
    nlohmann::json cfg;
    try {
        in >> cfg;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config file " + a.config +
                                 " is not valid JSON: " + e.what());
    }
    const auto given = [&](const std::string& flag) {
        const CLI::Option* o = cmd.get_option_no_throw("--" + flag);
        return o != nullptr && o->count() > 0;
    };
    const auto doubles = [&](const char* key, std::vector<double>& dst) {
        if (given(key) || !cfg.contains(key)) return;
        const auto& v = cfg.at(key);
        dst = v.is_array() ? v.get<std::vector<double>>()
                           : std::vector<double>{v.get<double>()};
    };
    const auto strings = [&](const char* key, std::vector<std::string>& dst) {
        if (given(key) || !cfg.contains(key)) return;
        const auto& v = cfg.at(key);
        dst = v.is_array() ? v.get<std::vector<std::string>>()
                           : std::vector<std::string>{v.get<std::string>()};
    };
    try {
        doubles("theta", a.theta);
        strings("theta-frac", a.theta_frac);
        doubles("delta", a.delta);
        doubles("epsilon", a.epsilon);
        strings("method", a.methods);
        if (!given("grid-n") && cfg.contains("grid-n"))
            a.grid_n = cfg.at("grid-n").get<int>();
        if (!given("tol") && cfg.contains("tol"))
            a.tol = cfg.at("tol").get<double>();
        if (!given("output") && cfg.contains("output"))
            a.output = cfg.at("output").get<std::string>();
        if (!given("format") && cfg.contains("format"))
            a.format = cfg.at("format").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config file " + a.config + ": " + e.what());
    }
}

std::vector<double> resolve_thetas(const Args& a) {
    std::vector<double> out = a.theta;
    for (const auto& f : a.theta_frac) out.push_back(parse_pi_fraction(f));
    if (out.empty())
        throw std::invalid_argument("need --theta or --theta-frac");
    return out;
}

template <typename T>
const T& single(const std::vector<T>& v, const char* what) {
    if (v.size() != 1)
        throw std::invalid_argument(std::string(what) +
                                    ": exactly one value required");
    return v.front();
}

qt::Method method_of(const std::string& name) {
    const auto m = qt::parse_method(name);
    if (!m) throw std::invalid_argument("unknown method: " + name);
    return *m;
}

qt::Format format_of(const std::string& name) {
    if (name == "csv") return qt::Format::Csv;
    if (name == "json") return qt::Format::Json;
    throw std::invalid_argument("--format must be csv or json");
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty())
        std::cout << text << "\n";
    else
        qt::write_text_file(output, text + "\n");
}

int cmd_point(const CLI::App& cmd, Args& a) {
    apply_config(cmd, a);
    const qhtsep::model::Scenario sc{single(resolve_thetas(a), "theta"),
                                     single(a.delta, "--delta"),
                                     single(a.epsilon, "--epsilon")};
    qt::EvalOptions opt;
    opt.grid_n = a.grid_n;
    opt.tol = a.tol;
    const auto p =
        qt::evaluate_point(sc, method_of(single(a.methods, "--method")), opt);
    emit(qt::to_json(p), a.output);
    return kExitOk;
}

int cmd_sweep(const CLI::App& cmd, Args& a) {
    apply_config(cmd, a);
    qt::SweepSpec spec;
    spec.theta_grid = resolve_thetas(a);
    spec.delta_grid = a.delta;
    spec.epsilon_grid = a.epsilon;
    for (const auto& name : a.methods) spec.methods.push_back(method_of(name));
    spec.output_path = a.output;
    spec.format = format_of(a.format);
    spec.options.grid_n = a.grid_n;
    spec.options.tol = a.tol;
    qt::run_sweep(spec);
    return kExitOk;
}

int cmd_verify(const CLI::App& cmd, Args& a) {
    apply_config(cmd, a);
    const auto op = qt::read_strategy(a.strategy_file);
    const qhtsep::model::Scenario sc{single(resolve_thetas(a), "theta"),
                                     single(a.delta, "--delta"),
                                     single(a.epsilon, "--epsilon")};
    const auto rep = qhtsep::oracle::certify_strategy(op, sc);
    const nlohmann::ordered_json j{
        {"feasible", rep.feasible},
        {"p01_worst", rep.p01_worst},
        {"p10_worst", rep.p10_worst},
        {"violations", rep.violations},
    };
    emit(j.dump(2), a.output);
    return rep.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Worst-case error trade-off for two-qubit verification strategies"};
    app.require_subcommand(1);
    Args a;

    const auto add_scenario = [&](CLI::App* cmd) {
        cmd->add_option("--theta", a.theta, "state angle in radians, [0, pi/4]")
            ->delimiter(',');
        cmd->add_option("--theta-frac", a.theta_frac,
                        "state angle as a fraction p/q of pi")
            ->delimiter(',');
        cmd->add_option("--delta", a.delta,
                        "largest tolerated rejection of the target, [0, 1]")
            ->delimiter(',');
        cmd->add_option("--epsilon", a.epsilon,
                        "fidelity deficit defining the alternative, (0, 1]")
            ->delimiter(',');
        cmd->add_option("--config", a.config,
                        "JSON file supplying defaults for any flag");
        cmd->add_option("--output", a.output, "write the result here");
    };
    const auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--method", a.methods,
                        "sdp-full | sdp-reduced | analytic-commuting | "
                        "analytic-eps1 | oracle")
            ->delimiter(',');
        cmd->add_option("--grid-n", a.grid_n, "oracle grid resolution");
        cmd->add_option("--tol", a.tol, "SDP duality-gap target");
    };

    CLI::App* point =
        app.add_subcommand("point", "evaluate a single parameter cell");
    add_scenario(point);
    add_solver(point);

    CLI::App* sweep =
        app.add_subcommand("sweep", "tabulate a parameter grid to a file");
    add_scenario(sweep);
    add_solver(sweep);
    sweep->add_option("--format", a.format, "csv or json");

    CLI::App* verify = app.add_subcommand(
        "verify", "certify a strategy file against a scenario");
    verify->add_option("strategy", a.strategy_file, "strategy JSON file")
        ->required();
    add_scenario(verify);

    CLI::App* selftest =
        app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (point->parsed()) return cmd_point(*point, a);
        if (sweep->parsed()) return cmd_sweep(*sweep, a);
        if (verify->parsed()) return cmd_verify(*verify, a);
        if (selftest->parsed())
            return qhtsep::acceptance::run_acceptance(std::cout)
                       ? kExitOk
                       : kExitInfeasible;
    } catch (const qt::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
