#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qhtsep/tradeoff.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhtsep/analytic.hpp"
#include "qhtsep/model.hpp"
#include "qhtsep/qcore.hpp"

using namespace qhtsep;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() /
                 ("qhtsep_tradeoff_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct CliResult {
    int code = -1;
    std::string out;
};

// Runs the built binary with stdout and stderr captured.
CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path cap =
        work_dir() / ("cli_out_" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string(QHTSEP_CLI_PATH) + " " + args + " > " +
                            cap.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(cap);
    std::ostringstream ss;
    ss << in.rdbuf();
    res.out = ss.str();
    return res;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Eigen::Matrix4cd commuting_matrix(double theta, double delta) {
    const double s2 = std::sin(2.0 * theta);
    const double zs = (1.0 - delta) / (2.0 + s2);
    return qcore::embed(
               qcore::SymmetrizedStrategy{1.0 - delta - zs, zs, 0.0, zs * s2},
               qcore::PureState2Q(theta))
        .matrix();
}

}  // namespace

TEST_CASE("method names round trip") {
    using tradeoff::Method;
    for (Method m : {Method::SdpFull, Method::SdpReduced,
                     Method::AnalyticCommuting, Method::AnalyticEps1,
                     Method::Oracle})
        CHECK(tradeoff::parse_method(tradeoff::method_name(m)) == m);
    CHECK(tradeoff::method_name(Method::SdpReduced) == "sdp-reduced");
    CHECK_FALSE(tradeoff::parse_method("bogus").has_value());
    CHECK_FALSE(tradeoff::parse_method("").has_value());
}

TEST_CASE("point evaluation agrees across methods") {
    const model::Scenario sc{0.5, 0.2, 0.8};
    const auto full = tradeoff::evaluate_point(sc, tradeoff::Method::SdpFull);
    const auto red = tradeoff::evaluate_point(sc, tradeoff::Method::SdpReduced);
    const auto com =
        tradeoff::evaluate_point(sc, tradeoff::Method::AnalyticCommuting);
    tradeoff::EvalOptions coarse;
    coarse.grid_n = 150;
    const auto ora =
        tradeoff::evaluate_point(sc, tradeoff::Method::Oracle, coarse);

    CHECK(std::abs(full.p10 - red.p10) <= 1e-6);
    CHECK(std::abs(ora.p10 - red.p10) <= 1e-3);
    CHECK(com.p10 == com.p10_commuting);
    CHECK(com.p10 == doctest::Approx(analytic::p10_commuting(sc).value));
    for (const auto& p : {full, red, com, ora}) {
        CHECK(p.gap == p.p10_commuting - p.p10);
        CHECK(p.p10 >= 0.0);
        CHECK(p.p10 <= 1.0);
    }
    CHECK(full.solver_status == "optimal");
    CHECK(red.solver_status == "optimal");
    CHECK(com.solver_status == "closed-form");
    CHECK(ora.solver_status == "grid");

    const model::Scenario tight{pi / 8, 0.1, 1.0};
    const auto closed =
        tradeoff::evaluate_point(tight, tradeoff::Method::AnalyticEps1);
    const auto full1 =
        tradeoff::evaluate_point(tight, tradeoff::Method::SdpFull);
    CHECK(closed.solver_status == "closed-form");
    CHECK(std::abs(closed.p10 - full1.p10) <= 1e-6);
    CHECK(std::abs(closed.p10 - 0.08803537115286136) <= 1e-12);
}

TEST_CASE("invalid requests are rejected") {
    CHECK_THROWS_AS(tradeoff::evaluate_point(model::Scenario{0.5, 0.2, 0.8},
                                             tradeoff::Method::AnalyticEps1),
                    std::invalid_argument);

    tradeoff::EvalOptions starved;
    starved.max_iter = 1;
    bool caught = false;
    try {
        tradeoff::evaluate_point(model::Scenario{0.5, 0.2, 0.8},
                                 tradeoff::Method::SdpFull, starved);
    } catch (const tradeoff::SolverError& e) {
        caught = true;
        CHECK(e.status == "max-iterations");
    }
    CHECK(caught);

    tradeoff::EvalOptions tiny;
    tiny.grid_n = 10;
    CHECK_THROWS_AS(tradeoff::evaluate_point(model::Scenario{0.5, 0.2, 0.8},
                                             tradeoff::Method::Oracle, tiny),
                    std::invalid_argument);
}

TEST_CASE("sweep rows follow the declared order") {
    tradeoff::SweepSpec spec;
    spec.theta_grid = {0.3, 0.6};
    spec.delta_grid = {0.1, 0.4};
    spec.epsilon_grid = {0.7, 1.0};
    spec.methods = {tradeoff::Method::AnalyticCommuting,
                    tradeoff::Method::SdpReduced};
    const auto rows = tradeoff::sweep_points(spec);
    REQUIRE(rows.size() == 16);
    int i = 0;
    for (double theta : spec.theta_grid)
        for (double delta : spec.delta_grid)
            for (double eps : spec.epsilon_grid)
                for (auto m : spec.methods) {
                    CHECK(rows[i].theta == theta);
                    CHECK(rows[i].delta == delta);
                    CHECK(rows[i].epsilon == eps);
                    CHECK(rows[i].method == m);
                    CHECK(rows[i].gap >= -1e-6);
                    CHECK(rows[i].p10 >= 0.0);
                    CHECK(rows[i].p10 <= 1.0);
                    ++i;
                }

    tradeoff::SweepSpec cell;
    cell.theta_grid = {0.3};
    cell.delta_grid = {0.4};
    cell.epsilon_grid = {0.7};
    cell.methods = {tradeoff::Method::SdpReduced};
    const auto one = tradeoff::sweep_points(cell);
    REQUIRE(one.size() == 1);
    const auto direct = tradeoff::evaluate_point(
        model::Scenario{0.3, 0.4, 0.7}, tradeoff::Method::SdpReduced);
    CHECK(one[0].p10 == direct.p10);
    CHECK(one[0].gap == direct.gap);
}

TEST_CASE("sweep specs are validated") {
    tradeoff::SweepSpec spec;
    spec.theta_grid = {0.3};
    spec.delta_grid = {0.1};
    spec.epsilon_grid = {0.9};
    spec.methods = {tradeoff::Method::SdpReduced};
    CHECK_NOTHROW(tradeoff::validate(spec));

    auto bad = spec;
    bad.delta_grid.clear();
    CHECK_THROWS_AS(tradeoff::validate(bad), std::invalid_argument);

    bad = spec;
    bad.epsilon_grid = {0.0};
    CHECK_THROWS_AS(tradeoff::validate(bad), std::invalid_argument);

    bad = spec;
    bad.theta_grid = {1.0};  // past pi/4
    CHECK_THROWS_AS(tradeoff::validate(bad), std::invalid_argument);

    bad = spec;
    bad.methods = {tradeoff::Method::AnalyticEps1};
    CHECK_THROWS_AS(tradeoff::validate(bad), std::invalid_argument);
    bad.epsilon_grid = {1.0};
    CHECK_NOTHROW(tradeoff::validate(bad));

    bad = spec;
    bad.methods.clear();
    CHECK_THROWS_AS(tradeoff::validate(bad), std::invalid_argument);

    auto no_output = spec;
    CHECK_THROWS_AS(tradeoff::run_sweep(no_output), std::invalid_argument);
}

TEST_CASE("csv rows parse back and re-evaluate to the same value") {
    CHECK(tradeoff::kCsvHeader ==
          "theta,delta,epsilon,method,p10,p10_commuting,gap,solver_status");
    tradeoff::SweepSpec spec;
    spec.theta_grid = {0.25, 0.7};
    spec.delta_grid = {0.15, 0.6};
    spec.epsilon_grid = {0.85};
    spec.methods = {tradeoff::Method::SdpReduced,
                    tradeoff::Method::AnalyticCommuting};
    for (const auto& row : tradeoff::sweep_points(spec)) {
        const auto fields = split(tradeoff::csv_row(row), ',');
        REQUIRE(fields.size() == 8);
        const model::Scenario re{std::stod(fields[0]), std::stod(fields[1]),
                                 std::stod(fields[2])};
        const auto method = tradeoff::parse_method(fields[3]);
        REQUIRE(method.has_value());
        const auto again = tradeoff::evaluate_point(re, *method);
        CHECK(std::abs(again.p10 - std::stod(fields[4])) <= 1e-9);
        CHECK(fields[7] == row.solver_status);
    }
}

TEST_CASE("strategy files round trip and reject malformed input") {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = 0.7;
    m(1, 1) = 0.2;
    m(2, 2) = 0.4;
    m(3, 3) = 0.9;
    m(0, 3) = std::complex<double>(0.11, -0.05);
    m(3, 0) = std::conj(m(0, 3));
    m(1, 2) = std::complex<double>(0.0, 0.08);
    m(2, 1) = std::conj(m(1, 2));

    const fs::path path = work_dir() / "strategy_roundtrip.json";
    tradeoff::write_strategy(path.string(), m);
    const auto back = tradeoff::read_strategy(path.string());
    CHECK((back.matrix() - m).cwiseAbs().maxCoeff() <= 1e-15);

    const fs::path garbage = work_dir() / "strategy_garbage.json";
    {
        std::ofstream out(garbage);
        out << "not json at all";
    }
    CHECK_THROWS_AS(tradeoff::read_strategy(garbage.string()),
                    std::runtime_error);

    const fs::path wrong_dim = work_dir() / "strategy_dim.json";
    {
        std::ofstream out(wrong_dim);
        out << R"({"dim":3,"re":[[1]],"im":[[0]]})";
    }
    CHECK_THROWS_AS(tradeoff::read_strategy(wrong_dim.string()),
                    std::runtime_error);

    const fs::path missing = work_dir() / "strategy_missing.json";
    {
        std::ofstream out(missing);
        out << R"({"dim":4,"re":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})";
    }
    CHECK_THROWS_AS(tradeoff::read_strategy(missing.string()),
                    std::runtime_error);

    // Valid JSON, but the matrix it holds is not Hermitian.
    Eigen::Matrix4cd skew = m;
    skew(0, 3) = std::complex<double>(0.3, 0.0);
    const fs::path non_herm = work_dir() / "strategy_nonherm.json";
    tradeoff::write_strategy(non_herm.string(), skew);
    CHECK_THROWS_AS(tradeoff::read_strategy(non_herm.string()),
                    std::runtime_error);

    CHECK_THROWS_AS(
        tradeoff::read_strategy((work_dir() / "no_such_file.json").string()),
        std::runtime_error);
}

TEST_CASE("cli point matches the library") {
    auto res = run_cli(
        "point --theta 0.7853981633974483 --delta 0 --epsilon 1 "
        "--method sdp-full");
    REQUIRE(res.code == 0);
    auto j = nlohmann::json::parse(res.out);
    CHECK(std::abs(j.at("p10").get<double>() - 1.0 / 3.0) <= 1e-6);
    CHECK(j.at("solver_status").get<std::string>() == "optimal");

    res = run_cli("point --theta-frac 1/8 --delta 0.1 --epsilon 1 "
                  "--method sdp-reduced");
    REQUIRE(res.code == 0);
    j = nlohmann::json::parse(res.out);
    CHECK(std::abs(j.at("p10").get<double>() - 0.08803537115286136) <= 1e-6);
    CHECK(j.at("theta").get<double>() == doctest::Approx(pi / 8).epsilon(1e-15));

    res = run_cli("point --theta 0 --delta 0.5 --epsilon 1 "
                  "--method analytic-eps1");
    REQUIRE(res.code == 0);
    j = nlohmann::json::parse(res.out);
    CHECK(j.at("p10").get<double>() <= 1e-12);
}

TEST_CASE("cli usage errors exit with code 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("point --theta 0.3 --delta 0.2 --epsilon 0.8").code == 2);
    CHECK(run_cli("point --theta 0.3 --delta 0.2 --epsilon 0.8 "
                  "--method bogus")
              .code == 2);
    CHECK(run_cli("point --theta 0.3 --delta 0.2 --epsilon 0.5 "
                  "--method analytic-eps1")
              .code == 2);
    CHECK(run_cli("point --theta-frac a/b --delta 0.2 --epsilon 0.8 "
                  "--method sdp-reduced")
              .code == 2);
    CHECK(run_cli("point --theta 2.0 --delta 0.2 --epsilon 0.8 "
                  "--method sdp-reduced")
              .code == 2);
    CHECK(run_cli("point --theta 0.3 --epsilon 0.8 --method sdp-reduced")
              .code == 2);
    CHECK(run_cli("sweep --theta 0.3 --delta 0.2 --epsilon 0.8 "
                  "--method sdp-reduced")
              .code == 2);
    CHECK(run_cli("sweep --theta 0.3 --delta 0.2 --epsilon 0.8 "
                  "--method sdp-reduced --format yaml --output " +
                  (work_dir() / "never.csv").string())
              .code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("cli sweep writes deterministic files") {
    const fs::path out1 = work_dir() / "sweep1.csv";
    const fs::path out2 = work_dir() / "sweep2.csv";
    const std::string grid =
        "sweep --theta-frac 1/8 --delta 0.1,0.5 --epsilon 0.9,1 "
        "--method sdp-reduced,analytic-commuting --output ";
    REQUIRE(run_cli(grid + out1.string()).code == 0);
    REQUIRE(run_cli(grid + out2.string()).code == 0);
    const std::string text = read_file(out1);
    CHECK(text == read_file(out2));

    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 9);
    CHECK(lines[0] == std::string(tradeoff::kCsvHeader));
    for (size_t i = 1; i < lines.size(); ++i)
        CHECK(split(lines[i], ',').size() == 8);

    const fs::path json_out = work_dir() / "sweep.json";
    REQUIRE(run_cli(grid + json_out.string() + " --format json").code == 0);
    const auto arr = nlohmann::json::parse(read_file(json_out));
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 8);
    CHECK(arr[0].contains("p10_commuting"));

    // A single-cell sweep and the point command agree on the same cell.
    const fs::path cell = work_dir() / "cell.csv";
    REQUIRE(run_cli("sweep --theta 0.3 --delta 0.4 --epsilon 0.7 "
                    "--method sdp-reduced --output " +
                    cell.string())
                .code == 0);
    const auto row = split(lines_of(read_file(cell)).at(1), ',');
    const auto point = run_cli(
        "point --theta 0.3 --delta 0.4 --epsilon 0.7 --method sdp-reduced");
    REQUIRE(point.code == 0);
    const auto j = nlohmann::json::parse(point.out);
    CHECK(std::abs(std::stod(row[4]) - j.at("p10").get<double>()) <= 1e-11);
}

TEST_CASE("cli verify certifies and rejects strategies") {
    const fs::path good = work_dir() / "opt_strategy.json";
    tradeoff::write_strategy(good.string(), commuting_matrix(pi / 8, 0.1));
    auto res = run_cli("verify " + good.string() +
                       " --theta-frac 1/8 --delta 0.1 --epsilon 0.9");
    REQUIRE(res.code == 0);
    auto j = nlohmann::json::parse(res.out);
    CHECK(j.at("feasible").get<bool>());
    CHECK(std::abs(j.at("p10_worst").get<double>() - 0.3015751387206306) <=
          1e-6);
    CHECK(j.at("violations").empty());

    const fs::path id = work_dir() / "identity_strategy.json";
    tradeoff::write_strategy(id.string(), Eigen::Matrix4cd::Identity());
    res = run_cli("verify " + id.string() +
                  " --theta-frac 1/8 --delta 0.1 --epsilon 0.9");
    REQUIRE(res.code == 0);
    j = nlohmann::json::parse(res.out);
    CHECK(std::abs(j.at("p10_worst").get<double>() - 1.0) <= 1e-9);
    CHECK(j.at("p01_worst").get<double>() == doctest::Approx(0.0));

    const qcore::PureState2Q psi(pi / 8);
    const Eigen::Vector4d pv = qcore::state_vector(psi);
    const fs::path proj = work_dir() / "projector_strategy.json";
    tradeoff::write_strategy(
        proj.string(),
        (pv * pv.transpose()).cast<std::complex<double>>());
    res = run_cli("verify " + proj.string() +
                  " --theta-frac 1/8 --delta 0 --epsilon 0.9");
    REQUIRE(res.code == 1);
    j = nlohmann::json::parse(res.out);
    CHECK_FALSE(j.at("feasible").get<bool>());
    std::string joined;
    for (const auto& v : j.at("violations")) joined += v.get<std::string>();
    CHECK(joined.find("partial transpose") != std::string::npos);

    const fs::path bad = work_dir() / "broken_strategy.json";
    {
        std::ofstream out(bad);
        out << "{]";
    }
    CHECK(run_cli("verify " + bad.string() +
                  " --theta-frac 1/8 --delta 0.1 --epsilon 0.9")
              .code == 2);
    CHECK(run_cli("verify " + (work_dir() / "absent.json").string() +
                  " --theta-frac 1/8 --delta 0.1 --epsilon 0.9")
              .code == 2);
}

TEST_CASE("cli config supplies defaults and flags override") {
    const fs::path cfg = work_dir() / "config.json";
    {
        std::ofstream out(cfg);
        out << R"({"theta": 0.3, "delta": 0.2, "epsilon": 0.8,)"
            << R"( "method": "analytic-commuting"})";
    }
    auto res = run_cli("point --config " + cfg.string());
    REQUIRE(res.code == 0);
    auto j = nlohmann::json::parse(res.out);
    const double want =
        analytic::p10_commuting(model::Scenario{0.3, 0.2, 0.8}).value;
    CHECK(j.at("p10").get<double>() == doctest::Approx(want).epsilon(1e-12));

    res = run_cli("point --config " + cfg.string() + " --delta 0.5");
    REQUIRE(res.code == 0);
    j = nlohmann::json::parse(res.out);
    CHECK(j.at("delta").get<double>() == 0.5);
    const double want2 =
        analytic::p10_commuting(model::Scenario{0.3, 0.5, 0.8}).value;
    CHECK(j.at("p10").get<double>() == doctest::Approx(want2).epsilon(1e-12));

    CHECK(run_cli("point --config " +
                  (work_dir() / "absent_config.json").string())
              .code == 2);
}
