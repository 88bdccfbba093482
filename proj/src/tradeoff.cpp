#include "qhtsep/tradeoff.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "qhtsep/analytic.hpp"
#include "qhtsep/oracle.hpp"
#include "qhtsep/sdp.hpp"

namespace qhtsep::tradeoff {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::SdpFull, "sdp-full"},
    {Method::SdpReduced, "sdp-reduced"},
    {Method::AnalyticCommuting, "analytic-commuting"},
    {Method::AnalyticEps1, "analytic-eps1"},
    {Method::Oracle, "oracle"},
};

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

nlohmann::ordered_json point_json(const TradeoffPoint& p) {
    return nlohmann::ordered_json{
        {"theta", p.theta},
        {"delta", p.delta},
        {"epsilon", p.epsilon},
        {"method", std::string(method_name(p.method))},
        {"p10", p.p10},
        {"p10_commuting", p.p10_commuting},
        {"gap", p.gap},
        {"solver_status", p.solver_status},
    };
}

void check_domain(const char* what, double v, double lo, double hi,
                  bool lo_open) {
    const bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
    if (!ok)
        throw std::invalid_argument(std::string("sweep: ") + what +
                                    " out of domain: " + fmt12(v));
}

}  // namespace

std::string_view method_name(Method m) {
    for (const auto& [method, name] : kMethodNames)
        if (method == m) return name;
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (const auto& [method, n] : kMethodNames)
        if (n == name) return method;
    return std::nullopt;
}

SolverError::SolverError(std::string st)
    : std::runtime_error("solver stopped with status: " + st),
      status(std::move(st)) {}

TradeoffPoint evaluate_point(const model::Scenario& sc, Method method,
                             const EvalOptions& opt) {
    TradeoffPoint p;
    p.theta = sc.theta;
    p.delta = sc.delta;
    p.epsilon = sc.epsilon;
    p.method = method;
    p.p10_commuting = analytic::p10_commuting(sc).value;
    switch (method) {
        case Method::SdpFull:
        case Method::SdpReduced: {
            sdp::SdpSettings st;
            st.tol = opt.tol;
            st.max_iter = opt.max_iter;
            const auto prob = method == Method::SdpFull
                                  ? model::build_full_sdp(sc)
                                  : model::build_reduced_sdp(sc);
            const auto sol = sdp::solve(prob, st);
            p.solver_status = sdp::to_string(sol.status);
            if (sol.status != sdp::SdpStatus::Optimal)
                throw SolverError(p.solver_status);
            p.p10 = sol.primal_value;
            break;
        }
        case Method::AnalyticCommuting:
            p.p10 = p.p10_commuting;
            p.solver_status = "closed-form";
            break;
        case Method::AnalyticEps1:
            if (sc.epsilon != 1.0)
                throw std::invalid_argument(
                    "analytic-eps1 is only defined at epsilon = 1");
            p.p10 = analytic::p10_eps1(sc.theta, sc.delta).value;
            p.solver_status = "closed-form";
            break;
        case Method::Oracle:
            p.p10 = oracle::grid_p10(sc, opt.grid_n).value;
            p.solver_status = "grid";
            break;
    }
    p.gap = p.p10_commuting - p.p10;
    return p;
}

void validate(const SweepSpec& spec) {
    if (spec.theta_grid.empty() || spec.delta_grid.empty() ||
        spec.epsilon_grid.empty())
        throw std::invalid_argument("sweep: every parameter grid needs at least one value");
    if (spec.methods.empty())
        throw std::invalid_argument("sweep: no methods selected");
    const double quarter_pi = 0.78539816339744830962;
    for (double t : spec.theta_grid)
        check_domain("theta", t, 0.0, quarter_pi, false);
    for (double d : spec.delta_grid) check_domain("delta", d, 0.0, 1.0, false);
    for (double e : spec.epsilon_grid) check_domain("epsilon", e, 0.0, 1.0, true);
    for (Method m : spec.methods)
        if (m == Method::AnalyticEps1)
            for (double e : spec.epsilon_grid)
                if (e != 1.0)
                    throw std::invalid_argument(
                        "sweep: analytic-eps1 requires the epsilon grid {1}");
}

std::vector<TradeoffPoint> sweep_points(const SweepSpec& spec) {
    validate(spec);
    std::vector<TradeoffPoint> rows;
    rows.reserve(spec.theta_grid.size() * spec.delta_grid.size() *
                 spec.epsilon_grid.size() * spec.methods.size());
    for (double theta : spec.theta_grid)
        for (double delta : spec.delta_grid)
            for (double epsilon : spec.epsilon_grid)
                for (Method m : spec.methods)
                    rows.push_back(evaluate_point(
                        model::Scenario{theta, delta, epsilon}, m,
                        spec.options));
    return rows;
}

void run_sweep(const SweepSpec& spec) {
    if (spec.output_path.empty())
        throw std::invalid_argument("sweep: output path required");
    const auto rows = sweep_points(spec);
    std::string text;
    if (spec.format == Format::Csv) {
        text.append(kCsvHeader);
        text.push_back('\n');
        for (const auto& r : rows) {
            text += csv_row(r);
            text.push_back('\n');
        }
    } else {
        text = rows_to_json(rows);
        text.push_back('\n');
    }
    write_text_file(spec.output_path, text);
}

std::string csv_row(const TradeoffPoint& p) {
    std::string row = fmt12(p.theta);
    row += ',';
    row += fmt12(p.delta);
    row += ',';
    row += fmt12(p.epsilon);
    row += ',';
    row += method_name(p.method);
    row += ',';
    row += fmt12(p.p10);
    row += ',';
    row += fmt12(p.p10_commuting);
    row += ',';
    row += fmt12(p.gap);
    row += ',';
    row += p.solver_status;
    return row;
}

std::string to_json(const TradeoffPoint& p) { return point_json(p).dump(); }

std::string rows_to_json(const std::vector<TradeoffPoint>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back(point_json(r));
    return arr.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp(target);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << text;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw std::runtime_error("cannot replace " + path + ": " + ec.message());
    }
}

qcore::HermitianOperator read_strategy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read strategy file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("strategy file " + path +
                                 " is not valid JSON: " + e.what());
    }
    try {
        if (j.at("dim").get<int>() != 4)
            throw std::runtime_error("dim must be 4");
        const auto& re = j.at("re");
        const auto& im = j.at("im");
        Eigen::Matrix4cd m;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                m(r, c) = std::complex<double>(re.at(r).at(c).get<double>(),
                                               im.at(r).at(c).get<double>());
        return qcore::HermitianOperator(m);
    } catch (const std::exception& e) {
        throw std::runtime_error("strategy file " + path + ": " + e.what());
    }
}

void write_strategy(const std::string& path, const Eigen::MatrixXcd& m) {
    if (m.rows() != 4 || m.cols() != 4)
        throw std::invalid_argument("write_strategy: matrix must be 4x4");
    nlohmann::ordered_json j;
    j["dim"] = 4;
    auto re = nlohmann::ordered_json::array();
    auto im = nlohmann::ordered_json::array();
    for (int r = 0; r < 4; ++r) {
        auto re_row = nlohmann::ordered_json::array();
        auto im_row = nlohmann::ordered_json::array();
        for (int c = 0; c < 4; ++c) {
            re_row.push_back(m(r, c).real());
            im_row.push_back(m(r, c).imag());
        }
        re.push_back(re_row);
        im.push_back(im_row);
    }
    j["re"] = re;
    j["im"] = im;
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace qhtsep::tradeoff
