#pragma once
// Engine behind the command line: single-point evaluation with every solver
// method behind one interface, deterministic sweeps over parameter grids, and
// the CSV / JSON / strategy-file plumbing.  The binary in tools/ is a thin
// argument parser over these calls, so everything here is testable in
// process.
//
// Every point carries the commuting-strategy value next to the requested
// method's value; their difference (the gap column) is the quantity the
// sweeps exist to tabulate.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "qhtsep/model.hpp"
#include "qhtsep/qcore.hpp"

namespace qhtsep::tradeoff {

enum class Method {
    SdpFull,            // interior-point solve of the 10-parameter program
    SdpReduced,         // interior-point solve of the symmetrized program
    AnalyticCommuting,  // closed-form best commuting strategy
    AnalyticEps1,       // closed form at epsilon = 1 (rejected otherwise)
    Oracle,             // independent grid search over symmetrized strategies
};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

struct EvalOptions {
    int grid_n = 200;    // oracle grid resolution
    double tol = 1e-9;   // SDP duality-gap target
    int max_iter = 200;  // SDP iteration cap
};

struct TradeoffPoint {
    double theta = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    Method method = Method::SdpFull;
    double p10 = 0.0;
    double p10_commuting = 0.0;
    double gap = 0.0;  // p10_commuting - p10
    std::string solver_status;
};

// Raised when an SDP-backed method finishes without an optimality
// certificate; carries the solver status so the front end can map it to its
// solver-failure exit code.
struct SolverError : std::runtime_error {
    std::string status;
    explicit SolverError(std::string st);
};

// Evaluates one cell.  Throws std::invalid_argument for parameter-domain
// violations (including analytic-eps1 away from epsilon = 1) and SolverError
// when the SDP stops early.
TradeoffPoint evaluate_point(const model::Scenario& sc, Method method,
                             const EvalOptions& opt = {});

enum class Format { Csv, Json };

struct SweepSpec {
    std::vector<double> theta_grid;
    std::vector<double> delta_grid;
    std::vector<double> epsilon_grid;
    std::vector<Method> methods;
    std::string output_path;
    Format format = Format::Csv;
    EvalOptions options;
};

// Grid invariants: all four lists non-empty, parameters inside their domains,
// and analytic-eps1 only together with the epsilon grid {1}.  Throws
// std::invalid_argument.
void validate(const SweepSpec& spec);

// Evaluates every cell in deterministic order: theta-major, then delta, then
// epsilon, then method, each in the order listed in the spec.
std::vector<TradeoffPoint> sweep_points(const SweepSpec& spec);

// validate + sweep_points + atomic write to spec.output_path in spec.format.
// Nothing is left on disk when evaluation or the write fails.
void run_sweep(const SweepSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "theta,delta,epsilon,method,p10,p10_commuting,gap,solver_status";

// One CSV line (no newline), numbers at 12 significant digits.
std::string csv_row(const TradeoffPoint& p);
// Single JSON object with the same fields in the same order.
std::string to_json(const TradeoffPoint& p);
// JSON array of row objects.
std::string rows_to_json(const std::vector<TradeoffPoint>& rows);

// Writes text to path through a temporary file renamed into place, so
// readers never observe a partial file and failures leave nothing behind.
void write_text_file(const std::string& path, const std::string& text);

// Strategy files hold one 4x4 Hermitian matrix as
//   {"dim": 4, "re": [[...] x4], "im": [[...] x4]}.
// The reader throws std::runtime_error on anything malformed, including a
// matrix that is not Hermitian; the writer replaces path atomically.
qcore::HermitianOperator read_strategy(const std::string& path);
void write_strategy(const std::string& path, const Eigen::MatrixXcd& m);

}  // namespace qhtsep::tradeoff
