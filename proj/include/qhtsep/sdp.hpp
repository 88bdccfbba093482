#pragma once

// Small dense semidefinite programming solver.
//
// Problems are given in linear-matrix-inequality form
//
//     minimize    c^T x
//     subject to  S_b(x) = F_{b,0} + sum_i x_i F_{b,i}  >=  0   for each block b
//
// with real symmetric coefficient matrices and block sizes up to 8.  The dual
//
//     maximize    -sum_b <F_{b,0}, Z_b>
//     subject to  sum_b <F_{b,i}, Z_b> = c_i,   Z_b >= 0
//
// is tracked alongside; the reported gap is primal minus dual objective.
//
// Method: feasible-start path following with HKM (dual-scaled) search
// directions and a Mehrotra predictor-corrector step, fraction-to-boundary
// rule with factor `step_fraction`.  The Schur complement system (one dense
// m x m solve per iteration, m = number of variables) is formed explicitly;
// every matrix here is tiny, so no sparsity is exploited anywhere.
//
// Starting points: when S(0) is strictly positive definite, phase 2 starts
// from x = 0 directly.  Otherwise a phase-1 problem
//
//     minimize s   subject to   S_b(x) + s I >= 0
//
// is solved from the trivially strict point (x, s) = (0, max_b(0, -lambda_min
// F_{b,0}) + 1); the phase stops early as soon as an iterate has
// lambda_min S(x) above a small margin, and certifies primal infeasibility
// when its optimum stays positive.  Unboundedness is certified by an
// improving ray (c^T d < 0 with sum_i d_i F_{b,i} >= 0 for all blocks) once
// the objective diverges.
//
// The solver is deterministic: no randomness, no time-dependent behaviour.

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace qhtsep::sdp {

// One PSD constraint block: constant term plus one coefficient per variable.
struct LmiBlock {
    Eigen::MatrixXd constant;
    std::vector<Eigen::MatrixXd> coeff;
};

struct SdpProblem {
    Eigen::VectorXd objective;
    std::vector<LmiBlock> blocks;

    int num_vars() const { return static_cast<int>(objective.size()); }

    // Throws std::invalid_argument on shape mismatch, asymmetric coefficient
    // matrices (tolerance 1e-12), or blocks larger than 8x8.
    void validate() const;
};

struct SdpSettings {
    double tol = 1e-9;           // absolute duality-gap target
    int max_iter = 200;
    double step_fraction = 0.98; // fraction of the step to the cone boundary
};

enum class SdpStatus { Optimal, MaxIterations, Infeasible, Unbounded };

const char* to_string(SdpStatus s);

struct SdpSolution {
    SdpStatus status = SdpStatus::MaxIterations;
    Eigen::VectorXd x;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;                          // primal_value - dual_value
    int iterations = 0;
    std::vector<Eigen::MatrixXd> dual_blocks;  // Z_b at the final iterate
    // (primal, dual) objective values of every main-phase iterate, in order.
    std::vector<std::pair<double, double>> trace;
};

// Solve the problem.  status == Optimal guarantees |gap| <= tol and dual
// residuals at the same scale; MaxIterations returns the best iterate found.
// For Infeasible, x holds the phase-1 minimizer (the least-violating point).
SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings = {});

// KKT verification at tolerance tol: primal blocks PSD to -tol, dual blocks
// PSD to -tol with constraint residuals |<F_i, Z> - c_i| <= tol, and total
// complementarity <S, Z> <= tol * (total block dimension).
bool check_kkt(const SdpProblem& problem, const SdpSolution& sol, double tol);

// Evaluate the constraint blocks at x (helper shared with tests/consumers).
std::vector<Eigen::MatrixXd> assemble_blocks(const SdpProblem& problem,
                                             const Eigen::VectorXd& x);

// Smallest eigenvalue across all blocks at x.
double min_block_eigenvalue(const SdpProblem& problem, const Eigen::VectorXd& x);

}  // namespace qhtsep::sdp
