#pragma once

// SDP formulations of the worst-case verification problem.
//
// Outer problem: over effects Omega with 0 <= Omega <= 1, PPT, and
// <psi|Omega|psi> >= 1 - delta, minimize the worst acceptance probability on
// states sigma with <psi|sigma|psi> <= 1 - epsilon.  Dualizing the inner
// maximization turns the whole thing into one SDP over (Omega, y1, y2) with
// objective y1 + (1-epsilon) y2, the form built here.
//
// build_full_sdp works with the raw 4x4 effect (10 real variables plus the
// two dual scalars); build_reduced_sdp restricts to twirl-invariant effects
// with the fidelity constraint saturated, leaving (z, x, omega, y1, y2).
//
// Degenerate edges are presolved so that every emitted problem has a strictly
// feasible interior (required by the path-following solver): at delta = 0 the
// full form eliminates the forced eigenvector (Omega = |psi><psi| + V Q V^T
// over the orthogonal complement) and the reduced form pins x = 0; at
// delta = 1 the reduced sector block collapses, which also pins x = 0.

#include "qhtsep/qcore.hpp"
#include "qhtsep/sdp.hpp"

namespace qhtsep::model {

struct Scenario {
    double theta;    // state angle, [0, pi/4]
    double delta;    // admissible fidelity deficit of the strategy, [0, 1]
    double epsilon;  // fidelity deficit of the worst-case states, (0, 1]

    Scenario(double theta, double delta, double epsilon);
};

struct DualPoint {
    double y1 = 0.0;
    double y2 = 0.0;
};

enum class Form { Full, Reduced };

sdp::SdpProblem build_full_sdp(const Scenario& sc);
sdp::SdpProblem build_reduced_sdp(const Scenario& sc);

struct ExtractedStrategy {
    qcore::Effect omega;
    DualPoint dual;
};

// Decode a solver solution back into an effect and the inner dual variables.
// Throws std::invalid_argument unless sol.status == Optimal and the variable
// count matches the stated form for this scenario.
ExtractedStrategy extract_strategy(const sdp::SdpSolution& sol, Form which,
                                   const Scenario& sc);

}  // namespace qhtsep::model
