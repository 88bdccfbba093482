#pragma once
// Batched evaluators for the two hot loops of the grid searches.
//
// reduced_objective_batch evaluates, for many (z, x) pairs at once, the
// worst-case acceptance probability of the symmetrized strategy whose free
// parameters are z and x (the diagonal split and the off-diagonal coupling in
// the span of the target state and its in-sector complement), with the
// fidelity constraint saturated (t = 1 - delta - z) and the cross sector
// weight omega sitting on its partial-transpose floor |x cos2t + z sin2t|.
//
// dual1d_batch evaluates the same worst-case probability for explicit
// (t, z, x, omega) strategies by minimizing the one-variable dual bound
//     h(y2) = lambda_max(Omega - y2 |psi><psi|) + (1 - eps) y2,   y2 >= 0,
// with a fixed-iteration golden-section search, using the closed 2x2
// eigenvalue formula for the shifted operator.  It shares no code or algebra
// with the closed-form path, which is what makes cross-checking the two
// meaningful.
//
// Both evaluators exist in a scalar reference version and an AVX2 version;
// the active one is selected at runtime and the two are required to produce
// identical results (covered by the equivalence tests).  Lanes that violate
// the two-outcome operator constraints yield +infinity.

#include <cstddef>
#include <string_view>

namespace qhtsep::kernels {

enum class Backend { Scalar, Avx2 };

bool backend_supported(Backend b);
std::string_view backend_name(Backend b);

// The process-wide backend used by the batch entry points below.  Defaults to
// the widest supported one.  set_backend throws std::invalid_argument when
// the requested backend is not available on this machine.
Backend active_backend();
void set_backend(Backend b);

// Per-scenario constants shared by every lane of a batch.
struct ScenarioParams {
    double theta;
    double delta;
    double epsilon;
    double cos2t;
    double sin2t;
    double slope;  // sqrt((1-eps)/eps); 0 when eps = 1
    double mix;    // 2 sqrt(eps (1-eps)), the coupling weight at the
                   // stationary branch
    bool eps_is_one;
    ScenarioParams(double theta, double delta, double epsilon);
};

// out[i] = worst-case acceptance value of the strategy (z[i], x[i]) described
// above, or +infinity when (z[i], x[i]) is infeasible.
void reduced_objective_batch(const ScenarioParams& p, const double* z,
                             const double* x, double* out, std::size_t n);

// out[i] = min_{y2 >= 0} h(y2) for the strategy (t[i], z[i], x[i], omega[i]),
// or +infinity when it is not a valid two-outcome effect.
void dual1d_batch(const ScenarioParams& p, const double* t, const double* z,
                  const double* x, const double* omega, double* out,
                  std::size_t n);

}  // namespace qhtsep::kernels
