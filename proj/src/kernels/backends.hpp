#pragma once
// Internal backend entry points plus the constants both backends must share
// so that their results agree bit for bit.

#include "qhtsep/kernels.hpp"

namespace qhtsep::kernels::detail {

// Golden-section parameters for dual1d.  The bracket [0, Y] is derived per
// lane from h(y2) >= L + (1-eps) y2 with L the value of the compression onto
// the complement of psi, so Y = (h(0) - L)/(1-eps) always contains the
// minimizer.  120 iterations shrink the bracket by 0.618^120 ~ 1e-25, enough
// for any bracket that fits in a double.
inline constexpr int kGoldenIters = 120;
inline constexpr double kInvPhi = 0.6180339887498948482;   // (sqrt(5)-1)/2
inline constexpr double kInvPhi2 = 0.3819660112501051518;  // 1 - kInvPhi

// Guard for the removable 0/0 in the stationary-value formula (the x^2 /
// (y1 - (t-z)) term has a zero numerator whenever the denominator is zero).
inline constexpr double kDenomFloor = 1e-300;

void reduced_objective_scalar(const ScenarioParams& p, const double* z,
                              const double* x, double* out, std::size_t n);
void dual1d_scalar(const ScenarioParams& p, const double* t, const double* z,
                   const double* x, const double* omega, double* out,
                   std::size_t n);

#if QHTSEP_HAVE_AVX2
void reduced_objective_avx2(const ScenarioParams& p, const double* z,
                            const double* x, double* out, std::size_t n);
void dual1d_avx2(const ScenarioParams& p, const double* t, const double* z,
                 const double* x, const double* omega, double* out,
                 std::size_t n);
#endif

}  // namespace qhtsep::kernels::detail
