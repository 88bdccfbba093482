#include <cmath>
#include <limits>

#include "backends.hpp"

// Reference implementation.  The AVX2 backend mirrors the operation order of
// this file exactly; keep the two in sync when changing either.

namespace qhtsep::kernels::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void reduced_objective_scalar(const ScenarioParams& p, const double* z,
                              const double* x, double* out, std::size_t n) {
    const double a = 1.0 - p.delta;  // t + z, fixed by saturating the fidelity
    const double one_m_eps = 1.0 - p.epsilon;
    // The value is assembled per branch instead of through the generic
    // f(y1) formula: at the stationary point and at the top eigenvalue the
    // formula collapses to exact identities, and evaluating it naively there
    // loses up to ~1e-9 to cancellation when x is tiny and z negative.
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = z[i];
        const double xi = x[i];
        const double b = a - 2.0 * zi;  // t - z
        const double x2 = xi * xi;
        const double co = p.delta + 2.0 * zi;  // 1 - (t - z)
        const bool feas = b >= 0.0 && co >= 0.0 && a * b - x2 >= 0.0 &&
                          p.delta * co - x2 >= 0.0;
        const double omega = std::abs(xi * p.cos2t + zi * p.sin2t);
        const double lam = (a - zi) + std::sqrt(x2 + zi * zi);
        const double yhat = b + p.slope * std::abs(xi);
        const double gap = std::max(omega - b, kDenomFloor);
        const double v_floor =
            omega + one_m_eps * std::max(0.0, (a - omega) + x2 / gap);
        const double v_stat =
            p.epsilon * b + one_m_eps * a + p.mix * std::abs(xi);
        const double v_nc = yhat <= omega ? v_floor
                            : yhat <= lam ? v_stat
                                          : lam;
        const double y1c = std::max(b, omega);
        const double v_comm = y1c + one_m_eps * std::max(0.0, a - y1c);
        const double val = xi == 0.0 ? v_comm : v_nc;
        out[i] = feas ? val : kInf;
    }
}

void dual1d_scalar(const ScenarioParams& p, const double* t, const double* z,
                   const double* x, const double* omega, double* out,
                   std::size_t n) {
    const double one_m_eps = 1.0 - p.epsilon;
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = t[i];
        const double zi = z[i];
        const double xi = x[i];
        const double wi = omega[i];
        const double big = ti + zi;
        const double small = ti - zi;
        const double x2 = xi * xi;
        const bool feas = big >= 0.0 && big <= 1.0 && small >= 0.0 &&
                          small <= 1.0 && big * small - x2 >= 0.0 &&
                          (1.0 - big) * (1.0 - small) - x2 >= 0.0 &&
                          wi >= 0.0 && wi <= 1.0;
        const double floor = std::max(wi, small);  // value of the compression
        double val;
        if (p.eps_is_one) {
            val = floor;
        } else {
            auto h = [&](double y) {
                const double half = 0.5 * y;
                const double zh = zi - half;
                const double mu = (ti - half) + std::sqrt(zh * zh + x2);
                return std::max(wi, mu) + one_m_eps * y;
            };
            const double g0 = std::max(wi, ti + std::sqrt(zi * zi + x2));
            double lo = 0.0;
            double hi = (g0 - floor) / one_m_eps;
            double c = lo + kInvPhi2 * (hi - lo);
            double d = lo + kInvPhi * (hi - lo);
            double fc = h(c);
            double fd = h(d);
            for (int it = 0; it < kGoldenIters; ++it) {
                const bool take = fc < fd;
                hi = take ? d : hi;
                lo = take ? lo : c;
                c = lo + kInvPhi2 * (hi - lo);
                d = lo + kInvPhi * (hi - lo);
                fc = h(c);
                fd = h(d);
            }
            val = std::min(h(0.5 * (lo + hi)), g0);
        }
        out[i] = feas ? val : kInf;
    }
}

}  // namespace qhtsep::kernels::detail
