#include "qhtsep/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "backends.hpp"

namespace qhtsep::kernels {

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if QHTSEP_HAVE_AVX2
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return "scalar";
        case Backend::Avx2:
            return "avx2";
    }
    return "unknown";
}

namespace {
Backend g_backend =
    backend_supported(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw std::invalid_argument("set_backend: backend not supported here");
    g_backend = b;
}

ScenarioParams::ScenarioParams(double theta_, double delta_, double epsilon_)
    : theta(theta_), delta(delta_), epsilon(epsilon_) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("ScenarioParams: epsilon must lie in (0, 1]");
    cos2t = std::cos(2.0 * theta);
    sin2t = std::sin(2.0 * theta);
    eps_is_one = (epsilon == 1.0);
    slope = eps_is_one ? 0.0 : std::sqrt((1.0 - epsilon) / epsilon);
    mix = 2.0 * std::sqrt(epsilon * (1.0 - epsilon));
}

void reduced_objective_batch(const ScenarioParams& p, const double* z,
                             const double* x, double* out, std::size_t n) {
#if QHTSEP_HAVE_AVX2
    if (g_backend == Backend::Avx2) {
        detail::reduced_objective_avx2(p, z, x, out, n);
        return;
    }
#endif
    detail::reduced_objective_scalar(p, z, x, out, n);
}

void dual1d_batch(const ScenarioParams& p, const double* t, const double* z,
                  const double* x, const double* omega, double* out,
                  std::size_t n) {
#if QHTSEP_HAVE_AVX2
    if (g_backend == Backend::Avx2) {
        detail::dual1d_avx2(p, t, z, x, omega, out, n);
        return;
    }
#endif
    detail::dual1d_scalar(p, t, z, x, omega, out, n);
}

}  // namespace qhtsep::kernels
