#include "backends.hpp"

#if QHTSEP_HAVE_AVX2

#include <immintrin.h>

#include <limits>

// Four-lane translation of kernels_scalar.cpp.  Every arithmetic step keeps
// the operation order of the scalar file so results match bit for bit; no
// fused multiply-adds are used for the same reason.  Tails shorter than a
// vector fall back to the scalar routines.

namespace qhtsep::kernels::detail {

namespace {

const __m256d kSign = _mm256_set1_pd(-0.0);

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(kSign, v); }

inline __m256d vge(__m256d a, __m256d b) {
    return _mm256_cmp_pd(a, b, _CMP_GE_OQ);
}

}  // namespace

void reduced_objective_avx2(const ScenarioParams& p, const double* z,
                            const double* x, double* out, std::size_t n) {
    const __m256d a = _mm256_set1_pd(1.0 - p.delta);
    const __m256d delta = _mm256_set1_pd(p.delta);
    const __m256d eps = _mm256_set1_pd(p.epsilon);
    const __m256d one_m_eps = _mm256_set1_pd(1.0 - p.epsilon);
    const __m256d c2 = _mm256_set1_pd(p.cos2t);
    const __m256d s2 = _mm256_set1_pd(p.sin2t);
    const __m256d slope = _mm256_set1_pd(p.slope);
    const __m256d mix = _mm256_set1_pd(p.mix);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d floor_v = _mm256_set1_pd(kDenomFloor);
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d zi = _mm256_loadu_pd(z + i);
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_sub_pd(a, _mm256_mul_pd(two, zi));
        const __m256d x2 = _mm256_mul_pd(xi, xi);
        const __m256d co = _mm256_add_pd(delta, _mm256_mul_pd(two, zi));
        __m256d feas = _mm256_and_pd(vge(b, zero), vge(co, zero));
        feas = _mm256_and_pd(
            feas, vge(_mm256_sub_pd(_mm256_mul_pd(a, b), x2), zero));
        feas = _mm256_and_pd(
            feas, vge(_mm256_sub_pd(_mm256_mul_pd(delta, co), x2), zero));
        const __m256d omega = vabs(
            _mm256_add_pd(_mm256_mul_pd(xi, c2), _mm256_mul_pd(zi, s2)));
        const __m256d lam = _mm256_add_pd(
            _mm256_sub_pd(a, zi),
            _mm256_sqrt_pd(_mm256_add_pd(x2, _mm256_mul_pd(zi, zi))));
        const __m256d yhat = _mm256_add_pd(b, _mm256_mul_pd(slope, vabs(xi)));
        const __m256d gap = _mm256_max_pd(_mm256_sub_pd(omega, b), floor_v);
        const __m256d v_floor = _mm256_add_pd(
            omega,
            _mm256_mul_pd(
                one_m_eps,
                _mm256_max_pd(zero,
                              _mm256_add_pd(_mm256_sub_pd(a, omega),
                                            _mm256_div_pd(x2, gap)))));
        const __m256d v_stat = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(eps, b), _mm256_mul_pd(one_m_eps, a)),
            _mm256_mul_pd(mix, vabs(xi)));
        const __m256d in_floor = _mm256_cmp_pd(yhat, omega, _CMP_LE_OQ);
        const __m256d in_stat = _mm256_cmp_pd(yhat, lam, _CMP_LE_OQ);
        __m256d v_nc = _mm256_blendv_pd(lam, v_stat, in_stat);
        v_nc = _mm256_blendv_pd(v_nc, v_floor, in_floor);
        const __m256d y1c = _mm256_max_pd(b, omega);
        const __m256d v_comm = _mm256_add_pd(
            y1c,
            _mm256_mul_pd(one_m_eps,
                          _mm256_max_pd(zero, _mm256_sub_pd(a, y1c))));
        const __m256d x_zero = _mm256_cmp_pd(xi, zero, _CMP_EQ_OQ);
        const __m256d val = _mm256_blendv_pd(v_nc, v_comm, x_zero);
        _mm256_storeu_pd(out + i, _mm256_blendv_pd(inf, val, feas));
    }
    if (i < n) reduced_objective_scalar(p, z + i, x + i, out + i, n - i);
}

void dual1d_avx2(const ScenarioParams& p, const double* t, const double* z,
                 const double* x, const double* omega, double* out,
                 std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one_m_eps = _mm256_set1_pd(1.0 - p.epsilon);
    const __m256d invphi = _mm256_set1_pd(kInvPhi);
    const __m256d invphi2 = _mm256_set1_pd(kInvPhi2);
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ti = _mm256_loadu_pd(t + i);
        const __m256d zi = _mm256_loadu_pd(z + i);
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d wi = _mm256_loadu_pd(omega + i);
        const __m256d big = _mm256_add_pd(ti, zi);
        const __m256d small = _mm256_sub_pd(ti, zi);
        const __m256d x2 = _mm256_mul_pd(xi, xi);
        __m256d feas = _mm256_and_pd(vge(big, zero), vge(one, big));
        feas = _mm256_and_pd(feas,
                             _mm256_and_pd(vge(small, zero), vge(one, small)));
        feas = _mm256_and_pd(
            feas, vge(_mm256_sub_pd(_mm256_mul_pd(big, small), x2), zero));
        feas = _mm256_and_pd(
            feas, vge(_mm256_sub_pd(_mm256_mul_pd(_mm256_sub_pd(one, big),
                                                  _mm256_sub_pd(one, small)),
                                    x2),
                      zero));
        feas = _mm256_and_pd(feas,
                             _mm256_and_pd(vge(wi, zero), vge(one, wi)));
        const __m256d floor_ = _mm256_max_pd(wi, small);

        __m256d val;
        if (p.eps_is_one) {
            val = floor_;
        } else {
            auto h = [&](__m256d y) {
                const __m256d hy = _mm256_mul_pd(half, y);
                const __m256d zh = _mm256_sub_pd(zi, hy);
                const __m256d mu = _mm256_add_pd(
                    _mm256_sub_pd(ti, hy),
                    _mm256_sqrt_pd(
                        _mm256_add_pd(_mm256_mul_pd(zh, zh), x2)));
                return _mm256_add_pd(_mm256_max_pd(wi, mu),
                                     _mm256_mul_pd(one_m_eps, y));
            };
            const __m256d g0 = _mm256_max_pd(
                wi, _mm256_add_pd(
                        ti, _mm256_sqrt_pd(
                                _mm256_add_pd(_mm256_mul_pd(zi, zi), x2))));
            __m256d lo = zero;
            __m256d hi = _mm256_div_pd(_mm256_sub_pd(g0, floor_), one_m_eps);
            __m256d c =
                _mm256_add_pd(lo, _mm256_mul_pd(invphi2, _mm256_sub_pd(hi, lo)));
            __m256d d =
                _mm256_add_pd(lo, _mm256_mul_pd(invphi, _mm256_sub_pd(hi, lo)));
            __m256d fc = h(c);
            __m256d fd = h(d);
            for (int it = 0; it < kGoldenIters; ++it) {
                const __m256d take = _mm256_cmp_pd(fc, fd, _CMP_LT_OQ);
                hi = _mm256_blendv_pd(hi, d, take);
                lo = _mm256_blendv_pd(c, lo, take);
                c = _mm256_add_pd(lo,
                                  _mm256_mul_pd(invphi2, _mm256_sub_pd(hi, lo)));
                d = _mm256_add_pd(lo,
                                  _mm256_mul_pd(invphi, _mm256_sub_pd(hi, lo)));
                fc = h(c);
                fd = h(d);
            }
            const __m256d ym = _mm256_mul_pd(half, _mm256_add_pd(lo, hi));
            val = _mm256_min_pd(h(ym), g0);
        }
        _mm256_storeu_pd(out + i, _mm256_blendv_pd(inf, val, feas));
    }
    if (i < n)
        dual1d_scalar(p, t + i, z + i, x + i, omega + i, out + i, n - i);
}

}  // namespace qhtsep::kernels::detail

#endif  // QHTSEP_HAVE_AVX2
