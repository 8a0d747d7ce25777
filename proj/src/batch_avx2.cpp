#include "nfield/batch.hpp"

#if defined(NFIELD_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))

#include <immintrin.h>

#include <cmath>

// AVX2+FMA variants. Compiled with -mavx2 -mfma for this TU only; callers
// reach it through the dispatch table after a CPUID check.

namespace nf::batch {
namespace {

// ---- vector exp ----------------------------------------------------------
//
// e^x = 2^k * e^r with k = round(x*log2(e)), r = x - k*ln2 (Cody-Waite).
// |r| <= ln2/2, Taylor through r^13/13! (truncation < 5e-18 relative).
// 2^k applied as two half-shifts so k in [-2044, 2046] is safe.
// Underflow (x < ln(2^-1022)) flushes to zero rather than producing
// denormals; overflow saturates to +inf.

const __m256d kExpHi = _mm256_set1_pd(709.782712893383973096);
const __m256d kExpLo = _mm256_set1_pd(-708.396418532264106224);
const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634074);
const __m256d kLn2Hi = _mm256_set1_pd(6.93145751953125e-1);
const __m256d kLn2Lo = _mm256_set1_pd(1.42860682030941723212e-6);

const double kExpCoef[12] = {
    5.0000000000000000e-01, 1.6666666666666666e-01, 4.1666666666666667e-02,
    8.3333333333333333e-03, 1.3888888888888889e-03, 1.9841269841269841e-04,
    2.4801587301587302e-05, 2.7557319223985891e-06, 2.7557319223985888e-07,
    2.5052108385441719e-08, 2.0876756987868099e-09, 1.6059043836821613e-10,
};

inline __m256d pow2_i32(__m128i k) {
    const __m256i wide = _mm256_cvtepi32_epi64(k);
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(wide, _mm256_set1_epi64x(1023)), 52);
    return _mm256_castsi256_pd(bits);
}

inline __m256d exp4(__m256d x) {
    const __m256d too_hi = _mm256_cmp_pd(x, kExpHi, _CMP_GT_OQ);
    const __m256d too_lo = _mm256_cmp_pd(x, kExpLo, _CMP_LT_OQ);
    const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, kExpLo), kExpHi);

    const __m128i k = _mm256_cvtpd_epi32(_mm256_mul_pd(xc, kLog2e));
    const __m256d kd = _mm256_cvtepi32_pd(k);
    __m256d r = _mm256_fnmadd_pd(kd, kLn2Hi, xc);
    r = _mm256_fnmadd_pd(kd, kLn2Lo, r);

    __m256d p = _mm256_set1_pd(kExpCoef[11]);
    for (int i = 10; i >= 0; --i)
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kExpCoef[i]));
    p = _mm256_fmadd_pd(p, _mm256_mul_pd(r, r), _mm256_add_pd(r, _mm256_set1_pd(1.0)));

    const __m128i k1 = _mm_srai_epi32(k, 1);
    const __m128i k2 = _mm_sub_epi32(k, k1);
    p = _mm256_mul_pd(_mm256_mul_pd(p, pow2_i32(k1)), pow2_i32(k2));

    p = _mm256_blendv_pd(p, _mm256_setzero_pd(), too_lo);
    p = _mm256_blendv_pd(p, _mm256_set1_pd(HUGE_VAL), too_hi);
    return p;
}

// ---- vector sincos -------------------------------------------------------
//
// Reduction x = r + k*pi/2 with the fdlibm 33-bit split of pi/2; accurate
// for |x| <= 1e5. sin/cos on |r| <= pi/4 via Taylor in r^2.

const __m256d kTwoOverPi = _mm256_set1_pd(0.63661977236758134308);
const __m256d kPio2A = _mm256_set1_pd(1.57079632673412561417e+00);
const __m256d kPio2B = _mm256_set1_pd(6.07710050650619224932e-11);

const double kSinCoef[7] = {
    -1.6666666666666666e-01, 8.3333333333333333e-03, -1.9841269841269841e-04,
    2.7557319223985891e-06, -2.5052108385441719e-08, 1.6059043836821613e-10,
    -7.6471637318198164e-13,
};
const double kCosCoef[8] = {
    -5.0000000000000000e-01, 4.1666666666666667e-02, -1.3888888888888889e-03,
    2.4801587301587302e-05, -2.7557319223985888e-07, 2.0876756987868099e-09,
    -1.1470745597729725e-11, 4.7794773323873853e-14,
};

inline void sincos4(__m256d x, __m256d* sin_out, __m256d* cos_out) {
    const __m128i k = _mm256_cvtpd_epi32(_mm256_mul_pd(x, kTwoOverPi));
    const __m256d kd = _mm256_cvtepi32_pd(k);
    __m256d r = _mm256_fnmadd_pd(kd, kPio2A, x);
    r = _mm256_fnmadd_pd(kd, kPio2B, r);

    const __m256d z = _mm256_mul_pd(r, r);

    __m256d ps = _mm256_set1_pd(kSinCoef[6]);
    for (int i = 5; i >= 0; --i)
        ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kSinCoef[i]));
    const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(ps, z), r, r);

    __m256d pc = _mm256_set1_pd(kCosCoef[7]);
    for (int i = 6; i >= 0; --i)
        pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kCosCoef[i]));
    const __m256d cos_r = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0));

    // quadrant logic: swap when k odd, negate per quadrant
    const __m128i q = _mm_and_si128(k, _mm_set1_epi32(3));
    const __m256d swap = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(
        _mm_cmpeq_epi32(_mm_and_si128(q, _mm_set1_epi32(1)), _mm_set1_epi32(1))));
    const __m256d neg_sin = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(
        _mm_cmpeq_epi32(_mm_and_si128(q, _mm_set1_epi32(2)), _mm_set1_epi32(2))));
    const __m256d neg_cos = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(
        _mm_and_si128(_mm_add_epi32(q, _mm_set1_epi32(1)), _mm_set1_epi32(2)),
        _mm_set1_epi32(2))));

    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d s = _mm256_blendv_pd(sin_r, cos_r, swap);
    __m256d c = _mm256_blendv_pd(cos_r, sin_r, swap);
    s = _mm256_xor_pd(s, _mm256_and_pd(sign, neg_sin));
    c = _mm256_xor_pd(c, _mm256_and_pd(sign, neg_cos));
    *sin_out = s;
    *cos_out = c;
}

// ---- batch entry points --------------------------------------------------

void exp_avx2(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = std::exp(x[i]);
}

void sincos_avx2(const double* x, double* s, double* c, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vs, vc;
        sincos4(_mm256_loadu_pd(x + i), &vs, &vc);
        _mm256_storeu_pd(s + i, vs);
        _mm256_storeu_pd(c + i, vc);
    }
    for (; i < n; ++i) {
        s[i] = std::sin(x[i]);
        c[i] = std::cos(x[i]);
    }
}

void periodized_sum_avx2(const ExpFamily& fam, double T, const double* x,
                         double* out, std::size_t n) {
    __m256d S[2], ms[2], inv_den[2];
    const __m256d vT = _mm256_set1_pd(T);
    for (int c = 0; c < fam.ncomp; ++c) {
        S[c] = _mm256_set1_pd(fam.S[c]);
        ms[c] = _mm256_set1_pd(-fam.s[c]);
        inv_den[c] = _mm256_set1_pd(1.0 / (1.0 - std::exp(-fam.s[c] * T)));
    }
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d xr = _mm256_sub_pd(vT, xv);
        __m256d acc = _mm256_setzero_pd();
        for (int c = 0; c < fam.ncomp; ++c) {
            const __m256d e1 = exp4(_mm256_mul_pd(ms[c], xv));
            const __m256d e2 = exp4(_mm256_mul_pd(ms[c], xr));
            acc = _mm256_fmadd_pd(_mm256_mul_pd(S[c], inv_den[c]),
                                  _mm256_add_pd(e1, e2), acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    if (i < n)
        detail::scalar_vtable().periodized_sum_v(fam, T, x + i, out + i, n - i);
}

void periodized_integral_avx2(const ExpFamily& fam, double T, const double* x,
                              double* out, std::size_t n) {
    __m256d S[2], ms[2], one_m_emT[2], inv_sden[2];
    const __m256d vT = _mm256_set1_pd(T);
    for (int c = 0; c < fam.ncomp; ++c) {
        const double emT = std::exp(-fam.s[c] * T);
        S[c] = _mm256_set1_pd(fam.S[c]);
        ms[c] = _mm256_set1_pd(-fam.s[c]);
        one_m_emT[c] = _mm256_set1_pd(1.0 - emT);
        inv_sden[c] = _mm256_set1_pd(1.0 / (fam.s[c] * (1.0 - emT)));
    }
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d xr = _mm256_sub_pd(vT, xv);
        __m256d acc = _mm256_setzero_pd();
        for (int c = 0; c < fam.ncomp; ++c) {
            const __m256d e1 = exp4(_mm256_mul_pd(ms[c], xv));
            const __m256d e2 = exp4(_mm256_mul_pd(ms[c], xr));
            const __m256d num =
                _mm256_add_pd(_mm256_sub_pd(e2, e1), one_m_emT[c]);
            acc = _mm256_fmadd_pd(_mm256_mul_pd(S[c], inv_sden[c]), num, acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    if (i < n)
        detail::scalar_vtable().periodized_integral_v(fam, T, x + i, out + i, n - i);
}

void symbol_branches_avx2(const BranchConsts& bc, const double* theta,
                          double* l1, double* l2, std::size_t n) {
    __m256d cosh_sT[2], diag[2], off_cos[2], off_const[2];
    for (int c = 0; c < bc.ncomp; ++c) {
        cosh_sT[c] = _mm256_set1_pd(bc.cosh_sT[c]);
        diag[c] = _mm256_set1_pd(bc.diag[c]);
        off_cos[c] = _mm256_set1_pd(bc.off_cos[c]);
        off_const[c] = _mm256_set1_pd(bc.off_const[c]);
    }
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d st, ct;
        sincos4(_mm256_loadu_pd(theta + i), &st, &ct);
        __m256d d = _mm256_setzero_pd();
        __m256d re = _mm256_setzero_pd();
        __m256d im = _mm256_setzero_pd();
        for (int c = 0; c < bc.ncomp; ++c) {
            const __m256d inv = _mm256_div_pd(one, _mm256_sub_pd(cosh_sT[c], ct));
            d = _mm256_fmadd_pd(diag[c], inv, d);
            re = _mm256_fmadd_pd(_mm256_fmadd_pd(off_cos[c], ct, off_const[c]), inv, re);
            im = _mm256_fnmadd_pd(_mm256_mul_pd(off_cos[c], st), inv, im);
        }
        const __m256d mag = _mm256_sqrt_pd(
            _mm256_fmadd_pd(re, re, _mm256_mul_pd(im, im)));
        _mm256_storeu_pd(l1 + i, _mm256_sub_pd(d, mag));
        _mm256_storeu_pd(l2 + i, _mm256_add_pd(d, mag));
    }
    if (i < n)
        detail::scalar_vtable().symbol_branches_v(bc, theta + i, l1 + i, l2 + i, n - i);
}

} // namespace

namespace detail {

const Vtable& avx2_vtable() {
    static const Vtable vt = {
        exp_avx2,
        sincos_avx2,
        periodized_sum_avx2,
        periodized_integral_avx2,
        symbol_branches_avx2,
    };
    return vt;
}

} // namespace detail
} // namespace nf::batch

#endif // NFIELD_HAVE_AVX2 && x86-64
