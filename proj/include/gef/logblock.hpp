#pragma once

// Block primitives shared by the dense enumeration kernels and by the
// reference generator in tools/gen_oracle.cpp.
//
// The cross-check contract in the test suite compares integer fields exactly
// and real fields to 1e-12 relative. At n ~ 1e8 the running sum of ln k
// carries rounding noise far above one ulp of the final sums, so any two
// codes can only agree at that level if they evaluate the *same* floating
// point expressions for the per-term quantities. These primitives pin that
// convention:
//
//   ln n        : log_block() (vectorized libm log where available)
//   lf(n)       : sum_{k<=n} ln k via lf_prefix_block(), quad-chained within
//                 blocks of kLogBlock elements, blocks always starting at
//                 n = 1 + j*kLogBlock
//   membership  : t > 0.0 and t > -(delta * n), never fused into an fma
//
// Per-term t conventions (see coeffs.hpp / gen_oracle.cpp):
//   sqrt_factorial: t = n*lr - 0.5*lf(n)        (two roundings, no fma)
//   half_power:     t = n * (kappa - 0.5*ln n),  kappa = lr + 0.5*ln 2
//   table:          t = table[n] + n*lr
//
// Anything downstream of these values (accumulation order, compensation,
// argmax bookkeeping, log-sum-exp windowing) is free to differ between the
// library and the reference generator; that is where the cross-validation
// happens. Absolute accuracy of the convention itself is checked against
// high-precision fixtures at small radii (tests/fixtures/functionals_mp.csv).

#include <cmath>
#include <cstdint>

#if defined(__AVX512F__) && defined(__GLIBC__)
#include <immintrin.h>
#define GEF_MVEC_AVX512 1
extern "C" __m512d _ZGVeN8v_log(__m512d);
extern "C" __m512d _ZGVeN8v_exp(__m512d);
#endif

namespace gef::detail {

inline constexpr int kLogBlock = 8192;

// out[i] = ln(base + i) for i in [0, len).
inline void log_block(int64_t base, int len, double* out) {
    int i = 0;
#ifdef GEF_MVEC_AVX512
    const __m512d lanes = _mm512_setr_pd(0, 1, 2, 3, 4, 5, 6, 7);
    for (; i + 8 <= len; i += 8) {
        __m512d n = _mm512_add_pd(_mm512_set1_pd(double(base + i)), lanes);
        _mm512_storeu_pd(out + i, _ZGVeN8v_log(n));
    }
#endif
    for (; i < len; ++i) out[i] = std::log(double(base + i));
}

// out[i] = exp(in[i]) for i in [0, len).
inline void exp_block(const double* in, int len, double* out) {
    int i = 0;
#ifdef GEF_MVEC_AVX512
    for (; i + 8 <= len; i += 8)
        _mm512_storeu_pd(out + i, _ZGVeN8v_exp(_mm512_loadu_pd(in + i)));
#endif
    for (; i < len; ++i) out[i] = std::exp(in[i]);
}

// Running prefix lfbuf[i] = lf_in + sum_{j<=i} lnbuf[j], chained in groups of
// four so the sequential dependency is one add per four elements. The tail
// formulas mirror the in-group expressions, so a scan that stops mid-block
// produces the same lfbuf values as a longer scan over the same indices.
// Returns lfbuf[len-1].
inline double lf_prefix_block(double lf_in, const double* lnbuf, int len, double* lfbuf) {
    double c = lf_in;
    int i = 0;
    for (; i + 4 <= len; i += 4) {
        double l0 = lnbuf[i], l1 = lnbuf[i + 1], l2 = lnbuf[i + 2], l3 = lnbuf[i + 3];
        double p01 = l0 + l1;
        double q = p01 + (l2 + l3);
        lfbuf[i] = c + l0;
        lfbuf[i + 1] = c + p01;
        lfbuf[i + 2] = c + (p01 + l2);
        lfbuf[i + 3] = c + q;
        c = c + q;
    }
    int rem = len - i;
    if (rem >= 1) lfbuf[i] = c + lnbuf[i];
    if (rem >= 2) lfbuf[i + 1] = c + (lnbuf[i] + lnbuf[i + 1]);
    if (rem >= 3) lfbuf[i + 2] = c + ((lnbuf[i] + lnbuf[i + 1]) + lnbuf[i + 2]);
    return len > 0 ? lfbuf[len - 1] : lf_in;
}

}  // namespace gef::detail
