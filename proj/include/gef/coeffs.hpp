#pragma once

// Deterministic coefficient sequences a_n (stored as ln|a_n|) and the radial
// functionals N, N_delta, m, m_delta, s, mu, nu, S^2 at a given r.
//
// functionals() enumerates supported indices term by term up to the cutoff
// where ln|a_n| + n(ln r + delta) < -50 holds for every later supported
// index. Above an index budget where enumeration stops being practical
// (default 4e8 terms) it switches to closed forms for the two dense builtin
// families: the membership boundaries are located by monotone search, the
// factorial-type sums go through the Barnes G asymptotic, and ln S^2 is a
// windowed log-sum-exp around the maximal term. Both paths are checked
// against each other and against reference fixtures in the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "gef/common.hpp"
#include "gef/logblock.hpp"

namespace gef {

enum class Family { sqrt_factorial, half_power, gap_half_power, table };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::sqrt_factorial: return "sqrt_factorial";
        case Family::half_power: return "half_power";
        case Family::gap_half_power: return "gap_half_power";
        case Family::table: return "table";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    if (s == "sqrt_factorial") return Family::sqrt_factorial;
    if (s == "half_power") return Family::half_power;
    if (s == "gap_half_power") return Family::gap_half_power;
    if (s == "table") return Family::table;
    throw DomainError("unknown family: " + s);
}

// Support of the gap family: {0} together with n_k = [e^k] + 1, k = 0..40.
// Frozen from exact integer floors of e^k (the values must be exact; a long
// double exponential would start to round near the top of this range).
inline constexpr std::array<int64_t, 41> kGapSupport = {
    2LL, 3LL, 8LL, 21LL, 55LL, 149LL, 404LL, 1097LL, 2981LL, 8104LL, 22027LL,
    59875LL, 162755LL, 442414LL, 1202605LL, 3269018LL, 8886111LL, 24154953LL,
    65659970LL, 178482301LL, 485165196LL, 1318815735LL, 3584912847LL,
    9744803447LL, 26489122130LL, 72004899338LL, 195729609429LL,
    532048240602LL, 1446257064292LL, 3931334297145LL, 10686474581525LL,
    29048849665248LL, 78962960182681LL, 214643579785917LL, 583461742527455LL,
    1586013452313431LL, 4311231547115196LL, 11719142372802612LL,
    31855931757113757LL, 86593400423993747LL, 235385266837019986LL};

struct LogCoefficientSequence {
    Family family = Family::sqrt_factorial;
    std::vector<double> log_magnitude;  // table family: ln|a_n| by index, -inf for gaps
    int64_t support_horizon_hint = -1;  // table family: last stored index
    std::string metadata;

    static LogCoefficientSequence sqrt_factorial() { return {Family::sqrt_factorial, {}, -1, "psi"}; }
    static LogCoefficientSequence half_power() { return {Family::half_power, {}, -1, ""}; }
    static LogCoefficientSequence gap_half_power() { return {Family::gap_half_power, {}, -1, ""}; }
    static LogCoefficientSequence from_table(std::vector<double> lm, std::string label = "") {
        LogCoefficientSequence s;
        s.family = Family::table;
        s.support_horizon_hint = int64_t(lm.size()) - 1;
        s.log_magnitude = std::move(lm);
        s.metadata = std::move(label);
        return s;
    }
};

namespace detail {

inline double lnfact(double n) {  // ln(n!)
#ifdef __GLIBC__
    int sign;
    return ::lgamma_r(n + 1.0, &sign);
#else
    return std::lgamma(n + 1.0);
#endif
}

inline double half_power_lm(int64_t n) {
    if (n == 0) return 0.0;
    double u = 0.5 * double(n);
    return -(u * std::log(u));
}

inline bool gap_supported(int64_t n) {
    if (n == 0) return true;
    return std::binary_search(kGapSupport.begin(), kGapSupport.end(), n);
}

}  // namespace detail

inline double log_coeff(const LogCoefficientSequence& seq, int64_t n) {
    if (n < 0) throw DomainError("log_coeff: n must be >= 0");
    switch (seq.family) {
        case Family::sqrt_factorial:
            return n == 0 ? 0.0 : -0.5 * detail::lnfact(double(n));
        case Family::half_power:
            return detail::half_power_lm(n);
        case Family::gap_half_power:
            if (n > kGapSupport.back())
                throw DomainError("gap_half_power: index beyond the exact support table");
            return detail::gap_supported(n) ? detail::half_power_lm(n) : kNegInf;
        case Family::table:
            if (n >= int64_t(seq.log_magnitude.size()))
                throw TableHorizonError("table: index beyond stored horizon");
            return seq.log_magnitude[size_t(n)];
    }
    throw DomainError("log_coeff: bad family");
}

struct IndexRange {
    int64_t lo = 0, hi = 0;  // inclusive
    bool operator==(const IndexRange&) const = default;
};

struct RadialFunctionals {
    double r = 0.0;
    double delta = 0.0;
    int64_t N = 0, N_delta = 0;
    int64_t m = 0, m_delta = 0;
    bool m_saturated = false, m_delta_saturated = false;
    double s_half = 0.0, s = 0.0;
    double ln_mu = kNegInf;
    int64_t nu = 0;
    double ln_S_sq = kNegInf;
    std::vector<IndexRange> members_N, members_N_delta;
    bool closed_form = false;
};

inline constexpr int64_t kDefaultEnumBudget = 400'000'000;

namespace detail {

// ---- dense enumeration kernel ---------------------------------------------

struct RangeBuilder {
    bool in = false;
    std::vector<IndexRange>* out = nullptr;
    void step(int64_t n, bool now) {
        if (now == in) return;
        if (now)
            out->push_back({n, n});
        else
            out->back().hi = n - 1;
        in = now;
    }
    void finish(int64_t last) {
        if (in) {
            out->back().hi = last;
            in = false;
        }
    }
};

struct BlockStats {
    double s_blk = 0.0;
    double tmax_blk = kNegInf;
    int64_t cnt = 0, m_blk = 0;
    int64_t cntd = 0, md_blk = 0;
};

// Membership and accumulation over one block of per-term values tbuf.
// Predicates: n in N(r) iff t > 0; n in N_delta(r) iff t > -(delta*n).
inline BlockStats scan_conditions(const double* tbuf, int64_t base, int len, double delta) {
    BlockStats st;
    int i = 0;
#ifdef GEF_MVEC_AVX512
    __m512d vs = _mm512_setzero_pd();
    __m512d vmax = _mm512_set1_pd(kNegInf);
    __m512i vm = _mm512_setzero_si512();
    __m512i vmd = _mm512_setzero_si512();
    const __m512i lanes64 = _mm512_setr_epi64(0, 1, 2, 3, 4, 5, 6, 7);
    const __m512d lanesd = _mm512_setr_pd(0, 1, 2, 3, 4, 5, 6, 7);
    const __m512d vmdelta = _mm512_set1_pd(-delta);
    const __m512d vzero = _mm512_setzero_pd();
    for (; i + 8 <= len; i += 8) {
        __m512d vt = _mm512_loadu_pd(tbuf + i);
        __m512i vn = _mm512_add_epi64(_mm512_set1_epi64(base + i), lanes64);
        __m512d vnd = _mm512_add_pd(_mm512_set1_pd(double(base + i)), lanesd);
        __mmask8 kin = _mm512_cmp_pd_mask(vt, vzero, _CMP_GT_OQ);
        __mmask8 kd = _mm512_cmp_pd_mask(vt, _mm512_mul_pd(vnd, vmdelta), _CMP_GT_OQ);
        vs = _mm512_mask_add_pd(vs, kin, vs, vt);
        vm = _mm512_mask_add_epi64(vm, kin, vm, vn);
        vmd = _mm512_mask_add_epi64(vmd, kd, vmd, vn);
        vmax = _mm512_max_pd(vmax, vt);
        st.cnt += __builtin_popcount(unsigned(kin));
        st.cntd += __builtin_popcount(unsigned(kd));
    }
    st.s_blk = _mm512_reduce_add_pd(vs);
    st.m_blk = _mm512_reduce_add_epi64(vm);
    st.md_blk = _mm512_reduce_add_epi64(vmd);
    st.tmax_blk = _mm512_reduce_max_pd(vmax);
#endif
    for (; i < len; ++i) {
        double t = tbuf[i];
        int64_t n = base + i;
        if (t > 0.0) {
            st.s_blk += t;
            st.cnt++;
            st.m_blk += n;
        }
        if (t > -(delta * double(n))) {
            st.cntd++;
            st.md_blk += n;
        }
        st.tmax_blk = std::max(st.tmax_blk, t);
    }
    return st;
}

// Per-family per-block term evaluation. lnbuf holds ln(base+i); for
// sqrt_factorial lfbuf holds the canonical running prefix of ln k.
struct PsiTerms {
    double lr;
    static constexpr bool needs_prefix = true;
    void fill(int64_t base, int len, const double* lnbuf, const double* lfbuf, double* tbuf) const {
        (void)lnbuf;
        for (int i = 0; i < len; ++i) tbuf[i] = double(base + i) * lr - 0.5 * lfbuf[i];
    }
};

struct HalfPowerTerms {
    double kappa;  // lr + 0.5*ln 2
    static constexpr bool needs_prefix = false;
    void fill(int64_t base, int len, const double* lnbuf, const double*, double* tbuf) const {
        for (int i = 0; i < len; ++i) tbuf[i] = double(base + i) * (kappa - 0.5 * lnbuf[i]);
    }
};

struct TableTerms {
    double lr;
    const double* lm;
    static constexpr bool needs_prefix = false;
    void fill(int64_t base, int len, const double*, const double*, double* tbuf) const {
        for (int i = 0; i < len; ++i) tbuf[i] = lm[base + i] + double(base + i) * lr;
    }
};

template <class Terms>
void functionals_dense(const Terms& terms, int64_t n_cut, double delta, double t0, bool has_a0,
                       RadialFunctionals& out) {
    const int B = kLogBlock;
    std::vector<double> lnbuf(B), lfbuf(B), tbuf(B), ebuf(B);
    int64_t nblocks = n_cut > 0 ? (n_cut - 1) / B + 1 : 0;
    std::vector<double> ckpt;
    std::vector<double> blockmax(size_t(nblocks), kNegInf);
    if constexpr (Terms::needs_prefix) ckpt.reserve(size_t(nblocks));

    Kahan s_acc;
    int64_t N = 0, m = 0, Nd = 0, md = 0;
    double tmax = kNegInf;
    int64_t nu = 0;
    RangeBuilder rb{false, &out.members_N}, rbd{false, &out.members_N_delta};

    if (has_a0) {
        tmax = t0;
        nu = 0;
        if (t0 > 0.0) {
            s_acc.add(t0);
            N++;
            rb.step(0, true);
            rbd.step(0, true);
            Nd++;
        }
    }

    double lf = 0.0;
    for (int64_t base = 1; base <= n_cut; base += B) {
        int len = int(std::min<int64_t>(B, n_cut - base + 1));
        log_block(base, len, lnbuf.data());
        if constexpr (Terms::needs_prefix) {
            ckpt.push_back(lf);
            lf = lf_prefix_block(lf, lnbuf.data(), len, lfbuf.data());
        }
        terms.fill(base, len, lnbuf.data(), lfbuf.data(), tbuf.data());
        BlockStats st = scan_conditions(tbuf.data(), base, len, delta);
        blockmax[size_t((base - 1) / B)] = st.tmax_blk;

        if (st.tmax_blk >= tmax) {
            for (int i = 0; i < len; ++i)
                if (tbuf[i] >= tmax) {
                    tmax = tbuf[i];
                    nu = base + i;
                }
        }
        bool mixed = st.cnt != 0 && st.cnt != len;
        if (mixed || (st.cnt == len) != rb.in)
            for (int i = 0; i < len; ++i) rb.step(base + i, tbuf[i] > 0.0);
        bool mixedd = st.cntd != 0 && st.cntd != len;
        if (mixedd || (st.cntd == len) != rbd.in)
            for (int i = 0; i < len; ++i)
                rbd.step(base + i, tbuf[i] > -(delta * double(base + i)));

        s_acc.add(st.s_blk);
        N += st.cnt;
        m += st.m_blk;
        Nd += st.cntd;
        md += st.md_blk;
    }
    rb.finish(n_cut);
    rbd.finish(n_cut);

    // ln S^2 = ln sum exp(x_n), x_n = 2 t_n: second sweep, skipping blocks
    // whose whole mass is below e^-45 of the peak term.
    double x_peak = 2.0 * tmax;
    Kahan acc;
    if (has_a0) acc.add(std::exp(2.0 * t0 - x_peak));
    if (tmax != kNegInf) {
        for (int64_t base = 1; base <= n_cut; base += B) {
            size_t b = size_t((base - 1) / B);
            int len = int(std::min<int64_t>(B, n_cut - base + 1));
            if (2.0 * blockmax[b] - x_peak < -45.0 - std::log(double(len))) continue;
            log_block(base, len, lnbuf.data());
            if constexpr (Terms::needs_prefix) lf_prefix_block(ckpt[b], lnbuf.data(), len, lfbuf.data());
            terms.fill(base, len, lnbuf.data(), lfbuf.data(), tbuf.data());
            for (int i = 0; i < len; ++i) tbuf[i] = 2.0 * tbuf[i] - x_peak;
            exp_block(tbuf.data(), len, ebuf.data());
            double blk = 0.0;
            for (int i = 0; i < len; ++i) blk += ebuf[i];
            acc.add(blk);
        }
        out.ln_S_sq = x_peak + std::log(acc.value());
    }

    out.N = N;
    out.N_delta = Nd;
    out.m = m;
    out.m_delta = md;
    out.s_half = s_acc.value();
    out.s = 2.0 * out.s_half;
    out.ln_mu = tmax;
    out.nu = nu;
}

// ---- closed forms ----------------------------------------------------------

// ln G(z+1) with G the Barnes function, so ln G(M+2) = sum_{n<=M} ln n!.
inline double ln_barnesG1(double z) {
    if (z < 8.0) {
        double acc = 0.0;  // ln G(z+1) = sum_{k=1}^{z-1} ln k! for integer z
        double lf = 0.0;
        for (int k = 1; k + 1 <= int(z); ++k) {
            lf += std::log(double(k));
            acc += lf;
        }
        return acc;
    }
    constexpr double lnA = 0.2487544770337842625425;  // 1/12 - zeta'(-1)
    double z2 = z * z;
    double lz = std::log(z);
    double s = 0.25 * z2 + z * lnfact(z) - (0.5 * z * (z + 1.0) + 1.0 / 12.0) * lz - lnA;
    double iz2 = 1.0 / z2;
    s += iz2 * (-1.0 / 720.0 + iz2 * (1.0 / 5040.0 - iz2 / 10080.0));
    return s;
}

// sum_{n<=M} ln n!  and  sum_{n<=M} n ln n (log-hyperfactorial)
inline double sum_lnfact(double M) { return ln_barnesG1(M + 1.0); }
inline double sum_nlnn(double M) { return M * lnfact(M) - ln_barnesG1(M); }

// Largest integer n in [1, hi_bound] with pred(n) true, where pred is true on
// a prefix-after-1 region and false beyond (unimodal-boundary search).
template <class Pred>
int64_t last_true(int64_t lo, int64_t hi, Pred pred) {
    // invariant: pred(lo) true, pred(hi) false
    while (hi - lo > 1) {
        int64_t mid = lo + (hi - lo) / 2;
        if (pred(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

struct ClosedTerm {
    // scalar per-index t with the same shape as the dense kernels
    Family fam;
    double lr, kappa;
    double operator()(int64_t n) const {
        if (fam == Family::sqrt_factorial) return double(n) * lr - 0.5 * lnfact(double(n));
        return double(n) * (kappa - 0.5 * std::log(double(n)));
    }
};

inline int64_t checked_tri_sum(int64_t a, int64_t b, bool& saturated) {
    // sum of indices a..b
    __int128 cnt = b - a + 1;
    __int128 tot = (__int128(a) + b) * cnt / 2;
    if (tot > __int128(INT64_MAX)) {
        saturated = true;
        return INT64_MAX;
    }
    return int64_t(tot);
}

inline double windowed_ln_S_sq(Family fam, double lr, double kappa, int64_t nu) {
    // stream x(n) = 2 t(n) over an adaptive window around nu; anchor the
    // factorial prefix once with lgamma and extend with the block primitives.
    ClosedTerm term{fam, lr, kappa};
    int64_t W = int64_t(std::sqrt(120.0 * double(std::max<int64_t>(nu, 4)))) + 256;
    double x_nu = 2.0 * term(nu);
    while (true) {
        double xl = 2.0 * term(std::max<int64_t>(1, nu - W));
        double xr = 2.0 * term(nu + W);
        if ((nu - W <= 1 || xl < x_nu - 55.0) && xr < x_nu - 55.0) break;
        W *= 2;
        if (W > (int64_t(1) << 40)) throw AccuracyError("ln_S_sq window failed to close");
    }
    int64_t n0 = std::max<int64_t>(1, nu - W), n1 = nu + W;
    const int B = kLogBlock;
    std::vector<double> lnbuf(B), lfbuf(B), tbuf(B), ebuf(B);
    // pass 1: window max of x (the anchored prefix may shift values coherently)
    double lf0 = fam == Family::sqrt_factorial ? lnfact(double(n0 - 1)) : 0.0;
    double x_peak = kNegInf;
    for (int pass = 0; pass < 2; ++pass) {
        double lf = lf0;
        Kahan acc;
        for (int64_t base = n0; base <= n1; base += B) {
            int len = int(std::min<int64_t>(B, n1 - base + 1));
            log_block(base, len, lnbuf.data());
            if (fam == Family::sqrt_factorial) {
                lf = lf_prefix_block(lf, lnbuf.data(), len, lfbuf.data());
                for (int i = 0; i < len; ++i)
                    tbuf[i] = 2.0 * (double(base + i) * lr - 0.5 * lfbuf[i]);
            } else {
                for (int i = 0; i < len; ++i)
                    tbuf[i] = 2.0 * (double(base + i) * (kappa - 0.5 * lnbuf[i]));
            }
            if (pass == 0) {
                for (int i = 0; i < len; ++i) x_peak = std::max(x_peak, tbuf[i]);
            } else {
                for (int i = 0; i < len; ++i) tbuf[i] -= x_peak;
                exp_block(tbuf.data(), len, ebuf.data());
                double blk = 0.0;
                for (int i = 0; i < len; ++i) blk += ebuf[i];
                acc.add(blk);
            }
        }
        if (pass == 1) return x_peak + std::log(acc.value());
    }
    return kNegInf;  // unreachable
}

inline void functionals_closed(Family fam, double r, double delta, RadialFunctionals& out) {
    double lr = std::log(r);
    double kappa = lr + 0.5 * std::numbers::ln2_v<double>;
    ClosedTerm term{fam, lr, kappa};
    out.closed_form = true;

    // membership boundary: t is concave in n with t -> -inf, so {t > 0} is a
    // prefix 1..n_plus once t(1) > 0 (guaranteed here: closed form only
    // engages at large r).
    auto boundary = [&](double shift) {
        // largest n with t(n) + shift*n > 0
        auto pred = [&](int64_t n) { return term(n) > -(shift * double(n)); };
        if (!pred(1)) return int64_t(0);
        int64_t hi = 16;
        while (pred(hi)) {
            if (hi > (int64_t(1) << 61)) throw AccuracyError("membership boundary overflow");
            hi *= 2;
        }
        return last_true(1, hi, pred);
    };
    int64_t n_plus = boundary(0.0);
    int64_t n_plus_d = boundary(delta);

    out.N = n_plus;
    out.N_delta = n_plus_d;
    if (n_plus >= 1) {
        out.m = checked_tri_sum(1, n_plus, out.m_saturated);
        out.members_N.push_back({1, n_plus});
    }
    if (n_plus_d >= 1) {
        out.m_delta = checked_tri_sum(1, n_plus_d, out.m_delta_saturated);
        out.members_N_delta.push_back({1, n_plus_d});
    }

    double M = double(n_plus);
    double midx = 0.5 * M * (M + 1.0);
    if (fam == Family::sqrt_factorial)
        out.s_half = midx * lr - 0.5 * sum_lnfact(M);
    else
        out.s_half = midx * kappa - 0.5 * sum_nlnn(M);
    if (n_plus == 0) out.s_half = 0.0;
    out.s = 2.0 * out.s_half;

    // central index: stationary point of the concave t
    double guess = fam == Family::sqrt_factorial ? r * r : 2.0 * r * r / std::numbers::e_v<double>;
    int64_t k = std::max<int64_t>(1, int64_t(guess));
    double tmax = kNegInf;
    int64_t nu = 0;
    for (int64_t n = std::max<int64_t>(1, k - 3); n <= k + 3; ++n) {
        double t = term(n);
        if (t >= tmax) {
            tmax = t;
            nu = n;
        }
    }
    // t(0) = 0 for these families
    if (tmax < 0.0) {
        tmax = 0.0;
        nu = 0;
    }
    out.ln_mu = tmax;
    out.nu = nu;
    out.ln_S_sq = windowed_ln_S_sq(fam, lr, kappa, std::max<int64_t>(nu, 1));
}

// cutoff: smallest n beyond the peak with t_delta(n) < -50 for all later n
inline int64_t dense_cutoff(Family fam, double r, double delta) {
    double lr = std::log(r);
    double kappa = lr + 0.5 * std::numbers::ln2_v<double>;
    ClosedTerm term{fam, lr, kappa};
    auto keep = [&](int64_t n) { return term(n) + delta * double(n) >= -50.0; };
    if (!keep(1)) return 1;  // scan at least n = 1
    int64_t hi = 16;
    while (keep(hi)) {
        if (hi > (int64_t(1) << 61)) throw AccuracyError("cutoff overflow");
        hi *= 2;
    }
    return last_true(1, hi, keep) + 1;
}

inline void functionals_gap(double r, double delta, RadialFunctionals& out) {
    double lr = std::log(r);
    int64_t n_cut = dense_cutoff(Family::half_power, r, delta);
    Kahan s_acc;
    double tmax = 0.0;  // t(0) = 0, a_0 = 1
    int64_t nu = 0;
    OnlineLogSum ssq;
    ssq.add(0.0);
    auto append = [](std::vector<IndexRange>& v, int64_t n) {
        if (!v.empty() && v.back().hi == n - 1)
            v.back().hi = n;
        else
            v.push_back({n, n});
    };
    for (int64_t nk : kGapSupport) {
        if (nk > n_cut) break;
        double lm = half_power_lm(nk);
        double p = double(nk) * lr;
        double t = lm + p;
        if (t > 0.0) {
            s_acc.add(t);
            out.N++;
            out.m += nk;
            append(out.members_N, nk);
        }
        if (t > -(delta * double(nk))) {
            out.N_delta++;
            out.m_delta += nk;
            append(out.members_N_delta, nk);
        }
        if (t >= tmax) {
            tmax = t;
            nu = nk;
        }
        ssq.add(2.0 * t);
    }
    out.s_half = s_acc.value();
    out.s = 2.0 * out.s_half;
    out.ln_mu = tmax;
    out.nu = nu;
    out.ln_S_sq = ssq.value();
}

}  // namespace detail

inline RadialFunctionals functionals(const LogCoefficientSequence& seq, double r, double delta,
                                     int64_t enum_budget = kDefaultEnumBudget) {
    if (!(r > 0.0)) throw DomainError("functionals: r must be > 0");
    if (!(delta > 0.0)) throw DomainError("functionals: delta must be > 0");
    RadialFunctionals out;
    out.r = r;
    out.delta = delta;
    double lr = std::log(r);

    switch (seq.family) {
        case Family::gap_half_power:
            detail::functionals_gap(r, delta, out);
            return out;
        case Family::table: {
            int64_t horizon = int64_t(seq.log_magnitude.size()) - 1;
            if (horizon < 0) {
                out.ln_mu = kNegInf;
                out.ln_S_sq = kNegInf;
                return out;
            }
            double t0 = seq.log_magnitude[0];
            detail::TableTerms terms{lr, seq.log_magnitude.data()};
            detail::functionals_dense(terms, horizon, delta, t0, t0 != kNegInf, out);
            if (out.ln_mu == kNegInf) {
                // empty effective support: nu = smallest supported index
                for (int64_t n = 0; n <= horizon; ++n)
                    if (seq.log_magnitude[size_t(n)] != kNegInf) {
                        out.nu = n;
                        break;
                    }
            }
            return out;
        }
        case Family::sqrt_factorial:
        case Family::half_power: {
            int64_t n_cut = detail::dense_cutoff(seq.family, r, delta);
            if (n_cut > enum_budget) {
                detail::functionals_closed(seq.family, r, delta, out);
                return out;
            }
            if (seq.family == Family::sqrt_factorial) {
                detail::PsiTerms terms{lr};
                detail::functionals_dense(terms, n_cut, delta, 0.0, true, out);
            } else {
                detail::HalfPowerTerms terms{lr + 0.5 * std::numbers::ln2_v<double>};
                detail::functionals_dense(terms, n_cut, delta, 0.0, true, out);
            }
            return out;
        }
    }
    throw DomainError("functionals: bad family");
}

// Smallest D with sum_{n>D} |a_n|^2 r^{2n} <= tol^2 * sum_{n<=D} |a_n|^2 r^{2n}
// for the builtin infinite families; for table sequences the stored polynomial
// is the function itself, so its horizon is returned.
inline int64_t truncation_degree(const LogCoefficientSequence& seq, double r, double tail_tol) {
    if (!(r > 0.0)) throw DomainError("truncation_degree: r must be > 0");
    if (!(tail_tol > 0.0) || !(tail_tol < 1.0))
        throw DomainError("truncation_degree: need 0 < tail_tol < 1");
    if (seq.family == Family::table) {
        bool any = false;
        for (double v : seq.log_magnitude) any = any || v != kNegInf;
        if (!any) throw TableHorizonError("truncation_degree: empty table");
        return int64_t(seq.log_magnitude.size()) - 1;
    }
    double lr = std::log(r);
    // collect x(n) = 2 ln(|a_n| r^n) until far past the peak
    std::vector<int64_t> idx;
    std::vector<double> x;
    auto push = [&](int64_t n, double lm) {
        idx.push_back(n);
        x.push_back(2.0 * (lm + double(n) * lr));
    };
    double xmax = kNegInf;
    const double drop = std::max(140.0, -4.8 * std::log(tail_tol));
    if (seq.family == Family::gap_half_power) {
        push(0, 0.0);
        xmax = 0.0;
        for (int64_t nk : kGapSupport) {
            double xv = 2.0 * (detail::half_power_lm(nk) + double(nk) * lr);
            push(nk, detail::half_power_lm(nk));
            xmax = std::max(xmax, xv);
            if (xv < xmax - drop) break;
        }
    } else {
        const int64_t cap = 2'000'000;
        push(0, 0.0);
        xmax = 0.0;
        for (int64_t n = 1;; ++n) {
            if (n > cap) throw AccuracyError("truncation_degree: radius too large for direct scan");
            double lm = log_coeff(seq, n);
            double xv = 2.0 * (lm + double(n) * lr);
            push(n, lm);
            xmax = std::max(xmax, xv);
            if (xv < xmax - drop) break;
        }
    }
    // suffix log-sums
    size_t K = x.size();
    std::vector<double> suffix(K + 1, kNegInf);
    OnlineLogSum tail;
    for (size_t j = K; j-- > 0;) {
        tail.add(x[j]);
        suffix[j] = tail.value();
    }
    double total = suffix[0];
    double logtol2 = 2.0 * std::log(tail_tol);
    for (size_t j = 0; j + 1 <= K; ++j) {
        double tl = suffix[j + 1];
        if (tl == kNegInf) return idx[j];
        if (tl >= total - 1e-12) continue;  // head still negligible
        double head = logdiffexp(total, tl);
        if (tl <= logtol2 + head) return idx[j];
    }
    return idx.back();
}

}  // namespace gef
