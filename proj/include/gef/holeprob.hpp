#pragma once

// Hole probabilities: Monte-Carlo brackets with Clopper-Pearson intervals,
// the analytic p0 bounds from the radial functionals, and the small-ball
// tail of sum |xi_n|^2 |a_n|^2 r^{2n} over the dominant set. The exact tail
// is a hypoexponential CDF: partial fractions when the cancellation budget
// allows, otherwise an all-positive uniformization series whose truncation
// error is relative, so tails at 1e-50 keep full precision.

#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gef/zeros.hpp"

namespace gef {

struct ConfidenceInterval {
    double low = 0.0, high = 1.0;
};

inline ConfidenceInterval clopper_pearson(int64_t k, int64_t n, double level = 0.95) {
    if (n < 1 || k < 0 || k > n) throw DomainError("clopper_pearson: need 0 <= k <= n");
    if (!(level > 0.0) || !(level < 1.0))
        throw DomainError("clopper_pearson: level must sit in (0,1)");
    const double a = 1.0 - level;
    ConfidenceInterval ci;
    ci.low = k == 0 ? 0.0
                    : boost::math::quantile(
                          boost::math::beta_distribution<>(double(k), double(n - k + 1)),
                          a / 2.0);
    ci.high = k == n ? 1.0
                     : boost::math::quantile(
                           boost::math::beta_distribution<>(double(k + 1), double(n - k)),
                           1.0 - a / 2.0);
    return ci;
}

struct P0Bounds {
    double p0_lower = 0.0;  // s + N ln N - 4N, may be negative
    double p0_upper = 0.0;  // s + N exp((2+eps) sqrt(ln N))
    double p0_lower_clamped = 0.0;
    double eps_used = 0.0;
    int64_t n_used = 0;
    double s_used = 0.0;
};

inline P0Bounds p0_bounds(const LogCoefficientSequence& seq, double r, double eps = 0.5) {
    if (!(eps > 0.0)) throw DomainError("p0_bounds: eps must be positive");
    if (log_coeff(seq, 0) == kNegInf)
        throw DomainError("p0_bounds: needs a nonzero constant coefficient");
    const RadialFunctionals fr = functionals(seq, r, 0.5);
    if (fr.N < 2) throw DegenerateRegimeError("p0_bounds: needs N(r) >= 2");
    P0Bounds b;
    b.eps_used = eps;
    b.n_used = fr.N;
    b.s_used = fr.s;
    const auto n = double(fr.N);
    b.p0_lower = fr.s + n * std::log(n) - 4.0 * n;
    b.p0_upper = fr.s + n * std::exp((2.0 + eps) * std::sqrt(std::log(n)));
    b.p0_lower_clamped = std::max(0.0, b.p0_lower);
    return b;
}

namespace detail {

// CDF of sum E_i / rates_i at c by uniformization of the sequential
// absorption chain. Every term is nonnegative and the truncation error is
// bounded by (poisson tail) * (true cdf), so the result carries full
// relative precision even for very small tails.
inline double hypoexp_cdf_series(const std::vector<double>& rates, double c) {
    const size_t n = rates.size();
    double lam = 0.0;
    for (double x : rates) lam = std::max(lam, x);
    std::vector<double> p(n, 0.0);
    p[0] = 1.0;
    double absorbed = 0.0;
    double lpois = -lam * c;  // ln Poisson(k; lam c) at k = 0
    const double llc = std::log(lam * c);
    double result = 0.0;
    for (int64_t k = 0;; ++k) {
        const double pois = std::exp(lpois);
        result += pois * absorbed;
        // remaining terms are at most the Poisson tail (absorption
        // probabilities never exceed 1), bounded geometrically once the
        // ratio lam c / (k+1) drops below 1
        const double ratio = lam * c / double(k + 2);
        if (uint64_t(k) >= n && ratio < 0.5) {
            const double remaining = pois * (lam * c / double(k + 1)) / (1.0 - ratio);
            if (remaining <= 1e-17 * result + 1e-320) break;
        }
        if (k > 2000000) throw MethodFailureError("hypoexp series did not terminate");
        double carry = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double move = p[i] * (rates[i] / lam);
            p[i] += carry - move;
            carry = move;
        }
        absorbed += carry;
        lpois += llc - std::log(double(k + 1));
    }
    return std::clamp(result, 0.0, 1.0);
}

// distinct-rate partial fractions in long double, with an explicit estimate
// of the cancellation noise; returns false when the noise swamps the value
inline bool hypoexp_cdf_pf(const std::vector<double>& rates, double c, double& out) {
    const size_t n = rates.size();
    if (n > 64) return false;
    long double tail = 0.0L, biggest = 0.0L;
    for (size_t i = 0; i < n; ++i) {
        long double prod = 1.0L;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const long double d = (long double)(rates[j]) - (long double)(rates[i]);
            if (d == 0.0L) return false;
            prod *= (long double)(rates[j]) / d;
        }
        const long double term = prod * expl(-(long double)(rates[i]) * (long double)c);
        tail += term;
        biggest = std::max(biggest, fabsl(term));
    }
    const long double cdf = 1.0L - tail;
    biggest = std::max(biggest, 1.0L);
    const long double noise = biggest * 1e-17L * (long double)n;
    if (fabsl(cdf) <= noise * 1e6L) return false;  // fewer than ~6 trusted digits
    if (cdf < -noise || cdf > 1.0L + noise) return false;
    out = std::clamp((double)cdf, 0.0, 1.0);
    return true;
}

}  // namespace detail

struct SmallBallQuery {
    double r = 0.0;
    double c = 0.0;
    std::vector<double> ln_weights;  // 2 t_n over the strict member set
    double exact_tail = 0.0;
    double mc_tail = 0.0;
    double mc_ci_low = 0.0, mc_ci_high = 1.0;
    int64_t mc_trials = 0;
    double volume_bound = 0.0;  // exp(-s) c^N / N!
    double ln_volume_bound = 0.0;
    bool near_equal_rates = false;
    bool series_fallback = false;
};

inline SmallBallQuery small_ball_tail(const LogCoefficientSequence& seq, double r,
                                      double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("small_ball_tail: c must be positive");
    const RadialFunctionals fr = functionals(seq, r, 0.5);
    if (fr.N < 1) throw DegenerateRegimeError("small_ball_tail: needs N(r) >= 1");
    if (fr.N > 100000) throw DomainError("small_ball_tail: member set too large to enumerate");

    SmallBallQuery q;
    q.r = r;
    q.c = c;
    const double lr = std::log(r);
    std::vector<double> rates;
    rates.reserve(size_t(fr.N));
    for (const auto& g : fr.members_N)
        for (int64_t n = g.lo; n <= g.hi; ++n) {
            const double t = log_coeff(seq, n) + double(n) * lr;
            q.ln_weights.push_back(2.0 * t);
            rates.push_back(std::exp(-2.0 * t));
        }

    auto sorted = rates;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i + 1 < sorted.size(); ++i)
        if (sorted[i + 1] - sorted[i] < 1e-8 * sorted[i + 1]) q.near_equal_rates = true;

    if (q.near_equal_rates || !detail::hypoexp_cdf_pf(rates, c, q.exact_tail)) {
        q.exact_tail = detail::hypoexp_cdf_series(rates, c);
        q.series_fallback = true;
    }

    q.ln_volume_bound =
        -fr.s + double(fr.N) * std::log(c) - std::lgamma(double(fr.N) + 1.0);
    q.volume_bound = std::exp(q.ln_volume_bound);

    q.mc_trials = 100000;
    // fixed internal stream: the query is a deterministic function of its
    // arguments
    Xoshiro256pp g(0xC0FFEEULL, 0, StreamTag::small_ball);
    int64_t hits = 0;
    for (int64_t t = 0; t < q.mc_trials; ++t) {
        double sum = 0.0;
        for (double lw : q.ln_weights) sum += std::exp(lw) * g.exponential();
        if (sum <= c) ++hits;
    }
    q.mc_tail = double(hits) / double(q.mc_trials);
    const auto ci = clopper_pearson(hits, q.mc_trials);
    q.mc_ci_low = ci.low;
    q.mc_ci_high = ci.high;
    return q;
}

struct HoleBracket {
    double r = 0.0;
    int64_t trials = 0;
    int64_t holes_observed = 0;
    double p_hat = 0.0;
    double ci_low = 0.0, ci_high = 1.0;
    double ln_p_omega1 = std::numeric_limits<double>::quiet_NaN();
    double p0_lower = std::numeric_limits<double>::quiet_NaN();
    double p0_upper = std::numeric_limits<double>::quiet_NaN();
    double p0_lower_clamped = std::numeric_limits<double>::quiet_NaN();
    double eps_used = 0.0;
    bool degenerate_n = false;
    bool dominance_certified = false;
    int64_t ambiguous_trials = 0;  // counted as non-holes, the conservative branch
};

namespace detail {

// zero count with the fallback chain; empty return means the trial is
// boundary-ambiguous and must take the conservative branch
inline bool hole_trial(const Realization& rl, double r, bool& ambiguous) {
    try {
        return count_zeros_roots(rl, r).count == 0;
    } catch (const BoundaryAmbiguousError&) {
        ambiguous = true;
        return false;
    } catch (const MethodFailureError&) {
    }
    try {
        return count_zeros_winding(rl, r).count == 0;
    } catch (const BoundaryAmbiguousError&) {
    } catch (const MethodFailureError&) {
    }
    ambiguous = true;
    return false;
}

}  // namespace detail

inline HoleBracket estimate_hole_probability(const LogCoefficientSequence& seq, double r,
                                             Law law, int64_t trials, uint64_t seed,
                                             double eps = 0.5,
                                             const ModulusLaw& mlaw = ModulusLaw::gaussian()) {
    if (trials < 1) throw DomainError("estimate_hole_probability: trials must be >= 1");
    const int64_t degree = truncation_degree(seq, r, 1e-9);

    HoleBracket hb;
    hb.r = r;
    hb.trials = trials;
    hb.eps_used = eps;

    std::atomic<int64_t> holes{0}, ambiguous{0};
    parallel_trials(trials, [&](int64_t t) {
        auto rl = sample_realization(seq, degree, law, seed, t, mlaw);
        bool amb = false;
        if (detail::hole_trial(rl, r, amb)) holes.fetch_add(1);
        if (amb) ambiguous.fetch_add(1);
    });
    hb.holes_observed = holes.load();
    hb.ambiguous_trials = ambiguous.load();
    hb.p_hat = double(hb.holes_observed) / double(trials);
    const auto ci = clopper_pearson(hb.holes_observed, trials);
    hb.ci_low = ci.low;
    hb.ci_high = ci.high;

    try {
        const P0Bounds b = p0_bounds(seq, r, eps);
        hb.p0_lower = b.p0_lower;
        hb.p0_upper = b.p0_upper;
        hb.p0_lower_clamped = b.p0_lower_clamped;
        hb.ln_p_omega1 = ln_prob_omega1(seq, r).ln_total;

        const int64_t cert_trials = 1000;
        std::atomic<bool> all_ok{true};
        parallel_trials(cert_trials, [&](int64_t t) {
            if (!all_ok.load(std::memory_order_relaxed)) return;
            auto rl = sample_omega1_conditional(seq, r, seed, t);
            bool ok = check_dominance(rl, r).ok;
            if (ok) {
                try {
                    ok = count_zeros_roots(rl, r).count == 0;
                } catch (const BoundaryAmbiguousError&) {
                    ok = false;
                } catch (const MethodFailureError&) {
                    ok = false;
                }
            }
            if (!ok) all_ok.store(false, std::memory_order_relaxed);
        });
        hb.dominance_certified = all_ok.load();
    } catch (const DegenerateRegimeError&) {
        hb.degenerate_n = true;
    } catch (const DomainError&) {
        hb.degenerate_n = true;
    }
    return hb;
}

struct OverflowEstimate {
    double r = 0.0;
    int64_t m = 0;
    int64_t trials = 0;
    int64_t hits = 0;
    double p_hat = 0.0;
    double ci_low = 0.0, ci_high = 1.0;
};

inline OverflowEstimate estimate_overflow_probability(const LogCoefficientSequence& seq,
                                                      double r, int64_t m, int64_t trials,
                                                      uint64_t seed) {
    if (m < 0) throw DomainError("estimate_overflow_probability: m must be >= 0");
    if (trials < 1) throw DomainError("estimate_overflow_probability: trials must be >= 1");
    const int64_t degree = truncation_degree(seq, r, 1e-9);
    OverflowEstimate oe;
    oe.r = r;
    oe.m = m;
    oe.trials = trials;
    std::atomic<int64_t> hits{0};
    parallel_trials(trials, [&](int64_t t) {
        auto rl = sample_realization(seq, degree, Law::complex_gaussian, seed, t);
        int64_t count = 0;
        try {
            count = count_zeros_roots(rl, r).count;
        } catch (const BoundaryAmbiguousError&) {
            count = count_zeros_roots(rl, r * (1.0 - 1e-6)).count;  // inner disc
        } catch (const MethodFailureError&) {
            count = count_zeros_winding(rl, r).count;
        }
        if (count >= m) hits.fetch_add(1);
    });
    oe.hits = hits.load();
    oe.p_hat = double(oe.hits) / double(trials);
    const auto ci = clopper_pearson(oe.hits, trials);
    oe.ci_low = ci.low;
    oe.ci_high = ci.high;
    return oe;
}

}  // namespace gef
