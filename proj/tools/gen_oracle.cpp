// Regenerates tests/fixtures/functionals_oracle.csv: reference values for the
// radial functionals over the acceptance grid (three builtin families, 100
// log-spaced radii in [1, 1e4], delta = 0.01).
//
// This is the brute-force ln+ summation oracle: one scalar pass over every
// index up to ten times the membership cutoff, long double accumulation, a
// textbook rescaling log-sum-exp for ln S^2, and its own boundary handling.
// It shares with the library only the per-term value conventions pinned in
// gef/logblock.hpp (vectorized ln blocks, the canonical lf prefix, the
// unfused membership comparisons) plus frozen data like the gap support
// table; all membership, accumulation, argmax and windowing logic here is
// written independently of gef/coeffs.hpp.
//
// Real fields are emitted as C hex doubles so the comparison in the test
// suite is unambiguous.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "gef/coeffs.hpp"  // kGapSupport, log_grid, family names only
#include "gef/logblock.hpp"

namespace {

using gef::detail::kLogBlock;

struct OracleRow {
    const char* family;
    double r, delta;
    int64_t n_scanned = 0;
    int64_t N = 0, N_delta = 0, m = 0, m_delta = 0, nu = 0;
    double s_half = 0, ln_mu = 0, ln_S_sq = 0;
};

// textbook online log-sum-exp in long double
struct LogSum {
    long double mx = -1e4930L;
    long double acc = 0.0L;
    void add(long double x) {
        if (x > mx) {
            acc = acc * expl(mx - x) + 1.0L;
            mx = x;
        } else if (x > mx - 60.0L) {
            acc += expl(x - mx);
        }
    }
    double value() const { return double(mx + logl(acc)); }
};

double lnfact_pt(int64_t n) {
    int sign;
    return lgamma_r(double(n) + 1.0, &sign);
}

// smallest n past which ln|a_n| + n(ln r + delta) stays below -50, by doubling
// and bisection on the pointwise closed form
int64_t scan_limit(bool is_psi, double r, double delta) {
    double lr = std::log(r);
    auto t_delta = [&](int64_t n) {
        double lm = is_psi ? -0.5 * lnfact_pt(n) : -(0.5 * double(n)) * std::log(0.5 * double(n));
        return lm + double(n) * (lr + delta);
    };
    int64_t hi = 16;
    while (t_delta(hi) >= -50.0) hi *= 2;
    int64_t lo = 1;
    while (hi - lo > 1) {
        int64_t mid = lo + (hi - lo) / 2;
        if (t_delta(mid) >= -50.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

OracleRow scan_dense(bool is_psi, double r, double delta) {
    OracleRow row{is_psi ? "sqrt_factorial" : "half_power", r, delta};
    const double lr = std::log(r);
    const double kappa = lr + 0.5 * std::log(2.0);
    const int64_t n_hi = 10 * scan_limit(is_psi, r, delta);
    row.n_scanned = n_hi;

    long double s = 0.0L;
    double tmax = 0.0;  // t(0) = ln|a_0| = 0
    int64_t nu = 0;
    LogSum ssq;
    ssq.add(0.0L);

    std::vector<double> lnbuf(kLogBlock), lfbuf(kLogBlock);
    double lf = 0.0;
    for (int64_t base = 1; base <= n_hi; base += kLogBlock) {
        int len = int(std::min<int64_t>(kLogBlock, n_hi - base + 1));
        gef::detail::log_block(base, len, lnbuf.data());
        if (is_psi) lf = gef::detail::lf_prefix_block(lf, lnbuf.data(), len, lfbuf.data());
        for (int i = 0; i < len; ++i) {
            int64_t n = base + i;
            double t = is_psi ? double(n) * lr - 0.5 * lfbuf[i]
                              : double(n) * (kappa - 0.5 * lnbuf[i]);
            if (t > 0.0) {
                s += (long double)t;
                row.N++;
                row.m += n;
            }
            if (t > -(delta * double(n))) {
                row.N_delta++;
                row.m_delta += n;
            }
            if (t >= tmax) {
                tmax = t;
                nu = n;
            }
            ssq.add((long double)(2.0 * t));
        }
    }
    row.s_half = double(s);
    row.ln_mu = tmax;
    row.nu = nu;
    row.ln_S_sq = ssq.value();
    return row;
}

OracleRow scan_gap(double r, double delta) {
    OracleRow row{"gap_half_power", r, delta};
    const double lr = std::log(r);
    const int64_t n_hi = 10 * scan_limit(false, r, delta);
    row.n_scanned = n_hi;
    long double s = 0.0L;
    double tmax = 0.0;  // n = 0 carries t = 0 and is not in the support table
    int64_t nu = 0;
    LogSum ssq;
    ssq.add(0.0L);
    for (int64_t n : gef::kGapSupport) {
        if (n > n_hi) break;
        double u = 0.5 * double(n);
        double lm = -(u * std::log(u));
        double t = lm + double(n) * lr;
        if (t > 0.0) {
            s += (long double)t;
            row.N++;
            row.m += n;
        }
        if (t > -(delta * double(n))) {
            row.N_delta++;
            row.m_delta += n;
        }
        if (t >= tmax) {
            tmax = t;
            nu = n;
        }
        ssq.add((long double)(2.0 * t));
    }
    row.s_half = double(s);
    row.ln_mu = tmax;
    row.nu = nu;
    row.ln_S_sq = ssq.value();
    return row;
}

}  // namespace

int main(int argc, char** argv) {
    const char* out_path = argc > 1 ? argv[1] : "tests/fixtures/functionals_oracle.csv";
    const double delta = 0.01;
    auto grid = gef::log_grid(1.0, 1e4, 100);

    std::FILE* f = std::fopen(out_path, "w");
    if (!f) {
        std::fprintf(stderr, "cannot open %s\n", out_path);
        return 1;
    }
    std::fprintf(f,
                 "family,r_hex,delta_hex,n_scanned,N,N_delta,m,m_delta,nu,"
                 "s_half_hex,ln_mu_hex,ln_S_sq_hex,r,s_half,ln_mu,ln_S_sq\n");
    auto emit = [&](const OracleRow& row) {
        std::fprintf(f,
                     "%s,%a,%a,%" PRId64 ",%" PRId64 ",%" PRId64 ",%" PRId64 ",%" PRId64
                     ",%" PRId64 ",%a,%a,%a,%.17g,%.17g,%.17g,%.17g\n",
                     row.family, row.r, row.delta, row.n_scanned, row.N, row.N_delta, row.m,
                     row.m_delta, row.nu, row.s_half, row.ln_mu, row.ln_S_sq, row.r, row.s_half,
                     row.ln_mu, row.ln_S_sq);
    };
    for (double r : grid) {
        emit(scan_dense(true, r, delta));
        emit(scan_dense(false, r, delta));
        emit(scan_gap(r, delta));
        std::fflush(f);
        std::fprintf(stderr, "r=%.6g done\n", r);
    }
    std::fclose(f);
    return 0;
}
