#pragma once

// Zero counting for realized truncated series, by two independent routes:
// all roots of the rescaled polynomial (companion eigenvalues up to degree
// 64, Aberth-Ehrlich beyond), or the argument principle along |z| = r with
// adaptive unwrapping. Also the circle mean of ln|f| by embedded-pair
// adaptive quadrature, and the Jensen identity residual that ties the two
// together.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <queue>
#include <vector>

#include "gef/sampler.hpp"

namespace gef {

struct ZeroCount {
    int64_t count = 0;
    enum class Method { roots, winding } method = Method::roots;
    // roots: min over roots of ||z_j| - r|; winding: the accepted residual
    double boundary_margin = 0.0;
    int64_t degree_used = 0;
};

struct CircleIntegral {
    double r = 0.0;
    double value = 0.0;       // (1/2pi) integral of ln|f(r e^{i theta})|
    double quad_error = 0.0;  // accumulated error estimate of the mean
    int64_t nodes_used = 0;
};

namespace detail {

// w-domain coefficients b_n = xi_n a_n r^n e^{-shift}; max modulus is 1 by
// construction so Horner never overflows on |w| <= 1.
struct ScaledPoly {
    std::vector<std::complex<double>> b;
    double shift = 0.0;  // ln of the discarded scale factor
    int64_t degree = 0;  // index of the last nonzero coefficient
};

inline ScaledPoly scale_to_disc(const Realization& rl, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive");
    const double lr = std::log(r);
    const int64_t d = rl.degree;
    std::vector<double> ln_abs(size_t(d) + 1, kNegInf);
    double shift = kNegInf;
    for (int64_t n = 0; n <= d; ++n) {
        const double m = std::abs(rl.multipliers[size_t(n)]);
        if (m == 0.0) continue;
        const double lm = log_coeff(rl.seq, n);
        if (lm == kNegInf) continue;
        ln_abs[size_t(n)] = std::log(m) + lm + double(n) * lr;
        shift = std::max(shift, ln_abs[size_t(n)]);
    }
    if (shift == kNegInf) throw DomainError("realization is identically zero");

    ScaledPoly sp;
    sp.shift = shift;
    sp.b.assign(size_t(d) + 1, {0.0, 0.0});
    int64_t last = 0;
    for (int64_t n = 0; n <= d; ++n) {
        if (ln_abs[size_t(n)] == kNegInf) continue;
        const auto& xi = rl.multipliers[size_t(n)];
        const double scale = std::exp(ln_abs[size_t(n)] - shift) / std::abs(xi);
        sp.b[size_t(n)] = xi * scale;
        if (sp.b[size_t(n)] != std::complex<double>{}) last = n;
    }
    sp.degree = last;
    sp.b.resize(size_t(last) + 1);
    return sp;
}

inline std::complex<double> horner(const std::vector<std::complex<double>>& b,
                                   std::complex<double> w) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t i = b.size(); i-- > 0;) acc = acc * w + b[i];
    return acc;
}

// Aberth-Ehrlich with Bini-style initial guesses from the upper convex hull
// of (n, ln|b_n|). Newton ratios for |w| > 1 go through the reversed
// polynomial at 1/w so nothing overflows.
inline std::vector<std::complex<double>> aberth_roots(
    const std::vector<std::complex<double>>& b) {
    const int64_t deg = int64_t(b.size()) - 1;
    std::vector<std::pair<int64_t, double>> pts;
    for (int64_t n = 0; n <= deg; ++n)
        if (b[size_t(n)] != std::complex<double>{})
            pts.emplace_back(n, std::log(std::abs(b[size_t(n)])));

    // upper hull, left to right
    std::vector<std::pair<int64_t, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& m = hull[hull.size() - 1];
            // drop m if it lies on or below chord a-p
            if ((m.second - a.second) * double(p.first - a.first) <=
                (p.second - a.second) * double(m.first - a.first))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }

    std::vector<std::complex<double>> w;
    w.reserve(size_t(deg));
    for (size_t e = 0; e + 1 < hull.size(); ++e) {
        const int64_t k1 = hull[e].first, k2 = hull[e + 1].first;
        const double rho =
            std::exp((hull[e].second - hull[e + 1].second) / double(k2 - k1));
        const int64_t m = k2 - k1;
        for (int64_t j = 0; j < m; ++j) {
            const double ang = 2.0 * std::numbers::pi_v<double> *
                                   (double(j) + 0.5) / double(m) +
                               0.4 * double(e + 1);
            w.push_back(rho * std::complex<double>{std::cos(ang), std::sin(ang)});
        }
    }

    std::vector<std::complex<double>> rev(b.rbegin(), b.rend());
    auto newton_ratio = [&](std::complex<double> wi) -> std::complex<double> {
        if (std::abs(wi) <= 1.0) {
            std::complex<double> p{0.0, 0.0}, dp{0.0, 0.0};
            for (size_t i = b.size(); i-- > 0;) {
                dp = dp * wi + p;
                p = p * wi + b[i];
            }
            if (p == std::complex<double>{}) return {0.0, 0.0};
            return p / dp;
        }
        const std::complex<double> v = 1.0 / wi;
        std::complex<double> q{0.0, 0.0}, dq{0.0, 0.0};
        for (size_t i = rev.size(); i-- > 0;) {
            dq = dq * v + q;
            q = q * v + rev[i];
        }
        if (q == std::complex<double>{}) return {0.0, 0.0};
        // p'/p = deg/w - q'(1/w) / (w^2 q(1/w))
        const std::complex<double> inv = double(deg) * v - dq * v * v / q;
        return 1.0 / inv;
    };

    const int max_sweeps = 200;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (size_t i = 0; i < w.size(); ++i) {
            const auto t = newton_ratio(w[i]);
            std::complex<double> s{0.0, 0.0};
            for (size_t j = 0; j < w.size(); ++j) {
                if (j == i) continue;
                std::complex<double> d = w[i] - w[j];
                if (d == std::complex<double>{}) d = {1e-14, 1e-14};
                s += 1.0 / d;
            }
            std::complex<double> denom = 1.0 - t * s;
            if (denom == std::complex<double>{}) denom = {1e-300, 0.0};
            const std::complex<double> step = t / denom;
            w[i] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(w[i])));
        }
        if (worst < 5e-14) return w;
    }
    throw MethodFailureError("aberth iteration did not converge");
}

inline std::vector<std::complex<double>> companion_roots(
    const std::vector<std::complex<double>>& b) {
    const int64_t deg = int64_t(b.size()) - 1;
    // diagonal similarity: equalize the end coefficients to tame the scale
    double rho = 1.0;
    const double m0 = std::abs(b.front()), md = std::abs(b.back());
    if (m0 > 0.0 && md > 0.0)
        rho = std::clamp(std::pow(m0 / md, 1.0 / double(deg)), 1e-6, 1e6);
    std::vector<std::complex<double>> bb(b.size());
    double f = 1.0;
    for (size_t n = 0; n < b.size(); ++n) {
        bb[n] = b[n] * f;
        f *= rho;
    }
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(deg, deg);
    for (int64_t i = 1; i < deg; ++i) c(i, i - 1) = 1.0;
    for (int64_t i = 0; i < deg; ++i) c(i, deg - 1) = -bb[size_t(i)] / bb[size_t(deg)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
    if (es.info() != Eigen::Success)
        throw MethodFailureError("companion eigensolver did not converge");
    std::vector<std::complex<double>> w(static_cast<size_t>(deg));
    for (int64_t i = 0; i < deg; ++i) w[size_t(i)] = es.eigenvalues()(i) * rho;
    return w;
}

// All w-domain roots plus the multiplicity of the root at the origin.
struct RootSet {
    std::vector<std::complex<double>> w;
    int64_t origin = 0;
    int64_t degree = 0;
    double shift = 0.0;
};

inline RootSet solve_roots(const Realization& rl, double r) {
    ScaledPoly sp = scale_to_disc(rl, r);
    RootSet rs;
    rs.degree = sp.degree;
    rs.shift = sp.shift;
    size_t k0 = 0;
    while (k0 < sp.b.size() && sp.b[k0] == std::complex<double>{}) ++k0;
    rs.origin = int64_t(k0);
    std::vector<std::complex<double>> body(sp.b.begin() + int64_t(k0), sp.b.end());
    if (body.size() <= 1) return rs;
    rs.w = body.size() - 1 <= 64 ? companion_roots(body) : aberth_roots(body);
    return rs;
}

}  // namespace detail

inline ZeroCount count_zeros_roots(const Realization& rl, double r) {
    detail::RootSet rs = detail::solve_roots(rl, r);
    ZeroCount zc;
    zc.method = ZeroCount::Method::roots;
    zc.degree_used = rs.degree;
    double margin = rs.origin > 0 ? 1.0 : std::numeric_limits<double>::infinity();
    int64_t inside = rs.origin;
    for (const auto& w : rs.w) {
        const double d = std::abs(std::abs(w) - 1.0);
        margin = std::min(margin, d);
        if (d < 1e-9)
            throw BoundaryAmbiguousError("root within 1e-9 of the circle");
        if (std::abs(w) < 1.0) ++inside;
    }
    zc.count = inside;
    zc.boundary_margin = margin * r;
    return zc;
}

inline ZeroCount count_zeros_winding(const Realization& rl, double r, double tol = 0.25) {
    detail::ScaledPoly sp = detail::scale_to_disc(rl, r);
    ZeroCount zc;
    zc.method = ZeroCount::Method::winding;
    zc.degree_used = sp.degree;
    if (sp.degree == 0) {
        zc.count = 0;
        zc.boundary_margin = 0.0;
        return zc;
    }

    const double two_pi = 2.0 * std::numbers::pi_v<double>;
    auto eval = [&](double th) {
        return detail::horner(sp.b, {std::cos(th), std::sin(th)});
    };

    const int64_t cap = int64_t(1) << 20;
    int64_t used = 0;
    struct Seg {
        double ta, tb;
        std::complex<double> fa, fb;
    };
    std::vector<Seg> stack;
    const int64_t k0 = std::max<int64_t>(32, 4 * sp.degree);
    std::vector<std::complex<double>> init(size_t(k0) + 1);
    for (int64_t i = 0; i <= k0; ++i) {
        init[size_t(i)] = i == k0 ? init[0] : eval(two_pi * double(i) / double(k0));
        ++used;
        if (std::abs(init[size_t(i)]) < 1e-300)
            throw BoundaryAmbiguousError("winding: |f| vanished on the circle");
    }
    for (int64_t i = k0; i-- > 0;)
        stack.push_back({two_pi * double(i) / double(k0),
                         two_pi * double(i + 1) / double(k0), init[size_t(i)],
                         init[size_t(i + 1)]});

    Kahan total;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        const double d = std::arg(s.fb / s.fa);
        if (std::abs(d) < std::numbers::pi_v<double> / 2.0) {
            total.add(d);
            continue;
        }
        if (used >= cap)
            throw MethodFailureError("winding: node budget exhausted");
        if (s.tb - s.ta < 1e-12)
            throw BoundaryAmbiguousError("winding: argument jump persists at machine scale");
        const double tm = 0.5 * (s.ta + s.tb);
        const auto fm = eval(tm);
        ++used;
        if (std::abs(fm) < 1e-300)
            throw BoundaryAmbiguousError("winding: |f| vanished on the circle");
        stack.push_back({s.ta, tm, s.fa, fm});
        stack.push_back({tm, s.tb, fm, s.fb});
    }

    const double turns = total.value() / two_pi;
    const auto count = int64_t(std::llround(turns));
    const double residual = std::abs(turns - double(count));
    if (residual >= std::min(0.25, tol) || count < 0)
        throw MethodFailureError("winding: residual too large for an accepted count");
    zc.count = count;
    zc.boundary_margin = residual;
    return zc;
}

namespace detail {

// embedded Gauss-Legendre 7/15 pair on [-1, 1]
struct QNode {
    double x, w;
};
inline constexpr QNode kGL7[] = {
    {-0.94910791234275852453, 0.12948496616886969327},
    {-0.74153118559939443986, 0.2797053914892766679},
    {-0.40584515137739716691, 0.38183005050511894495},
    {0.0, 0.41795918367346938776},
    {0.40584515137739716691, 0.38183005050511894495},
    {0.74153118559939443986, 0.2797053914892766679},
    {0.94910791234275852453, 0.12948496616886969327},
};
inline constexpr QNode kGL15[] = {
    {-0.98799251802048542849, 0.030753241996117268355},
    {-0.93727339240070590431, 0.070366047488108124709},
    {-0.8482065834104272162, 0.10715922046717193501},
    {-0.72441773136017004742, 0.13957067792615431445},
    {-0.57097217260853884754, 0.16626920581699393355},
    {-0.3941513470775633699, 0.18616100001556221103},
    {-0.2011940939974345223, 0.19843148532711157646},
    {0.0, 0.20257824192556127288},
    {0.2011940939974345223, 0.19843148532711157646},
    {0.3941513470775633699, 0.18616100001556221103},
    {0.57097217260853884754, 0.16626920581699393355},
    {0.72441773136017004742, 0.13957067792615431445},
    {0.8482065834104272162, 0.10715922046717193501},
    {0.93727339240070590431, 0.070366047488108124709},
    {0.98799251802048542849, 0.030753241996117268355},
};

}  // namespace detail

inline CircleIntegral circle_log_mean(const Realization& rl, double r, double tol = 1e-9) {
    if (!(tol > 0.0)) throw DomainError("circle_log_mean: tol must be positive");
    detail::ScaledPoly sp = detail::scale_to_disc(rl, r);
    const double two_pi = 2.0 * std::numbers::pi_v<double>;

    // values of ln|f| never drop much below ln(DBL_MIN) except exactly at a
    // zero on the circle; clamping there keeps the integrand finite and the
    // nearby refinement absorbs the (integrable) spike
    auto g = [&](double th) {
        const double m = std::abs(detail::horner(sp.b, {std::cos(th), std::sin(th)}));
        return m > 0.0 ? std::max(std::log(m), -746.0) : -746.0;
    };

    struct Seg {
        double a, b, i15, err;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    const int64_t cap = int64_t(1) << 20;
    int64_t used = 0;
    auto rate = [&](double a, double b) {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double i7 = 0.0, i15 = 0.0;
        for (const auto& q : detail::kGL7) i7 += q.w * g(c + h * q.x);
        for (const auto& q : detail::kGL15) i15 += q.w * g(c + h * q.x);
        used += 22;
        return Seg{a, b, i15 * h, std::abs(i15 - i7) * h};
    };

    std::priority_queue<Seg> heap;
    const int64_t k0 = std::max<int64_t>(16, 2 * sp.degree);
    double total_err = 0.0;
    for (int64_t i = 0; i < k0; ++i) {
        Seg s = rate(two_pi * double(i) / double(k0), two_pi * double(i + 1) / double(k0));
        total_err += s.err;
        heap.push(s);
    }
    // the error target applies to the mean, so compare against tol * 2pi
    while (total_err > tol * two_pi && used + 44 <= cap) {
        Seg s = heap.top();
        if (s.b - s.a < 1e-13) break;  // machine-noise floor near a circle zero
        heap.pop();
        Seg l = rate(s.a, 0.5 * (s.a + s.b));
        Seg rg = rate(0.5 * (s.a + s.b), s.b);
        total_err += l.err + rg.err - s.err;
        heap.push(l);
        heap.push(rg);
    }

    CircleIntegral ci;
    ci.r = r;
    ci.nodes_used = used;
    Kahan sum;
    while (!heap.empty()) {
        sum.add(heap.top().i15);
        heap.pop();
    }
    ci.value = sp.shift + sum.value() / two_pi;
    ci.quad_error = total_err / two_pi;
    if (ci.quad_error > tol)
        throw AccuracyError("circle_log_mean: achieved error " +
                            std::to_string(ci.quad_error) + " above tolerance");
    return ci;
}

inline double jensen_residual(const Realization& rl, double r) {
    if (rl.multipliers.empty() || rl.multipliers[0] == std::complex<double>{} ||
        log_coeff(rl.seq, 0) == kNegInf)
        throw DomainError("jensen_residual: needs a nonzero constant term");
    detail::RootSet rs = detail::solve_roots(rl, r);
    Kahan zero_sum;  // sum of ln(r/|z_j|) over zeros inside
    for (const auto& w : rs.w) {
        const double m = std::abs(w);
        if (std::abs(m - 1.0) < 1e-9)
            throw BoundaryAmbiguousError("jensen_residual: root within 1e-9 of the circle");
        if (m < 1.0) zero_sum.add(-std::log(m));
    }
    const double ln_c0 =
        std::log(std::abs(rl.multipliers[0])) + log_coeff(rl.seq, 0);
    const CircleIntegral ci = circle_log_mean(rl, r, 1e-9);
    return std::abs(ci.value - ln_c0 - zero_sum.value());
}

inline double counting_integral_Ng(const Realization& rl, double r, double tol = 1e-9) {
    int64_t k = -1;
    for (int64_t n = 0; n <= rl.degree; ++n)
        if (log_coeff(rl.seq, n) != kNegInf) {
            k = n;
            break;
        }
    if (k < 0) throw DomainError("counting_integral_Ng: empty support");
    return circle_log_mean(rl, r, tol).value - log_coeff(rl.seq, k);
}

inline double max_modulus_estimate(const Realization& rl, double r, int64_t nodes) {
    if (nodes < 1) throw DomainError("max_modulus_estimate: nodes must be >= 1");
    detail::ScaledPoly sp = detail::scale_to_disc(rl, r);
    const double two_pi = 2.0 * std::numbers::pi_v<double>;
    double best = 0.0;
    for (int64_t i = 0; i < nodes; ++i) {
        const double th = two_pi * double(i) / double(nodes);
        best = std::max(best,
                        std::abs(detail::horner(sp.b, {std::cos(th), std::sin(th)})));
    }
    return best * std::exp(sp.shift);
}

}  // namespace gef
