#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "gef/zeros.hpp"

using namespace gef;
using Catch::Approx;
using cplx = std::complex<double>;

namespace {

Realization make_rl(LogCoefficientSequence seq, std::vector<cplx> mult) {
    Realization rl;
    rl.seq = std::move(seq);
    rl.degree = int64_t(mult.size()) - 1;
    rl.multipliers = std::move(mult);
    return rl;
}

LogCoefficientSequence ones(size_t n) {
    return LogCoefficientSequence::from_table(std::vector<double>(n, 0.0));
}

}  // namespace

TEST_CASE("linear polynomial has the obvious root") {
    auto rl = make_rl(ones(2), {{0.5, 0.0}, {1.0, 0.0}});  // z + 0.5
    auto a = count_zeros_roots(rl, 1.0);
    REQUIRE(a.count == 1);
    REQUIRE(a.method == ZeroCount::Method::roots);
    REQUIRE(a.boundary_margin == Approx(0.5).epsilon(1e-12));
    REQUIRE(a.degree_used == 1);
    auto b = count_zeros_winding(rl, 1.0);
    REQUIRE(b.count == 1);
    REQUIRE(b.boundary_margin < 1e-9);

    REQUIRE(count_zeros_roots(rl, 0.4).count == 0);
    REQUIRE(count_zeros_winding(rl, 0.4).count == 0);
    REQUIRE_THROWS_AS(count_zeros_roots(rl, 0.0), DomainError);
    REQUIRE_THROWS_AS(count_zeros_roots(rl, -1.0), DomainError);
}

TEST_CASE("prescribed roots are counted exactly") {
    const cplx z1{0.3, 0.0};
    const cplx z2 = 0.7 * std::polar(1.0, std::numbers::pi / 3.0);
    const cplx z3{1.4, 0.0};
    const cplx s1 = z1 + z2 + z3, s2 = z1 * z2 + z1 * z3 + z2 * z3, s3 = z1 * z2 * z3;
    auto rl = make_rl(ones(4), {-s3, s2, -s1, {1.0, 0.0}});

    auto a = count_zeros_roots(rl, 1.0);
    REQUIRE(a.count == 2);
    REQUIRE(a.boundary_margin == Approx(0.3).epsilon(1e-10));
    auto b = count_zeros_winding(rl, 1.0);
    REQUIRE(b.count == 2);

    REQUIRE(count_zeros_roots(rl, 0.2).count == 0);
    REQUIRE(count_zeros_roots(rl, 0.5).count == 1);
    REQUIRE(count_zeros_roots(rl, 2.0).count == 3);
    REQUIRE(count_zeros_winding(rl, 2.0).count == 3);
}

TEST_CASE("monomials wind exactly k times") {
    std::vector<double> lm(8, -std::numeric_limits<double>::infinity());
    lm[5] = 0.0;
    auto seq = LogCoefficientSequence::from_table(lm);
    std::vector<cplx> mult(8, cplx{});
    mult[5] = {0.7, -0.4};
    auto rl = make_rl(seq, mult);

    for (double r : {0.7, 1.0, 2.5}) {
        auto a = count_zeros_roots(rl, r);
        REQUIRE(a.count == 5);
        REQUIRE(a.boundary_margin == Approx(r).epsilon(1e-12));  // all roots at 0
        auto b = count_zeros_winding(rl, r);
        REQUIRE(b.count == 5);
        REQUIRE(b.boundary_margin < 1e-10);
    }
}

TEST_CASE("constant realizations have no zeros") {
    auto rl = make_rl(ones(1), {{2.0, 1.0}});
    auto w = count_zeros_winding(rl, 3.0);
    REQUIRE(w.count == 0);
    REQUIRE(w.degree_used == 0);
    auto a = count_zeros_roots(rl, 3.0);
    REQUIRE(a.count == 0);

    auto dead = make_rl(ones(3), {cplx{}, cplx{}, cplx{}});
    REQUIRE_THROWS_AS(count_zeros_roots(dead, 1.0), DomainError);
}

TEST_CASE("cross-method agreement on random realizations") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    int checked = 0;
    // degree above 64 exercises the aberth path, below it the companion path
    for (auto [degree, r, trials] : {std::tuple{int64_t(120), 1.5, 40},
                                     std::tuple{int64_t(60), 1.2, 60}}) {
        for (int t = 0; t < trials; ++t) {
            auto rl = sample_realization(seq, degree, Law::complex_gaussian, 555, t);
            int64_t cr, cw;
            try {
                cr = count_zeros_roots(rl, r).count;
                cw = count_zeros_winding(rl, r).count;
            } catch (const BoundaryAmbiguousError&) {
                continue;  // legitimate flagged instance, not a disagreement
            }
            REQUIRE(cr == cw);
            ++checked;
        }
    }
    REQUIRE(checked >= 95);
}

TEST_CASE("count never exceeds the used degree") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    for (int t = 0; t < 20; ++t) {
        auto rl = sample_realization(seq, 40, Law::complex_gaussian, 31, t);
        auto zc = count_zeros_roots(rl, 2.0);
        REQUIRE(zc.count <= zc.degree_used);
        REQUIRE(zc.boundary_margin >= 0.0);
    }
}

TEST_CASE("rotation invariance of zero counts") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    const cplx phase = std::polar(1.0, 0.7);
    for (int t = 0; t < 25; ++t) {
        auto rl = sample_realization(seq, 50, Law::complex_gaussian, 77, t);
        auto rot = rl;
        for (auto& m : rot.multipliers) m *= phase;
        auto a = count_zeros_roots(rl, 1.4);
        auto b = count_zeros_roots(rot, 1.4);
        REQUIRE(a.count == b.count);
        REQUIRE(a.boundary_margin == Approx(b.boundary_margin).epsilon(1e-6));
        REQUIRE(count_zeros_winding(rl, 1.4).count == count_zeros_winding(rot, 1.4).count);
    }
}

TEST_CASE("scaling covariance of the disc substitution") {
    auto psi = LogCoefficientSequence::sqrt_factorial();
    const double lambda = 2.0;
    const int64_t d = 48;
    std::vector<double> lm1(size_t(d) + 1), lm2(size_t(d) + 1);
    for (int64_t n = 0; n <= d; ++n) {
        lm1[size_t(n)] = log_coeff(psi, n);
        lm2[size_t(n)] = lm1[size_t(n)] - double(n) * std::log(lambda);
    }
    for (int t = 0; t < 25; ++t) {
        auto base = sample_realization(LogCoefficientSequence::from_table(lm1), d,
                                       Law::complex_gaussian, 88, t);
        auto scaled = base;
        scaled.seq = LogCoefficientSequence::from_table(lm2);
        auto a = count_zeros_roots(base, 1.3);
        auto b = count_zeros_roots(scaled, lambda * 1.3);
        REQUIRE(a.count == b.count);
    }
}

TEST_CASE("circle log mean on closed-form integrands") {
    auto c0 = make_rl(ones(1), {{-1.5, 2.0}});
    auto ci = circle_log_mean(c0, 2.0, 1e-10);
    REQUIRE(ci.value == Approx(std::log(std::abs(cplx{-1.5, 2.0}))).epsilon(1e-12));
    REQUIRE(ci.quad_error <= 1e-10);
    REQUIRE(ci.r == 2.0);

    // f(z) = z - c: mean is ln max(r, |c|)
    auto root_in = make_rl(ones(2), {{-0.6, 0.1}, {1.0, 0.0}});
    double rin = std::abs(cplx{-0.6, 0.1});
    REQUIRE(circle_log_mean(root_in, 1.0, 1e-10).value == Approx(0.0).margin(1e-9));
    REQUIRE(circle_log_mean(root_in, 0.5, 1e-10).value ==
            Approx(std::log(rin)).epsilon(1e-9));

    REQUIRE_THROWS_AS(circle_log_mean(c0, 2.0, 0.0), DomainError);
}

TEST_CASE("jensen residual identities") {
    // single root at 0.5: circle mean - ln|c_0| = ln 2
    auto rl = make_rl(ones(2), {{-0.5, 0.0}, {1.0, 0.0}});
    REQUIRE(jensen_residual(rl, 1.0) < 1e-6);
    auto ci = circle_log_mean(rl, 1.0, 1e-10);
    REQUIRE(ci.value - std::log(0.5) == Approx(std::log(2.0)).epsilon(1e-9));

    // zero-free disc: mean equals ln|c_0|
    auto far = make_rl(ones(2), {{3.0, 0.0}, {1.0, 0.0}});  // root at -3
    REQUIRE(jensen_residual(far, 1.0) < 1e-6);

    auto seq = LogCoefficientSequence::sqrt_factorial();
    double worst = 0.0;
    for (int t = 0; t < 40; ++t) {
        auto r40 = sample_realization(seq, 40, Law::complex_gaussian, 4040, t);
        try {
            worst = std::max(worst, jensen_residual(r40, 1.5));
        } catch (const BoundaryAmbiguousError&) {
        }
    }
    REQUIRE(worst <= 1e-5);

    auto no_const = make_rl(ones(2), {cplx{}, {1.0, 0.0}});
    REQUIRE_THROWS_AS(jensen_residual(no_const, 1.0), DomainError);
}

TEST_CASE("counting integral matches its normalization") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    // steinhaus at degree 0: |xi_0| = 1 so N_g = 0
    auto st0 = sample_realization(seq, 0, Law::steinhaus_phase, 9, 0);
    REQUIRE(counting_integral_Ng(st0, 1.7) == Approx(0.0).margin(1e-9));

    // theorem-style upper bound, deterministic rhs for steinhaus multipliers
    for (double r : {1.2, 2.0}) {
        auto fr = functionals(seq, r, 0.1);
        double rhs = 1.0 / (2.0 * std::exp(1.0)) + 0.5 * fr.ln_S_sq;
        int64_t d = truncation_degree(seq, r, 1e-9);
        for (int t = 0; t < 30; ++t) {
            auto rl = sample_realization(seq, d, Law::steinhaus_phase, 222, t);
            REQUIRE(counting_integral_Ng(rl, r) <= rhs);
        }
    }

    // first supported index sets the normalization
    std::vector<double> lm(4, -std::numeric_limits<double>::infinity());
    lm[2] = -0.7;
    auto mono = make_rl(LogCoefficientSequence::from_table(lm),
                        {cplx{}, cplx{}, std::polar(1.0, 1.1), cplx{}});
    // f = xi_2 a_2 z^2: mean = ln|a_2| + 2 ln r, so N_g = 2 ln r
    REQUIRE(counting_integral_Ng(mono, 3.0) == Approx(2.0 * std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("max modulus estimate is a certified floor") {
    auto c0 = make_rl(ones(1), {{-1.5, 2.0}});
    REQUIRE(max_modulus_estimate(c0, 5.0, 7) ==
            Approx(std::abs(cplx{-1.5, 2.0})).epsilon(1e-12));

    std::vector<double> lm(5, -std::numeric_limits<double>::infinity());
    lm[3] = -0.2;
    std::vector<cplx> mm(5, cplx{});
    mm[3] = {0.8, 0.6};
    auto mono = make_rl(LogCoefficientSequence::from_table(lm), mm);
    REQUIRE(max_modulus_estimate(mono, 2.0, 16) ==
            Approx(std::exp(-0.2) * 8.0).epsilon(1e-12));

    auto seq = LogCoefficientSequence::sqrt_factorial();
    for (int t = 0; t < 10; ++t) {
        auto rl = sample_realization(seq, 30, Law::complex_gaussian, 66, t);
        const double r = 1.8, lr = std::log(r);
        double floor_ln = -std::numeric_limits<double>::infinity();
        for (int64_t n = 0; n <= 30; ++n) {
            double m = std::abs(rl.multipliers[size_t(n)]);
            if (m > 0.0)
                floor_ln = std::max(floor_ln,
                                    std::log(m) + log_coeff(seq, n) + double(n) * lr);
        }
        // max over >= degree+1 equispaced nodes dominates every coefficient
        REQUIRE(max_modulus_estimate(rl, r, 31) >= std::exp(floor_ln) * (1.0 - 1e-10));
    }
    REQUIRE_THROWS_AS(max_modulus_estimate(c0, 1.0, 0), DomainError);
}

TEST_CASE("boundary roots raise the ambiguity flag") {
    // root exactly on the circle
    auto on = make_rl(ones(2), {{-1.0, 0.0}, {1.0, 0.0}});  // z - 1
    REQUIRE_THROWS_AS(count_zeros_roots(on, 1.0), BoundaryAmbiguousError);
    REQUIRE_THROWS_AS(count_zeros_winding(on, 1.0), BoundaryAmbiguousError);

    // root just outside the 1e-9 window: roots method flags, a retry at a
    // perturbed radius resolves it
    auto near = make_rl(ones(2), {{-(1.0 + 5e-10), 0.0}, {1.0, 0.0}});
    REQUIRE_THROWS_AS(count_zeros_roots(near, 1.0), BoundaryAmbiguousError);
    REQUIRE(count_zeros_roots(near, 1.0 * (1.0 - 1e-6)).count == 0);
    REQUIRE(count_zeros_roots(near, 1.0 * (1.0 + 1e-6)).count == 1);
}

TEST_CASE("winding residual gate accepts clean instances") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    auto rl = sample_realization(seq, 30, Law::complex_gaussian, 12, 0);
    auto w = count_zeros_winding(rl, 1.5, 1e-6);
    REQUIRE(w.boundary_margin < 1e-6);
}
