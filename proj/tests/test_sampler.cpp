#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "gef/sampler.hpp"

using namespace gef;
using Catch::Approx;

namespace {

bool in_ranges(const std::vector<IndexRange>& v, int64_t n) {
    for (const auto& g : v)
        if (n >= g.lo && n <= g.hi) return true;
    return false;
}

}  // namespace

TEST_CASE("realizations are reproducible and fully tagged") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    auto a = sample_realization(seq, 12, Law::complex_gaussian, 7, 3);
    auto b = sample_realization(seq, 12, Law::complex_gaussian, 7, 3);
    REQUIRE(a.degree == 12);
    REQUIRE(a.law == Law::complex_gaussian);
    REQUIRE(a.seed == 7);
    REQUIRE(a.trial_index == 3);
    REQUIRE(a.multipliers.size() == 13);
    for (size_t i = 0; i < a.multipliers.size(); ++i)
        REQUIRE(a.multipliers[i] == b.multipliers[i]);

    auto c = sample_realization(seq, 12, Law::complex_gaussian, 7, 4);
    bool differs = false;
    for (size_t i = 0; i < a.multipliers.size(); ++i)
        differs = differs || (a.multipliers[i] != c.multipliers[i]);
    REQUIRE(differs);

    REQUIRE_THROWS_AS(sample_realization(seq, -1, Law::complex_gaussian, 7, 0), DomainError);
    REQUIRE_THROWS_AS(sample_realization(seq, 4, Law::bounded_modulus, 7, 0), DomainError);
    REQUIRE_THROWS_AS(ModulusLaw::uniform(0.0, 1.0), DomainError);
    REQUIRE_THROWS_AS(ModulusLaw::uniform(2.0, 1.0), DomainError);
}

TEST_CASE("multiplier laws have the right marginals") {
    // multipliers within one realization are iid, so one long vector is a
    // cheap large sample
    auto seq = LogCoefficientSequence::half_power();
    const int64_t d = 200000;
    const auto n = double(d) + 1.0;

    auto gs = sample_realization(seq, d, Law::complex_gaussian, 11, 0);
    double sum_sq = 0.0;
    int tail = 0;
    for (const auto& z : gs.multipliers) {
        sum_sq += std::norm(z);
        if (std::norm(z) > 1.0) ++tail;
    }
    REQUIRE(std::abs(sum_sq / n - 1.0) < 4.0 / std::sqrt(n));
    double p = std::exp(-1.0);
    REQUIRE(std::abs(tail - p * n) < 4.0 * std::sqrt(p * (1.0 - p) * n));

    auto st = sample_realization(seq, d, Law::steinhaus_phase, 11, 0);
    double sre = 0.0, sim = 0.0;
    for (const auto& z : st.multipliers) {
        REQUIRE(std::abs(std::abs(z) - 1.0) < 1e-12);
        sre += z.real();
        sim += z.imag();
    }
    REQUIRE(std::abs(sre / n) < 4.0 * std::sqrt(0.5 / n));
    REQUIRE(std::abs(sim / n) < 4.0 * std::sqrt(0.5 / n));

    auto mlaw = ModulusLaw::uniform(0.5, 1.5);
    auto bd = sample_realization(seq, d, Law::bounded_modulus, 11, 0, mlaw);
    double sum_mod = 0.0, lo = 10.0, hi = 0.0;
    for (const auto& z : bd.multipliers) {
        double m = std::abs(z);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        sum_mod += m;
    }
    REQUIRE(lo >= 0.5);
    REQUIRE(hi <= 1.5);
    // uniform on [0.5, 1.5]: sd = 1/sqrt(12)
    REQUIRE(std::abs(sum_mod / n - 1.0) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("gap support shapes the multiplier vector") {
    auto seq = LogCoefficientSequence::gap_half_power();
    auto rl = sample_realization(seq, 60, Law::complex_gaussian, 3, 1);
    for (int64_t n = 0; n <= 60; ++n) {
        bool supported = (n == 0) || n == 2 || n == 3 || n == 8 || n == 21 || n == 55;
        if (supported)
            REQUIRE(std::abs(rl.multipliers[size_t(n)]) > 0.0);
        else
            REQUIRE(rl.multipliers[size_t(n)] == std::complex<double>{});
    }
}

TEST_CASE("multiplier tails respect the gaussian envelope at realization level") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    const int trials = 20000;
    int over1 = 0, over15 = 0;
    for (int t = 0; t < trials; ++t) {
        auto rl = sample_realization(seq, 1, Law::complex_gaussian, 99, t);
        double m = std::abs(rl.multipliers[1]);
        if (m > 1.0) ++over1;
        if (m > 1.5) ++over15;
    }
    auto band = [&](int k, double prob) {
        double sd = std::sqrt(prob * (1.0 - prob) * trials);
        return std::abs(k - prob * trials) < 4.0 * sd;
    };
    REQUIRE(band(over1, std::exp(-1.0)));
    REQUIRE(band(over15, std::exp(-2.25)));
}

TEST_CASE("omega_1 probability parts are certified lower bounds") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    auto pr = ln_prob_omega1(seq, 1.5);

    auto fr0 = functionals(seq, 1.5, 0.5);
    REQUIRE(pr.n_strict == fr0.N);
    REQUIRE(pr.delta_used == Approx(1.0 / (2.0 * std::log(double(fr0.N)))).epsilon(1e-14));
    auto fr = functionals(seq, 1.5, pr.delta_used);
    REQUIRE(pr.n_slack == fr.N_delta);

    REQUIRE(pr.parts[0] < 0.0);
    REQUIRE(pr.parts[1] < 0.0);
    REQUIRE(pr.parts[2] < 0.0);
    REQUIRE(pr.parts[3] < 0.0);
    REQUIRE(pr.parts[3] > -0.5);
    REQUIRE(pr.ln_total ==
            Approx(pr.parts[0] + pr.parts[1] + pr.parts[2] + pr.parts[3]).epsilon(1e-15));
    // the directly computed slack count beats the envelope
    REQUIRE(pr.parts[2] >= pr.ln_a3_envelope);

    // closed forms of the first two parts, from the functional values
    double N = double(fr.N), lnN = std::log(N);
    double a1 = -4.0 * std::exp(2.0) * std::pow(N, 2.0 / 3.0) * std::exp(4.0 * std::sqrt(lnN));
    REQUIRE(pr.parts[0] == Approx(a1).epsilon(1e-12));
    double a2 = -fr.s - 4.0 / 3.0 * N * lnN - N * std::log(2.0);
    REQUIRE(pr.parts[1] == Approx(a2).epsilon(1e-12));
    REQUIRE(pr.parts[2] ==
            Approx(-double(fr.N_delta) * std::log(2.0 * std::pow(N, 4.0 / 3.0))).epsilon(1e-12));

    auto pr_fixed = ln_prob_omega1(seq, 1.5, 0.25);
    REQUIRE(pr_fixed.delta_used == 0.25);

    REQUIRE_THROWS_AS(ln_prob_omega1(seq, 0.9), DegenerateRegimeError);   // N = 0
    REQUIRE_THROWS_AS(ln_prob_omega1(seq, 1.05), DegenerateRegimeError);  // N = 1
    auto no_const = LogCoefficientSequence::from_table(
        {-std::numeric_limits<double>::infinity(), 0.3, 0.2});
    REQUIRE_THROWS_AS(ln_prob_omega1(no_const, 1.5), DomainError);
    REQUIRE_THROWS_AS(ln_prob_omega1(seq, -2.0), DomainError);

    auto hp = ln_prob_omega1(LogCoefficientSequence::half_power(), 2.0);
    REQUIRE(hp.ln_total < 0.0);
    REQUIRE(std::isfinite(hp.ln_total));
}

TEST_CASE("conditional samples honor every tier cap") {
    for (auto [seq, r] : {std::pair{LogCoefficientSequence::sqrt_factorial(), 1.5},
                          std::pair{LogCoefficientSequence::gap_half_power(), 1.3}}) {
        auto fr0 = functionals(seq, r, 0.5);
        REQUIRE(fr0.N >= 2);
        double lnN = std::log(double(fr0.N));
        double du = 1.0 / (2.0 * lnN);
        auto fr = functionals(seq, r, du);
        double lr = std::log(r);
        double t0 = 2.0 * std::exp(1.0) * std::cbrt(double(fr.N)) *
                    std::exp(2.0 * std::sqrt(lnN)) / std::exp(log_coeff(seq, 0));
        int64_t want_degree =
            std::max(truncation_degree(seq, r, 1e-9), fr.members_N_delta.back().hi);

        for (int t = 0; t < 300; ++t) {
            auto rl = sample_omega1_conditional(seq, r, 17, t);
            REQUIRE(rl.degree == want_degree);
            REQUIRE(std::abs(rl.multipliers[0]) >= t0 * (1.0 - 1e-12));
            for (int64_t n = 1; n <= rl.degree; ++n) {
                double lm = log_coeff(seq, n);
                double m = std::abs(rl.multipliers[size_t(n)]);
                if (lm == -std::numeric_limits<double>::infinity()) {
                    REQUIRE(m == 0.0);
                } else if (in_ranges(fr.members_N, n)) {
                    double cap = std::exp(-(lm + double(n) * lr) - 2.0 / 3.0 * lnN);
                    REQUIRE(m <= cap * (1.0 + 1e-12));
                } else if (in_ranges(fr.members_N_delta, n)) {
                    REQUIRE(m <= std::pow(double(fr.N), -2.0 / 3.0) * (1.0 + 1e-12));
                } else {
                    REQUIRE(m <= double(n) * (1.0 + 1e-12));
                }
            }
        }
    }

    // determinism
    auto seq = LogCoefficientSequence::sqrt_factorial();
    auto a = sample_omega1_conditional(seq, 1.5, 21, 5);
    auto b = sample_omega1_conditional(seq, 1.5, 21, 5);
    for (size_t i = 0; i < a.multipliers.size(); ++i)
        REQUIRE(a.multipliers[i] == b.multipliers[i]);
    REQUIRE_THROWS_AS(sample_omega1_conditional(seq, 1.05, 1, 0), DegenerateRegimeError);
}

TEST_CASE("conditional moduli follow the truncated rayleigh law") {
    auto seq = LogCoefficientSequence::sqrt_factorial();
    const double r = 1.5;
    auto fr0 = functionals(seq, r, 0.5);
    double lnN = std::log(double(fr0.N));
    auto fr = functionals(seq, r, 1.0 / (2.0 * lnN));
    double t0 = 2.0 * std::exp(1.0) * std::cbrt(double(fr.N)) *
                std::exp(2.0 * std::sqrt(lnN));
    int64_t pick = fr.members_N.front().lo;  // one strict member
    double cap = std::exp(-(log_coeff(seq, pick) + double(pick) * std::log(r)) -
                          2.0 / 3.0 * lnN);

    const int trials = 4000;
    double u_top = 0.0, u_mem = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto rl = sample_omega1_conditional(seq, r, 4242, t);
        double x0 = std::abs(rl.multipliers[0]);
        // conditional tail transform is uniform on (0, 1]
        u_top += std::exp(t0 * t0 - x0 * x0);
        double xm = std::abs(rl.multipliers[size_t(pick)]);
        u_mem += -std::expm1(-xm * xm) / -std::expm1(-cap * cap);
    }
    double band = 4.0 / std::sqrt(12.0 * trials);
    REQUIRE(std::abs(u_top / trials - 0.5) < band);
    REQUIRE(std::abs(u_mem / trials - 0.5) < band);
}

TEST_CASE("conditional samples dominate the constant term") {
    for (auto [seq, r, trials] :
         {std::tuple{LogCoefficientSequence::sqrt_factorial(), 1.5, 500},
          std::tuple{LogCoefficientSequence::gap_half_power(), 1.3, 200}}) {
        for (int t = 0; t < trials; ++t) {
            auto rl = sample_omega1_conditional(seq, r, 101, t);
            auto d = check_dominance(rl, r);
            REQUIRE(d.ok);
            REQUIRE(d.ln_lhs - d.ln_rhs > 1.0);
        }
    }
}

TEST_CASE("dominance checker on crafted realizations") {
    auto seq = LogCoefficientSequence::from_table({0.0, 0.0});
    Realization rl;
    rl.seq = seq;
    rl.degree = 1;
    rl.multipliers = {{3.0, 0.0}, {1.0, 0.0}};
    auto d = check_dominance(rl, 1.0);
    REQUIRE(d.ok);
    REQUIRE(d.ln_lhs == Approx(std::log(3.0)).epsilon(1e-15));
    REQUIRE(d.ln_rhs == Approx(0.0).margin(1e-15));

    rl.multipliers = {{1.0, 0.0}, {5.0, 0.0}};
    REQUIRE_FALSE(check_dominance(rl, 1.0).ok);

    rl.multipliers = {{0.0, 0.0}, {5.0, 0.0}};
    auto z = check_dominance(rl, 1.0);
    REQUIRE_FALSE(z.ok);
    REQUIRE(z.ln_lhs == -std::numeric_limits<double>::infinity());
}
