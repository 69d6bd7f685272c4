#pragma once

// Grid scans of the growth lemmas, the sharpness trajectories, the
// non-Gaussian hole dichotomy, and the counting-integral inequalities.
// Violations are never discarded: every scan returns the violating radii
// as disjoint log-cells whose measure Sum ln(hi/lo) is the reported
// exceptional set.

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gef/holeprob.hpp"

namespace gef {

struct ScanPoint {
    double r = 0.0;
    double lhs = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    double lhs2 = std::numeric_limits<double>::quiet_NaN();
    double rhs2 = std::numeric_limits<double>::quiet_NaN();
    bool skipped = false;
    bool pass = true;
};

struct ScanReport {
    std::string inequality_id;
    std::string grid_desc;
    double pass_fraction = 1.0;  // over evaluated points
    std::vector<std::pair<double, double>> violating_intervals;
    double log_measure_of_violations = 0.0;
    std::vector<ScanPoint> payload;
};

namespace detail {

inline std::string describe_grid(const std::vector<double>& g) {
    std::ostringstream ss;
    ss << "log:" << g.front() << ":" << g.back() << ":" << g.size();
    return ss.str();
}

// Each grid point owns the log-cell between the geometric midpoints to its
// neighbours; runs of violating cells merge into disjoint sorted intervals.
inline void assemble_report(ScanReport& rep) {
    const auto& pts = rep.payload;
    const size_t k = pts.size();
    int64_t evaluated = 0, passed = 0;
    for (const auto& p : pts)
        if (!p.skipped) {
            ++evaluated;
            if (p.pass) ++passed;
        }
    rep.pass_fraction = evaluated == 0 ? 1.0 : double(passed) / double(evaluated);
    rep.violating_intervals.clear();
    rep.log_measure_of_violations = 0.0;
    auto cell_lo = [&](size_t i) {
        return i == 0 ? pts[0].r : std::sqrt(pts[i - 1].r * pts[i].r);
    };
    auto cell_hi = [&](size_t i) {
        return i + 1 == k ? pts[i].r : std::sqrt(pts[i].r * pts[i + 1].r);
    };
    for (size_t i = 0; i < k; ++i) {
        if (pts[i].skipped || pts[i].pass) continue;
        const double lo = cell_lo(i), hi = cell_hi(i);
        if (!rep.violating_intervals.empty() &&
            rep.violating_intervals.back().second >= lo * (1.0 - 1e-15))
            rep.violating_intervals.back().second = hi;
        else
            rep.violating_intervals.emplace_back(lo, hi);
    }
    for (const auto& [lo, hi] : rep.violating_intervals)
        rep.log_measure_of_violations += std::log(hi / lo);
}

}  // namespace detail

// m(r e^{-delta}) > e m(r) exp{-2 sqrt(ln m(r))} and
// m(r e^{+delta}) < e m(r) exp{+2 sqrt(ln m(r))}, delta = 1/(2 ln m(r));
// points with m(r) < 2 (or a saturated index sum) are skipped
inline ScanReport scan_lemma32(const LogCoefficientSequence& seq,
                               const std::vector<double>& r_grid) {
    if (r_grid.empty()) throw DomainError("scan_lemma32: empty grid");
    ScanReport rep;
    rep.inequality_id = "lemma32";
    rep.grid_desc = detail::describe_grid(r_grid);
    rep.payload.resize(r_grid.size());
    for (size_t i = 0; i < r_grid.size(); ++i) {
        ScanPoint& p = rep.payload[i];
        p.r = r_grid[i];
        const auto fr = functionals(seq, p.r, 0.5);
        if (fr.m < 2 || fr.m_saturated) {
            p.skipped = true;
            continue;
        }
        const double lnm = std::log(double(fr.m));
        const double delta = 1.0 / (2.0 * lnm);
        const auto below = functionals(seq, p.r * std::exp(-delta), 0.5);
        const auto above = functionals(seq, p.r * std::exp(delta), 0.5);
        if (below.m_saturated || above.m_saturated) {
            p.skipped = true;
            continue;
        }
        const double env = std::exp(1.0) * double(fr.m);
        p.lhs = double(below.m);
        p.rhs = env * std::exp(-2.0 * std::sqrt(lnm));
        p.lhs2 = double(above.m);
        p.rhs2 = env * std::exp(2.0 * std::sqrt(lnm));
        p.pass = p.lhs > p.rhs && p.lhs2 < p.rhs2;
    }
    detail::assemble_report(rep);
    return rep;
}

// N(r) < s^{1/2}(r) exp{(1+eps) sqrt(ln s(r))}; s(r) <= 1 points are skipped
inline ScanReport scan_lemma33(const LogCoefficientSequence& seq,
                               const std::vector<double>& r_grid, double eps) {
    if (r_grid.empty()) throw DomainError("scan_lemma33: empty grid");
    if (!(eps > 0.0)) throw DomainError("scan_lemma33: eps must be positive");
    ScanReport rep;
    rep.inequality_id = "lemma33";
    rep.grid_desc = detail::describe_grid(r_grid);
    rep.payload.resize(r_grid.size());
    for (size_t i = 0; i < r_grid.size(); ++i) {
        ScanPoint& p = rep.payload[i];
        p.r = r_grid[i];
        const auto fr = functionals(seq, p.r, 0.5);
        if (!(fr.s > 1.0)) {
            p.skipped = true;
            continue;
        }
        p.lhs = double(fr.N);
        p.rhs = std::sqrt(fr.s) * std::exp((1.0 + eps) * std::sqrt(std::log(fr.s)));
        p.pass = p.lhs < p.rhs;
    }
    detail::assemble_report(rep);
    return rep;
}

// half_power construction: N(r) > sqrt(s)/ln^3 s, plus the sharper
// intermediate N(r) > sqrt(s/ln^5 s); s(r) <= e points are skipped
inline ScanReport scan_lemma34(const std::vector<double>& r_grid) {
    if (r_grid.empty()) throw DomainError("scan_lemma34: empty grid");
    const auto seq = LogCoefficientSequence::half_power();
    ScanReport rep;
    rep.inequality_id = "lemma34";
    rep.grid_desc = detail::describe_grid(r_grid);
    rep.payload.resize(r_grid.size());
    for (size_t i = 0; i < r_grid.size(); ++i) {
        ScanPoint& p = rep.payload[i];
        p.r = r_grid[i];
        const auto fr = functionals(seq, p.r, 0.5);
        if (!(fr.s > std::exp(1.0))) {
            p.skipped = true;
            continue;
        }
        const double ls = std::log(fr.s);
        p.lhs = double(fr.N);
        p.rhs = std::sqrt(fr.s) / (ls * ls * ls);
        p.lhs2 = p.lhs;
        p.rhs2 = std::sqrt(fr.s / std::pow(ls, 5.0));
        p.pass = p.lhs > p.rhs && p.lhs2 > p.rhs2;
    }
    detail::assemble_report(rep);
    return rep;
}

struct TrajectoryPoint {
    double r = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();  // ln N / ln s
    double ln_n = std::numeric_limits<double>::quiet_NaN();
    double ln_s = std::numeric_limits<double>::quiet_NaN();
    bool skipped = false;
};

// deterministic trajectory of ln N(r)/ln s(r), the desk-scale proxy for
// ln(p0(r)-s(r))/ln s(r)
inline std::vector<TrajectoryPoint> sharpness_trajectory(
    const LogCoefficientSequence& seq, const std::vector<double>& r_grid) {
    if (r_grid.empty()) throw DomainError("sharpness_trajectory: empty grid");
    std::vector<TrajectoryPoint> out(r_grid.size());
    for (size_t i = 0; i < r_grid.size(); ++i) {
        TrajectoryPoint& p = out[i];
        p.r = r_grid[i];
        const auto fr = functionals(seq, p.r, 0.5);
        if (!(fr.s > 1.0) || fr.N < 1) {
            p.skipped = true;
            continue;
        }
        p.ln_n = std::log(double(fr.N));
        p.ln_s = std::log(fr.s);
        p.ratio = p.ln_n / p.ln_s;
    }
    return out;
}

struct HoleScan {
    ScanReport report;  // lhs = hole frequency, rhs = 0
    double r_star = kInf;  // smallest grid radius beyond which no trial has a hole
};

// per-radius Monte-Carlo frequency of hole-free draws; a point passes when
// the frequency is exactly zero, matching the no-hole dichotomy
inline HoleScan nongaussian_hole_scan(const LogCoefficientSequence& seq, Law law,
                                      const ModulusLaw& mlaw,
                                      const std::vector<double>& r_grid, int64_t trials,
                                      uint64_t seed) {
    if (r_grid.empty()) throw DomainError("nongaussian_hole_scan: empty grid");
    if (trials < 1) throw DomainError("nongaussian_hole_scan: trials must be >= 1");
    HoleScan hs;
    hs.report.inequality_id = "nongaussian";
    hs.report.grid_desc = detail::describe_grid(r_grid);
    hs.report.payload.resize(r_grid.size());
    for (size_t i = 0; i < r_grid.size(); ++i) {
        ScanPoint& p = hs.report.payload[i];
        p.r = r_grid[i];
        const int64_t degree = truncation_degree(seq, p.r, 1e-9);
        std::atomic<int64_t> holes{0};
        parallel_trials(trials, [&](int64_t t) {
            auto rl = sample_realization(seq, degree, law, seed, t, mlaw);
            bool amb = false;
            if (detail::hole_trial(rl, p.r, amb)) holes.fetch_add(1);
        });
        p.lhs = double(holes.load()) / double(trials);
        p.rhs = 0.0;
        p.pass = holes.load() == 0;
    }
    detail::assemble_report(hs.report);
    for (size_t i = hs.report.payload.size(); i-- > 0;) {
        if (!hs.report.payload[i].pass) break;
        hs.r_star = hs.report.payload[i].r;
    }
    return hs;
}

struct FmReport {
    ScanReport t42;  // lhs = worst N_g over trials, rhs = 1/(2e) + ln S_g
    double fitted_c = 0.0;
    int64_t evaluated_trials = 0;
    int64_t skipped_points = 0;
};

// Steinhaus-phase counting integrals: the hard bound
// N_g(r,w) <= 1/(2e) + ln S_g(r) per trial, and the smallest per-sample C
// with ln S_g <= N_g + C ln N_g, reported as the max over all samples
inline FmReport filevych_mahola_check(const LogCoefficientSequence& seq,
                                      const std::vector<double>& r_grid, int64_t trials,
                                      uint64_t seed) {
    if (r_grid.empty()) throw DomainError("filevych_mahola_check: empty grid");
    if (trials < 1) throw DomainError("filevych_mahola_check: trials must be >= 1");
    FmReport fm;
    fm.t42.inequality_id = "fm_t42";
    fm.t42.grid_desc = detail::describe_grid(r_grid);
    fm.t42.payload.resize(r_grid.size());
    for (size_t i = 0; i < r_grid.size(); ++i) {
        ScanPoint& p = fm.t42.payload[i];
        p.r = r_grid[i];
        const int64_t degree = truncation_degree(seq, p.r, 1e-9);
        if (degree == 0) {
            p.skipped = true;
            ++fm.skipped_points;
            continue;
        }
        const auto fr = functionals(seq, p.r, 0.5);
        const double ln_s_g = 0.5 * fr.ln_S_sq;
        p.rhs = 1.0 / (2.0 * std::exp(1.0)) + ln_s_g;
        double worst_ng = kNegInf, worst_c = 0.0;
        for (int64_t t = 0; t < trials; ++t) {
            auto rl = sample_realization(seq, degree, Law::steinhaus_phase, seed, t);
            const double ng = counting_integral_Ng(rl, p.r);
            worst_ng = std::max(worst_ng, ng);
            // the per-sample C is ill-conditioned as N_g -> 1 (denominator
            // ln N_g -> 0); fit only where N_g >= e
            if (ng >= std::exp(1.0) && ln_s_g > ng)
                worst_c = std::max(worst_c, (ln_s_g - ng) / std::log(ng));
            ++fm.evaluated_trials;
        }
        p.lhs = worst_ng;
        p.lhs2 = worst_c;
        p.pass = worst_ng <= p.rhs;
        fm.fitted_c = std::max(fm.fitted_c, worst_c);
    }
    detail::assemble_report(fm.t42);
    return fm;
}

}  // namespace gef
