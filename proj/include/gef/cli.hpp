#pragma once

// Front-end plumbing shared by the gef binary and the CLI tests: experiment
// manifests, the r-grid grammar, deterministic CSV/JSONL emission, and the
// verify-mode verdicts. Everything writes through std::ostream so tests can
// run against string streams.

#include <nlohmann/json.hpp>

#include <iomanip>
#include <optional>
#include <ostream>

#include "gef/asymptotics.hpp"

namespace gef {

// ---- manifest ---------------------------------------------------------------

struct ExperimentManifest {
    std::string command;
    std::string family;
    std::string law;
    std::string r_grid;
    double delta = 0.0;
    double eps = 0.0;
    int64_t trials = 0;
    uint64_t seed = 0;
    std::string tool_version = kVersion;
    std::string output_hash;  // fnv1a-64 of the output bytes, hex

    bool operator==(const ExperimentManifest&) const = default;
};

inline std::string emit_manifest(const ExperimentManifest& m) {
    nlohmann::json j{{"command", m.command},   {"family", m.family},
                     {"law", m.law},           {"r_grid", m.r_grid},
                     {"delta", m.delta},       {"eps", m.eps},
                     {"trials", m.trials},     {"seed", m.seed},
                     {"tool_version", m.tool_version}, {"output_hash", m.output_hash}};
    return j.dump(2) + "\n";
}

inline ExperimentManifest parse_manifest(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentManifest m;
    m.command = j.at("command").get<std::string>();
    m.family = j.at("family").get<std::string>();
    m.law = j.at("law").get<std::string>();
    m.r_grid = j.at("r_grid").get<std::string>();
    m.delta = j.at("delta").get<double>();
    m.eps = j.at("eps").get<double>();
    m.trials = j.at("trials").get<int64_t>();
    m.seed = j.at("seed").get<uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.output_hash = j.at("output_hash").get<std::string>();
    return m;
}

inline std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    std::ostringstream ss;
    ss << std::hex << std::setfill('0') << std::setw(16) << h;
    return ss.str();
}

// ---- argument grammars ------------------------------------------------------

// "log:r0:r1:K" or a comma-separated radius list "1.2,1.5"
inline std::vector<double> parse_r_grid(const std::string& spec) {
    if (spec.rfind("log:", 0) == 0) {
        double r0 = 0, r1 = 0;
        int k = 0;
        char tail = 0;
        if (std::sscanf(spec.c_str(), "log:%lf:%lf:%d%c", &r0, &r1, &k, &tail) != 3)
            throw DomainError("r-grid: expected log:r0:r1:K, got '" + spec + "'");
        return log_grid(r0, r1, k);  // validates r0, r1, k
    }
    if (!spec.empty() && spec.back() == ',')
        throw DomainError("r-grid: trailing comma in '" + spec + "'");
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t used = 0;
        double r = 0;
        try {
            r = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw DomainError("r-grid: bad radius '" + tok + "'");
        }
        if (used != tok.size() || !(r > 0.0) || !std::isfinite(r))
            throw DomainError("r-grid: bad radius '" + tok + "'");
        out.push_back(r);
    }
    if (out.empty()) throw DomainError("r-grid: empty spec");
    return out;
}

inline LogCoefficientSequence family_by_name(const std::string& name) {
    if (name == "sqrt_factorial") return LogCoefficientSequence::sqrt_factorial();
    if (name == "half_power") return LogCoefficientSequence::half_power();
    if (name == "gap_half_power") return LogCoefficientSequence::gap_half_power();
    throw DomainError("unknown family '" + name + "'");
}

inline Law law_by_name(const std::string& name) {
    if (name == "gaussian") return Law::complex_gaussian;
    if (name == "steinhaus") return Law::steinhaus_phase;
    if (name == "bounded") return Law::bounded_modulus;
    throw DomainError("unknown law '" + name + "'");
}

namespace detail {

// shortest round-trip decimal, '.' radix regardless of locale
inline std::string fmt(double x) {
    std::ostringstream ss;
    ss.imbue(std::locale::classic());
    ss << std::setprecision(17) << x;
    return ss.str();
}

}  // namespace detail

// ---- emitters ---------------------------------------------------------------

inline void run_functionals_csv(const LogCoefficientSequence& seq,
                                const std::vector<double>& grid, double delta,
                                std::ostream& os) {
    os << "r,N,N_delta,m,m_delta,s_half,s,ln_mu,nu,ln_S_sq\n";
    for (double r : grid) {
        auto fr = functionals(seq, r, delta);
        os << detail::fmt(r) << ',' << fr.N << ',' << fr.N_delta << ',' << fr.m << ','
           << fr.m_delta << ',' << detail::fmt(fr.s_half) << ',' << detail::fmt(fr.s)
           << ',' << detail::fmt(fr.ln_mu) << ',' << fr.nu << ','
           << detail::fmt(fr.ln_S_sq) << '\n';
    }
}

inline void run_sample_jsonl(const LogCoefficientSequence& seq, double r, Law law,
                             const ModulusLaw& mlaw, int64_t trials, uint64_t seed,
                             std::ostream& os) {
    if (trials < 1) throw DomainError("sample: trials must be >= 1");
    const int64_t degree = truncation_degree(seq, r, 1e-9);
    for (int64_t t = 0; t < trials; ++t) {
        auto rl = sample_realization(seq, degree, law, seed, t, mlaw);
        double max_abs = 0.0, sum_sq = 0.0;
        int64_t support = 0;
        for (int64_t n = 0; n <= degree; ++n) {
            const double a = std::abs(rl.multipliers[size_t(n)]);
            if (log_coeff(seq, n) == kNegInf) continue;
            ++support;
            max_abs = std::max(max_abs, a);
            sum_sq += a * a;
        }
        nlohmann::json j{{"trial", t},
                         {"r", r},
                         {"degree", degree},
                         {"law", law_name(law)},
                         {"support", support},
                         {"xi0_re", rl.multipliers[0].real()},
                         {"xi0_im", rl.multipliers[0].imag()},
                         {"max_abs_xi", max_abs},
                         {"mean_sq_xi", support ? sum_sq / double(support) : 0.0}};
        os << j.dump() << '\n';
    }
}

inline void run_zeros_csv(const LogCoefficientSequence& seq, double r, int64_t trials,
                          uint64_t seed, std::ostream& os) {
    if (trials < 1) throw DomainError("zeros: trials must be >= 1");
    const int64_t degree = truncation_degree(seq, r, 1e-9);
    os << "trial,count_roots,count_winding,margin,jensen_residual\n";
    for (int64_t t = 0; t < trials; ++t) {
        auto rl = sample_realization(seq, degree, Law::complex_gaussian, seed, t);
        int64_t cr = -1, cw = -1;  // -1 marks a boundary-ambiguous trial
        double margin = 0.0, jres = std::numeric_limits<double>::quiet_NaN();
        try {
            auto z = count_zeros_roots(rl, r);
            cr = z.count;
            margin = z.boundary_margin;
            jres = jensen_residual(rl, r);
        } catch (const BoundaryAmbiguousError&) {
        }
        try {
            cw = count_zeros_winding(rl, r).count;
        } catch (const BoundaryAmbiguousError&) {
        } catch (const MethodFailureError&) {
        }
        os << t << ',' << cr << ',' << cw << ',' << detail::fmt(margin) << ','
           << detail::fmt(jres) << '\n';
    }
}

inline void run_holeprob_csv(const LogCoefficientSequence& seq,
                             const std::vector<double>& grid, Law law,
                             const ModulusLaw& mlaw, int64_t trials, double eps,
                             uint64_t seed, std::ostream& os) {
    os << "r,trials,holes,p_hat,ci_low,ci_high,ln_p_omega1,p0_lower,p0_upper,"
          "dominance_certified\n";
    for (double r : grid) {
        auto hb = estimate_hole_probability(seq, r, law, trials, seed, eps, mlaw);
        os << detail::fmt(r) << ',' << hb.trials << ',' << hb.holes_observed << ','
           << detail::fmt(hb.p_hat) << ',' << detail::fmt(hb.ci_low) << ','
           << detail::fmt(hb.ci_high) << ',' << detail::fmt(hb.ln_p_omega1) << ','
           << detail::fmt(hb.p0_lower) << ',' << detail::fmt(hb.p0_upper) << ','
           << (hb.dominance_certified ? 1 : 0) << '\n';
    }
}

// ---- verify mode ------------------------------------------------------------

struct VerifyOutcome {
    bool pass = false;
    std::string detail;
};

inline void write_scan_csv(const ScanReport& rep, std::ostream& os) {
    os << "r,lhs,rhs,lhs2,rhs2,skipped,pass\n";
    for (const auto& p : rep.payload)
        os << detail::fmt(p.r) << ',' << detail::fmt(p.lhs) << ',' << detail::fmt(p.rhs)
           << ',' << detail::fmt(p.lhs2) << ',' << detail::fmt(p.rhs2) << ','
           << (p.skipped ? 1 : 0) << ',' << (p.pass ? 1 : 0) << '\n';
}

inline void write_trajectory_csv(const std::vector<TrajectoryPoint>& traj,
                                 std::ostream& os) {
    os << "r,ratio,ln_n,ln_s,skipped\n";
    for (const auto& p : traj)
        os << detail::fmt(p.r) << ',' << detail::fmt(p.ratio) << ','
           << detail::fmt(p.ln_n) << ',' << detail::fmt(p.ln_s) << ','
           << (p.skipped ? 1 : 0) << '\n';
}

// desk-scale acceptance thresholds for `gef verify`
inline constexpr double kVerifyMaxLogMeasure = 0.7;

inline VerifyOutcome verify_check(const std::string& check,
                                  const LogCoefficientSequence& seq,
                                  const std::vector<double>& grid, double eps,
                                  int64_t trials, std::optional<uint64_t> seed,
                                  std::ostream& os) {
    const Family family = seq.family;
    VerifyOutcome out;
    std::ostringstream msg;
    if (check == "lemma32") {
        auto rep = scan_lemma32(seq, grid);
        write_scan_csv(rep, os);
        out.pass = rep.log_measure_of_violations <= kVerifyMaxLogMeasure;
        msg << "log_measure=" << rep.log_measure_of_violations
            << " pass_fraction=" << rep.pass_fraction;
    } else if (check == "lemma33") {
        auto rep = scan_lemma33(seq, grid, eps);
        write_scan_csv(rep, os);
        // the acceptance window: no violations once s > e
        out.pass = true;
        for (const auto& p : rep.payload) {
            if (p.skipped || p.pass) continue;
            if (functionals(seq, p.r, 0.5).s > std::exp(1.0)) out.pass = false;
        }
        msg << "log_measure=" << rep.log_measure_of_violations
            << " pass_fraction=" << rep.pass_fraction;
    } else if (check == "lemma34") {
        auto rep = scan_lemma34(grid);
        write_scan_csv(rep, os);
        out.pass = rep.log_measure_of_violations <= kVerifyMaxLogMeasure;
        msg << "log_measure=" << rep.log_measure_of_violations
            << " pass_fraction=" << rep.pass_fraction;
    } else if (check == "sharpness") {
        auto traj = sharpness_trajectory(seq, grid);
        write_trajectory_csv(traj, os);
        out.pass = true;
        double last_ok = -1.0;
        for (const auto& p : traj) {
            if (p.skipped) continue;
            if (family == Family::half_power || family == Family::sqrt_factorial) {
                if (p.r >= 100.0 && (p.ratio < 0.4 || p.ratio > 0.6)) out.pass = false;
            } else if (family == Family::gap_half_power) {
                if (p.r >= 1e6 && p.ratio > 0.2) out.pass = false;
            }
            last_ok = p.ratio;
        }
        msg << "last_ratio=" << last_ok;
    } else if (check == "nongaussian") {
        if (!seed) throw DomainError("verify nongaussian: --seed is required");
        auto hs = nongaussian_hole_scan(seq, Law::bounded_modulus,
                                        ModulusLaw::uniform(0.5, 1.5), grid, trials,
                                        *seed);
        write_scan_csv(hs.report, os);
        out.pass = std::isfinite(hs.r_star);  // holes die out inside the grid
        msg << "r_star=" << hs.r_star;
    } else if (check == "fm") {
        if (!seed) throw DomainError("verify fm: --seed is required");
        auto fm = filevych_mahola_check(seq, grid, trials, *seed);
        write_scan_csv(fm.t42, os);
        out.pass = fm.t42.pass_fraction == 1.0;
        msg << "fitted_c=" << fm.fitted_c << " pass_fraction=" << fm.t42.pass_fraction;
    } else {
        throw DomainError("unknown check '" + check + "'");
    }
    out.detail = msg.str();
    return out;
}

}  // namespace gef
