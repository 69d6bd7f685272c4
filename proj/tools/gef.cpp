// gef: simulate random entire functions, count zeros in discs, bracket hole
// probabilities, and scan the growth inequalities on radius grids.
//
// Every run with --out writes the data file plus a sidecar
// <out>.manifest.json recording the full configuration and an fnv1a-64 hash
// of the output bytes; re-running the same configuration reproduces the
// bytes and the hash.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "gef/cli.hpp"

namespace {

struct CommonArgs {
    std::string family = "sqrt_factorial";
    std::string law = "gaussian";
    std::string r_grid;
    double r = 0.0;
    double delta = 0.1;
    double eps = 0.5;
    int64_t trials = 100;
    uint64_t seed = 0;
    bool seed_set = false;
    double mod_lo = 0.5, mod_hi = 1.5;
    std::string out;
    int threads = 0;
};

gef::ModulusLaw modulus_law(const CommonArgs& a, gef::Law law) {
    if (law == gef::Law::bounded_modulus) return gef::ModulusLaw::uniform(a.mod_lo, a.mod_hi);
    return gef::ModulusLaw::gaussian();
}

// emit to --out (plus manifest sidecar) or stdout
int deliver(const std::string& bytes, const CommonArgs& a, gef::ExperimentManifest m) {
    if (a.out.empty()) {
        std::cout << bytes;
        return 0;
    }
    std::ofstream f(a.out, std::ios::binary);
    if (!f) {
        std::cerr << "gef: cannot write '" << a.out << "'\n";
        return 2;
    }
    f << bytes;
    f.close();
    m.output_hash = gef::fnv1a_hex(bytes);
    std::ofstream mf(a.out + ".manifest.json", std::ios::binary);
    mf << gef::emit_manifest(m);
    return 0;
}

void add_common(CLI::App* cmd, CommonArgs& a, bool wants_grid, bool wants_r) {
    cmd->add_option("--family", a.family, "sqrt_factorial | half_power | gap_half_power");
    if (wants_grid) cmd->add_option("--r-grid", a.r_grid, "log:r0:r1:K or r1,r2,...")->required();
    if (wants_r) cmd->add_option("--r", a.r, "disc radius")->required();
    cmd->add_option("--seed", a.seed, "RNG seed")->each([&](const std::string&) { a.seed_set = true; });
    cmd->add_option("--trials", a.trials, "Monte Carlo trials");
    cmd->add_option("--threads", a.threads, "worker threads (default GEF_THREADS or all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random entire functions: zeros, hole probabilities, growth scans"};
    app.require_subcommand(1);

    CommonArgs fa, sa, za, ha, va;
    std::string check;

    auto* fc = app.add_subcommand("functionals", "radial functionals on an r grid");
    add_common(fc, fa, true, false);
    fc->add_option("--delta", fa.delta, "slack parameter for the N_delta set");
    fc->add_option("--out", fa.out, "output CSV path");

    auto* sc = app.add_subcommand("sample", "realization summaries as JSONL");
    add_common(sc, sa, false, true);
    sc->add_option("--law", sa.law, "gaussian | steinhaus | bounded");
    sc->add_option("--mod-lo", sa.mod_lo, "bounded law: lower modulus");
    sc->add_option("--mod-hi", sa.mod_hi, "bounded law: upper modulus");
    sc->add_option("--out", sa.out, "output JSONL path");

    auto* zc = app.add_subcommand("zeros", "zero counts by roots and winding");
    add_common(zc, za, false, true);
    std::string method = "both";
    zc->add_option("--method", method, "both (reserved)");
    zc->add_option("--out", za.out, "output CSV path");

    auto* hc = app.add_subcommand("holeprob", "hole probability brackets on an r grid");
    add_common(hc, ha, true, false);
    hc->add_option("--law", ha.law, "gaussian | steinhaus | bounded");
    hc->add_option("--eps", ha.eps, "epsilon in the p0 upper bound");
    hc->add_option("--mod-lo", ha.mod_lo, "bounded law: lower modulus");
    hc->add_option("--mod-hi", ha.mod_hi, "bounded law: upper modulus");
    hc->add_option("--out", ha.out, "output CSV path");

    auto* vc = app.add_subcommand("verify", "scan a lemma or theorem on an r grid");
    add_common(vc, va, true, false);
    vc->add_option("--check", check, "lemma32 | lemma33 | lemma34 | sharpness | nongaussian | fm")
        ->required();
    vc->add_option("--eps", va.eps, "epsilon for lemma33");
    vc->add_option("--out", va.out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
    }

    try {
        CommonArgs& a = fc->parsed()   ? fa
                        : sc->parsed() ? sa
                        : zc->parsed() ? za
                        : hc->parsed() ? ha
                                       : va;
        if (a.threads > 0) {
            // modules read GEF_THREADS through thread_count()
            setenv("GEF_THREADS", std::to_string(a.threads).c_str(), 1);
        }
        auto seq = gef::family_by_name(a.family);
        std::ostringstream body;

        gef::ExperimentManifest m;
        m.family = a.family;
        m.law = a.law;
        m.r_grid = a.r_grid;
        m.delta = a.delta;
        m.eps = a.eps;
        m.trials = a.trials;
        m.seed = a.seed;

        if (fc->parsed()) {
            m.command = "functionals";
            gef::run_functionals_csv(seq, gef::parse_r_grid(a.r_grid), a.delta, body);
            return deliver(body.str(), a, m);
        }
        if (sc->parsed()) {
            m.command = "sample";
            m.r_grid = gef::detail::fmt(a.r);
            auto law = gef::law_by_name(a.law);
            gef::run_sample_jsonl(seq, a.r, law, modulus_law(a, law), a.trials, a.seed,
                                  body);
            return deliver(body.str(), a, m);
        }
        if (zc->parsed()) {
            m.command = "zeros";
            m.r_grid = gef::detail::fmt(a.r);
            m.law = "gaussian";
            gef::run_zeros_csv(seq, a.r, a.trials, a.seed, body);
            return deliver(body.str(), a, m);
        }
        if (hc->parsed()) {
            m.command = "holeprob";
            auto law = gef::law_by_name(a.law);
            gef::run_holeprob_csv(seq, gef::parse_r_grid(a.r_grid), law,
                                  modulus_law(a, law), a.trials, a.eps, a.seed, body);
            return deliver(body.str(), a, m);
        }
        // verify
        m.command = "verify:" + check;
        std::optional<uint64_t> seed;
        if (a.seed_set) seed = a.seed;
        auto grid = gef::parse_r_grid(a.r_grid);
        auto outcome = gef::verify_check(check, seq, grid, a.eps, a.trials, seed, body);
        int rc = deliver(body.str(), a, m);
        if (rc != 0) return rc;
        std::cerr << (outcome.pass ? "PASS " : "FAIL ") << check << " " << outcome.detail
                  << "\n";
        return outcome.pass ? 0 : 1;
    } catch (const gef::DomainError& e) {
        std::cerr << "gef: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "gef: " << e.what() << "\n";
        return 1;
    }
}
