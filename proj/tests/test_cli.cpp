#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gef/cli.hpp"

using namespace gef;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GEF_CLI_PATH) + " " + args;
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("r-grid grammar") {
    auto g = parse_r_grid("log:1:100:5");
    auto want = log_grid(1.0, 100.0, 5);
    REQUIRE(g.size() == 5);
    for (size_t i = 0; i < 5; ++i) CHECK(g[i] == want[i]);

    auto lst = parse_r_grid("1.2,1.5,2");
    REQUIRE(lst.size() == 3);
    CHECK(lst[0] == 1.2);
    CHECK(lst[2] == 2.0);

    auto single = parse_r_grid("0.75");
    REQUIRE(single.size() == 1);

    CHECK_THROWS_AS(parse_r_grid("log:abc"), DomainError);
    CHECK_THROWS_AS(parse_r_grid("log:1:2:0"), DomainError);
    CHECK_THROWS_AS(parse_r_grid("log:2:1:5"), DomainError);
    CHECK_THROWS_AS(parse_r_grid("log:1:2:3x"), DomainError);
    CHECK_THROWS_AS(parse_r_grid(""), DomainError);
    CHECK_THROWS_AS(parse_r_grid("1.2,nope"), DomainError);
    CHECK_THROWS_AS(parse_r_grid("-2"), DomainError);
    CHECK_THROWS_AS(parse_r_grid("1.2,"), DomainError);
}

TEST_CASE("family and law lookup") {
    CHECK(family_by_name("sqrt_factorial").family == Family::sqrt_factorial);
    CHECK(family_by_name("half_power").family == Family::half_power);
    CHECK(family_by_name("gap_half_power").family == Family::gap_half_power);
    CHECK_THROWS_AS(family_by_name("exp"), DomainError);
    CHECK(law_by_name("gaussian") == Law::complex_gaussian);
    CHECK(law_by_name("steinhaus") == Law::steinhaus_phase);
    CHECK(law_by_name("bounded") == Law::bounded_modulus);
    CHECK_THROWS_AS(law_by_name("cauchy"), DomainError);
}

TEST_CASE("manifest round-trip") {
    ExperimentManifest m;
    m.command = "holeprob";
    m.family = "half_power";
    m.law = "bounded";
    m.r_grid = "log:1:10:25";
    m.delta = 0.125;
    m.eps = 0.5;
    m.trials = 4096;
    m.seed = 0xDEADBEEFCAFEULL;
    m.output_hash = "0123456789abcdef";
    auto back = parse_manifest(emit_manifest(m));
    CHECK(back == m);
    // emission is deterministic
    CHECK(emit_manifest(m) == emit_manifest(back));
}

TEST_CASE("fnv1a-64 known vectors") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("hello") == "a430d84680aabd0b");
    CHECK(fnv1a_hex("r,N\n1,0\n") == "17d1b9c72c48cb04");
}

TEST_CASE("functionals CSV matches the library") {
    auto psi = LogCoefficientSequence::sqrt_factorial();
    auto grid = log_grid(1.0, 50.0, 4);
    std::ostringstream os;
    run_functionals_csv(psi, grid, 0.1, os);
    auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "r,N,N_delta,m,m_delta,s_half,s,ln_mu,nu,ln_S_sq");
    // parse the third row back and compare with a direct call
    std::stringstream row(lines[3]);
    std::string tok;
    std::vector<std::string> f;
    while (std::getline(row, tok, ',')) f.push_back(tok);
    REQUIRE(f.size() == 10);
    const double r = std::strtod(f[0].c_str(), nullptr);
    auto fr = functionals(psi, r, 0.1);
    CHECK(std::stoll(f[1]) == fr.N);
    CHECK(std::stoll(f[4]) == fr.m_delta);
    CHECK(std::strtod(f[6].c_str(), nullptr) == fr.s);  // %.17g round-trips
    CHECK(std::stoll(f[8]) == fr.nu);

    std::ostringstream again;
    run_functionals_csv(psi, grid, 0.1, again);
    CHECK(os.str() == again.str());
}

TEST_CASE("zeros CSV agrees with direct counting") {
    auto psi = LogCoefficientSequence::sqrt_factorial();
    std::ostringstream os;
    run_zeros_csv(psi, 1.2, 5, 7, os);
    auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "trial,count_roots,count_winding,margin,jensen_residual");
    const int64_t degree = truncation_degree(psi, 1.2, 1e-9);
    for (int64_t t = 0; t < 5; ++t) {
        std::stringstream row(lines[size_t(t) + 1]);
        std::string tok;
        std::vector<std::string> f;
        while (std::getline(row, tok, ',')) f.push_back(tok);
        REQUIRE(f.size() == 5);
        auto rl = sample_realization(psi, degree, Law::complex_gaussian, 7, t);
        auto z = count_zeros_roots(rl, 1.2);
        CHECK(std::stoll(f[0]) == t);
        CHECK(std::stoll(f[1]) == z.count);
        CHECK(std::stoll(f[2]) == z.count);  // methods agree at a generic radius
        CHECK(std::strtod(f[4].c_str(), nullptr) < 1e-6);
    }
}

TEST_CASE("holeprob CSV carries a coherent bracket row") {
    auto psi = LogCoefficientSequence::sqrt_factorial();
    std::ostringstream os;
    run_holeprob_csv(psi, {1.2}, Law::complex_gaussian, ModulusLaw::gaussian(), 100, 0.5,
                     11, os);
    auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 2);
    std::stringstream row(lines[1]);
    std::string tok;
    std::vector<std::string> f;
    while (std::getline(row, tok, ',')) f.push_back(tok);
    REQUIRE(f.size() == 10);
    const double p_hat = std::strtod(f[3].c_str(), nullptr);
    const double lo = std::strtod(f[4].c_str(), nullptr);
    const double hi = std::strtod(f[5].c_str(), nullptr);
    CHECK(std::stoll(f[1]) == 100);
    CHECK(lo <= p_hat);
    CHECK(p_hat <= hi);
    CHECK(std::strtod(f[6].c_str(), nullptr) < 0.0);  // ln P(Omega_1)
    CHECK(f[9] == "1");
}

TEST_CASE("verify_check verdicts") {
    auto hp = LogCoefficientSequence::half_power();
    auto psi = LogCoefficientSequence::sqrt_factorial();
    std::ostringstream os;

    auto sharp = verify_check("sharpness", hp, log_grid(100.0, 1e4, 5), 0.5, 10,
                              std::nullopt, os);
    CHECK(sharp.pass);

    auto l33 = verify_check("lemma33", psi, log_grid(2.0, 100.0, 10), 0.5, 10,
                            std::nullopt, os);
    CHECK(l33.pass);

    CHECK_THROWS_AS(verify_check("lemma99", psi, {2.0}, 0.5, 10, std::nullopt, os),
                    DomainError);
    // MC checks refuse to run without a seed
    CHECK_THROWS_AS(verify_check("nongaussian", psi, {0.5}, 0.5, 10, std::nullopt, os),
                    DomainError);
    CHECK_THROWS_AS(verify_check("fm", psi, {1.5}, 0.5, 10, std::nullopt, os),
                    DomainError);

    std::ostringstream fmos;
    auto fm = verify_check("fm", psi, {1.5, 2.0}, 0.5, 20, uint64_t{9}, fmos);
    CHECK(fm.pass);
    CHECK(fmos.str().rfind("r,lhs,rhs,", 0) == 0);
}

TEST_CASE("binary: exit codes and byte-identical reruns") {
    CHECK(run_cli("--help >/dev/null 2>&1") == 0);
    CHECK(run_cli("functionals --family nope --r-grid log:1:2:3 >/dev/null 2>&1") == 2);
    CHECK(run_cli("functionals --family half_power --r-grid log:oops >/dev/null 2>&1") ==
          2);
    CHECK(run_cli("zeros --family half_power >/dev/null 2>&1") == 2);  // missing --r
    CHECK(run_cli("verify --check nongaussian --family sqrt_factorial --r-grid 0.5 "
                  "--trials 5 >/dev/null 2>&1") == 2);  // seed is mandatory

    const std::string out1 = "/tmp/gef_cli_test_a.csv";
    const std::string out2 = "/tmp/gef_cli_test_b.csv";
    const std::string args = "functionals --family gap_half_power --r-grid log:1:50:8 "
                             "--delta 0.2 --out ";
    REQUIRE(run_cli(args + out1 + " >/dev/null 2>&1") == 0);
    REQUIRE(run_cli(args + out2 + " >/dev/null 2>&1") == 0);
    const auto bytes1 = slurp(out1), bytes2 = slurp(out2);
    CHECK(bytes1 == bytes2);
    CHECK(split_lines(bytes1).size() == 9);

    // the sidecar manifest echoes the run and pins the output hash
    auto m = parse_manifest(slurp(out1 + ".manifest.json"));
    CHECK(m.command == "functionals");
    CHECK(m.family == "gap_half_power");
    CHECK(m.r_grid == "log:1:50:8");
    CHECK(m.delta == 0.2);
    CHECK(m.tool_version == kVersion);
    CHECK(m.output_hash == fnv1a_hex(bytes1));

    std::remove(out1.c_str());
    std::remove((out1 + ".manifest.json").c_str());
    std::remove(out2.c_str());
    std::remove((out2 + ".manifest.json").c_str());
}

TEST_CASE("binary: verify subcommand round-trip") {
    const std::string out = "/tmp/gef_cli_verify.csv";
    CHECK(run_cli("verify --check sharpness --family half_power --r-grid "
                  "log:100:10000:4 --out " + out + " >/dev/null 2>&1") == 0);
    auto lines = split_lines(slurp(out));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "r,ratio,ln_n,ln_s,skipped");
    std::remove(out.c_str());
    std::remove((out + ".manifest.json").c_str());
}
