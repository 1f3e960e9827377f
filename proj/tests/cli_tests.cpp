#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

int run_cli(const std::string& args, std::string* err = nullptr) {
    std::string cmd =
        std::string(DYNSPEC_CLI_PATH) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    int rc = std::system(cmd.c_str());
    if (err) *err = slurp("cli_stderr.txt");
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_fixtures() {
    spit("fx_tent.json", "{\"type\": \"tent\"}\n");
    spit("fx_doubling.json", "{\"type\": \"doubling\"}\n");
    spit("fx_golden.json", "{\"type\": \"golden_mean\"}\n");
    spit("fx_moebius.json", "{\"type\": \"moebius\", \"c\": -0.11}\n");
    spit("fx_bad.json",
         "{\"type\": \"piecewise_linear\", \"breakpoints\": [0, 0.5, 1],"
         " \"branches\": [{\"slope\": 0.5, \"intercept\": 0},"
         " {\"slope\": 2, \"intercept\": -1}]}\n");
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("validate: clean fixture passes, bad slope map fails with its code") {
    write_fixtures();
    CHECK(run_cli("validate fx_tent.json --out out_v.json") == 0);
    auto j = nlohmann::json::parse(slurp("out_v.json"));
    CHECK(j["ok"] == true);

    CHECK(run_cli("validate fx_bad.json --out out_vb.json") == 1);
    auto jb = nlohmann::json::parse(slurp("out_vb.json"));
    CHECK(jb["ok"] == false);
}

TEST_CASE("compute commands reject an invalid map with exit 2") {
    write_fixtures();
    std::string err;
    CHECK(run_cli("spectrum fx_bad.json --out out_s.json", &err) == 2);
    CHECK(err.find("NotExpanding") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    write_fixtures();
    CHECK(run_cli("nonsense fx_tent.json") == 2);
    CHECK(run_cli("spectrum fx_tent.json --no-such-flag 3") == 2);
    CHECK(run_cli("spectrum definitely_missing.json") == 2);
    CHECK(run_cli("cheb fx_tent.json") == 2);
    CHECK(run_cli("linearize fx_tent.json --level 2") == 2);
    CHECK(run_cli("correlate fx_tent.json --ensemble 10 --length 10") == 2);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("spectrum and pressure emit the classic values") {
    write_fixtures();
    CHECK(run_cli("spectrum fx_tent.json --degree 2 --out out_sp.json") == 0);
    auto j = nlohmann::json::parse(slurp("out_sp.json"));
    CHECK(std::abs(j["mixing_rate"].get<double>() - 2.0 * std::log(2.0)) < 1e-12);
    CHECK(std::abs(j["subleading"]["modulus"].get<double>() - 0.25) < 1e-12);

    CHECK(run_cli("pressure fx_golden.json --beta 3 --out out_p.json") == 0);
    auto p = nlohmann::json::parse(slurp("out_p.json"));
    CHECK(std::abs(p["nu0"].get<double>() - (4.0 + std::sqrt(43.0)) / 27.0) < 1e-12);

    CHECK(run_cli("pressure fx_golden.json --grid 0.5:3:0.5 --out out_pg.csv") == 0);
    CHECK(count_lines(slurp("out_pg.csv")) == 7);
}

TEST_CASE("verify: piecewise maps pass, the smooth family flags the expected violation") {
    write_fixtures();
    CHECK(run_cli("verify fx_tent.json --degree 4 --out out_vt.json") == 0);
    CHECK(run_cli("verify fx_golden.json --degree 4 --out out_vg.json") == 0);

    CHECK(run_cli("verify fx_moebius.json --order 25 --kmax 10 --out out_vm.json") == 0);
    auto j = nlohmann::json::parse(slurp("out_vm.json"));
    CHECK(j["ok"] == true);
    CHECK(j["two_lambda_violated"] == true);
    CHECK(j["bv_chain_ok"] == true);
    CHECK(j["mixing_rate"].get<double>() > 2.0 * j["lyapunov"].get<double>());
}

TEST_CASE("cheb reports the subleading eigenvalue of the family") {
    write_fixtures();
    CHECK(run_cli("cheb fx_moebius.json --order 25 --beta 1 --out out_c.json") == 0);
    auto j = nlohmann::json::parse(slurp("out_c.json"));
    CHECK(std::abs(j["lambda1_modulus"].get<double>() - 0.10415) < 5e-4);
    CHECK(std::abs(j["lambda0"]["modulus"].get<double>() - 1.0) < 1e-8);
    CHECK(std::abs(j["mixing_rate"].get<double>() - 2.2619) < 5e-3);

    CHECK(run_cli("cheb fx_moebius.json --order 20 --format csv --out out_c.csv") == 0);
    CHECK(count_lines(slurp("out_c.csv")) == 21);
}

TEST_CASE("linearize emits a map that re-parses and validates, levels 1..6") {
    write_fixtures();
    for (int level = 1; level <= 6; ++level) {
        std::string name = "out_lin" + std::to_string(level) + ".json";
        CHECK(run_cli("linearize fx_moebius.json --level " + std::to_string(level) + " --emit " +
                      name) == 0);
        CHECK(run_cli("validate " + name + " --out out_lv.json") == 0);
        auto j = nlohmann::json::parse(slurp("out_lv.json"));
        CHECK(j["ok"] == true);
    }
}

TEST_CASE("correlate output is byte-identical across runs and thread counts") {
    write_fixtures();
    const std::string base =
        "correlate fx_doubling.json --ensemble 2000 --length 100 --transient 10 --nmax 5 "
        "--shards 8";
    CHECK(run_cli(base + " --seed 7 --out out_a.csv") == 0);
    CHECK(run_cli(base + " --seed 7 --out out_b.csv") == 0);
    CHECK(run_cli(base + " --seed 7 --threads 2 --out out_t.csv") == 0);
    std::string a = slurp("out_a.csv");
    CHECK(!a.empty());
    CHECK(a == slurp("out_b.csv"));
    CHECK(a == slurp("out_t.csv"));
    CHECK(count_lines(a) == 7);

    CHECK(run_cli(base + " --seed 8 --out out_d.csv") == 0);
    CHECK(a != slurp("out_d.csv"));
}

TEST_CASE("correlate --fit: clean exponential fits, hopeless windows exit 3") {
    write_fixtures();
    CHECK(run_cli("correlate fx_doubling.json --ensemble 20000 --length 500 --transient 50 "
                  "--nmax 10 --seed 9 --fit early --out out_f.json") == 0);
    auto j = nlohmann::json::parse(slurp("out_f.json"));
    CHECK(std::abs(j["rate"].get<double>() - std::log(2.0)) < 0.05);

    std::string err;
    CHECK(run_cli("correlate fx_tent.json --ensemble 200 --length 50 --transient 10 --nmax 8 "
                  "--seed 5 --fit early --out out_fn.json",
                  &err) == 3);
    CHECK(err.find("WindowTooNoisy") != std::string::npos);
}

TEST_CASE("lyapunov command covers both map kinds and the orbit estimator") {
    write_fixtures();
    CHECK(run_cli("lyapunov fx_doubling.json --x0 0.3 --steps 20000 --out out_ld.json") == 0);
    auto j = nlohmann::json::parse(slurp("out_ld.json"));
    CHECK(std::abs(j["exact"].get<double>() - std::log(2.0)) < 1e-14);
    CHECK(std::abs(j["orbit"].get<double>() - std::log(2.0)) < 1e-9);

    CHECK(run_cli("lyapunov fx_moebius.json --order 25 --out out_lm.json") == 0);
    auto m = nlohmann::json::parse(slurp("out_lm.json"));
    CHECK(std::abs(m["collocation"].get<double>() - 0.685) < 5e-3);

    CHECK(run_cli("lyapunov fx_tent.json --x0 1.5") == 2);
}

TEST_CASE("sweep emits one ranked row per parameter and eigenvalue") {
    CHECK(run_cli("sweep --from -0.13 --to -0.09 --step 0.01 --order 12 --count 3 "
                  "--out out_sw.csv") == 0);
    std::string csv = slurp("out_sw.csv");
    CHECK(count_lines(csv) == 16);
    CHECK(csv.rfind("c,rank,re,im,modulus\n", 0) == 0);
}
