#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd =
        std::string(SECTORIA_CLI_PATH) + " " + args + " > /tmp/sectoria_cli_out.txt 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in("/tmp/sectoria_cli_out.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("certify on a positive diagonal passes with exit 0") {
    const RunResult r = run_cli("certify --family positive_diagonal:1,2,3");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("SUITE PASS") != std::string::npos);
}

TEST_CASE("certify on a non-square matrix exits 2") {
    std::ofstream("/tmp/sectoria_bad.json")
        << R"({"dim": 2, "entries": [[1,0],[2,0],[3,0]]})";
    CHECK(run_cli("certify --matrix /tmp/sectoria_bad.json").exit_code == 2);
}

TEST_CASE("certify on a singular matrix exits 2") {
    std::ofstream("/tmp/sectoria_sing.json")
        << R"({"dim": 2, "entries": [[0,0],[0,0],[0,0],[1,0]]})";
    CHECK(run_cli("certify --matrix /tmp/sectoria_sing.json").exit_code == 2);
}

TEST_CASE("certify a jordan family at an explicit angle") {
    const RunResult r = run_cli("certify --family jordan_shifted:2,1,1 --theta 1.2");
    CHECK(r.exit_code == 0);
}

TEST_CASE("calc compares against the spectral oracle") {
    const RunResult r = run_cli("calc --symbol z_pow:0.5 --family positive_diagonal:4,9");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("spectral_oracle_diff") != std::string::npos);

    CHECK(run_cli("calc --symbol log --family positive_diagonal:1").exit_code == 0);
    CHECK(run_cli("calc --symbol z_over_1pz2 --family random_accretive:4 --seed 3").exit_code ==
          0);
}

TEST_CASE("calc rejects unknown symbols with exit 2") {
    CHECK(run_cli("calc --symbol nope --family positive_diagonal:1").exit_code == 2);
}

TEST_CASE("model rejects alpha * theta >= pi/2 with exit 2") {
    CHECK(run_cli("model --family positive_diagonal:1,2 --theta 2.0 --alpha 0.9").exit_code == 2);
}

TEST_CASE("unknown subcommand exits 2") {
    CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("report JSON is byte-identical across runs modulo the timestamp") {
    const std::string args = "sqnorm --family random_accretive:2 --seed 9 --grid-n0 64";
    CHECK(run_cli(args + " --out /tmp/sectoria_rep1.json").exit_code == 0);
    CHECK(run_cli(args + " --out /tmp/sectoria_rep2.json").exit_code == 0);
    nlohmann::json j1 = nlohmann::json::parse(slurp("/tmp/sectoria_rep1.json"));
    nlohmann::json j2 = nlohmann::json::parse(slurp("/tmp/sectoria_rep2.json"));
    j1.erase("timestamp_ms");
    j2.erase("timestamp_ms");
    CHECK(j1.dump() == j2.dump());
}

TEST_CASE("config file values are applied and flags win") {
    std::ofstream("/tmp/sectoria_cfg.json") << R"({
        "operator": {"family": "positive_diagonal", "params": {"diagonal": [1.0, 2.0]}},
        "theta": 2.0,
        "out": "/tmp/sectoria_cfg_rep.json"
    })";
    CHECK(run_cli("certify --config /tmp/sectoria_cfg.json").exit_code == 0);
    const nlohmann::json rep = nlohmann::json::parse(slurp("/tmp/sectoria_cfg_rep.json"));
    CHECK(rep["summary_pass"].get<bool>());

    // flag overrides the config operator: the angle 0.5 is below this
    // operator's type angle, which is an input error
    CHECK(run_cli("certify --config /tmp/sectoria_cfg.json --family complex_diagonal:0.54,0.84 "
                  "--theta 0.5")
              .exit_code == 2);
}

TEST_CASE("sweep emits the fixed CSV header and a monotone kappa column") {
    const RunResult r =
        run_cli("sweep --sweep jordan_eps=0.5,1,2 --theta-list 2.0 --out /tmp/sectoria_sweep.csv");
    CHECK(r.exit_code == 0);
    std::ifstream in("/tmp/sectoria_sweep.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "family,param,theta,kappa,loggap_c1,loggap_c2,fact_residual,pass");
    double prev = 0.0;
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        for (int c = 0; c <= 3; ++c) std::getline(ss, cell, ',');
        const double kappa = std::stod(cell);
        CHECK(kappa >= prev);
        prev = kappa;
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("sweep with an empty range exits 2") {
    CHECK(run_cli("sweep").exit_code == 2);
}
