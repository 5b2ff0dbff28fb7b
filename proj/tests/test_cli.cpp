#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef SZEGOLAB_CLI_PATH
#error "SZEGOLAB_CLI_PATH must point at the built command-line binary"
#endif

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(SZEGOLAB_CLI_PATH) + " " + args + " >> cli_stdout.log 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<double> split_row(const std::string& line) {
    std::vector<double> out;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) out.push_back(std::strtod(field.c_str(), nullptr));
    return out;
}

}  // namespace

TEST_CASE("density subcommand reproduces the free density and is deterministic") {
    REQUIRE(run_cli("density --kind free --grid 101 --depth-t 2000 --depth-m 64 "
                    "--out cli_free.csv --plot cli_free.dat") == 0);
    std::string csv = slurp("cli_free.csv");
    std::vector<std::string> rows = lines_of(csv);
    REQUIRE(rows.size() == 102);
    CHECK(rows[0] == "x,nu_prime_via_T,nu_prime_via_m,gap_hint_via_T,gap_hint_via_m");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<double> cols = split_row(rows[i]);
        REQUIRE(cols.size() == 5);
        double expected = std::sqrt(4.0 - cols[0] * cols[0]) / (2.0 * std::numbers::pi);
        CHECK(std::abs(cols[1] - expected) < 1e-10);
        CHECK(std::abs(cols[2] - expected) < 1e-10);
    }
    // plot file carries the same three leading columns, space separated
    std::vector<std::string> plot = lines_of(slurp("cli_free.dat"));
    REQUIRE(plot.size() == 102);
    CHECK(plot[0][0] == '#');

    REQUIRE(run_cli("density --kind free --grid 101 --depth-t 2000 --depth-m 64 "
                    "--out cli_free_again.csv --plot cli_free_again.dat") == 0);
    CHECK(slurp("cli_free_again.csv") == csv);  // byte-identical rerun
}

TEST_CASE("density subcommand cross-checks the two routes") {
    CHECK(run_cli("density --alpha 1 --beta 0 --grid 51 --depth-t 100000 "
                  "--depth-m 65536 --out cli_coulomb.csv --plot cli_coulomb.dat") == 0);
}

TEST_CASE("sumrule subcommand closes the rank-one rule") {
    REQUIRE(run_cli("sumrule --override 1:1:2 --rule z --n 1 --N 2000 "
                    "--out cli_sumrule.json") == 0);
    nlohmann::json report = nlohmann::json::parse(slurp("cli_sumrule.json"));
    CHECK(report.at("kind") == "Z_step");
    CHECK(std::abs(report.at("residual").get<double>()) < 1e-3);
    CHECK(report.at("eig_term").get<double>() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK_FALSE(report.at("lhs_diverged").get<bool>());
}

TEST_CASE("sumrule subcommand enforces its budget through the exit code") {
    CHECK(run_cli("sumrule --kind free --rule z1-minus --n 2 --N 200 "
                  "--out cli_sumrule_free.json") == 0);
    CHECK(run_cli("sumrule --override 1:1:2 --rule z --n 1 --N 2000 --budget 1e-9 "
                  "--out cli_sumrule_tight.json") != 0);
}

TEST_CASE("perturb subcommand verifies the first-order formula") {
    REQUIRE(run_cli("perturb --alpha 1 --beta 1 --perturbation a-single --site 30 "
                    "--c 1e-3 --rank 1 --side plus --N 800 --out cli_perturb.json") == 0);
    nlohmann::json report = nlohmann::json::parse(slurp("cli_perturb.json"));
    CHECK(report.at("mode") == "derivative");
    CHECK(std::abs(report.at("velocity").get<double>() -
                   report.at("finite_difference").get<double>()) <= 1e-6);
}

TEST_CASE("perturb subcommand runs the minoration audit") {
    REQUIRE(run_cli("perturb --alpha 0.8 --beta 0.6 --audit --perturbation a-pair "
                    "--site 250 --c 1e-3 --d 1e-3 --N 2000 --out cli_audit.json") == 0);
    nlohmann::json report = nlohmann::json::parse(slurp("cli_audit.json"));
    CHECK(report.at("mode") == "audit");
    CHECK(report.at("audit").at("verdict").get<bool>());
    CHECK(report.at("audit").at("hypothesis_ok").get<bool>());
}

TEST_CASE("phase subcommand emits one row per cell") {
    REQUIRE(run_cli("phase --alpha-steps 3 --beta-steps 3 --grid 512 --depth-m 4096 "
                    "--out cli_phase.csv") == 0);
    std::vector<std::string> rows = lines_of(slurp("cli_phase.csv"));
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] ==
          "alpha,beta,predicted,measured,at_plus2,at_minus2,slope_plus,slope_minus,"
          "excluded");
    // a 3x3 grid over the full square leaves every cell within one step of a
    // critical line, so each row is marked excluded
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].back() == '1');
    }
}

TEST_CASE("report subcommand aggregates the summary document") {
    REQUIRE(run_cli("report --kind free --grid 512 --depth-m 16 --N 200 --horizon 100 "
                    "--out cli_report.json") == 0);
    nlohmann::json report = nlohmann::json::parse(slurp("cli_report.json"));
    CHECK(report.at("sequence").at("kind") == "free");
    CHECK(report.at("admissibility").at("is_admissible_finite").get<bool>());
    CHECK(std::abs(report.at("szego").at("Z").at("value").get<double>()) < 1e-8);
    CHECK(report.at("classification").at("at_plus2") == "converges");
    CHECK(report.at("eigenvalues").at("above").empty());
}

TEST_CASE("config file seeds defaults and flags override it") {
    {
        std::ofstream cfg("cli_cfg.json");
        cfg << R"({"grid": 41, "sequence": {"kind": "free"}})" << "\n";
    }
    REQUIRE(run_cli("density --config cli_cfg.json --depth-t 500 --depth-m 16 "
                    "--out cli_cfg_a.csv --plot cli_cfg_a.dat") == 0);
    CHECK(lines_of(slurp("cli_cfg_a.csv")).size() == 42);
    REQUIRE(run_cli("density --config cli_cfg.json --grid 21 --depth-t 500 --depth-m 16 "
                    "--out cli_cfg_b.csv --plot cli_cfg_b.dat") == 0);
    CHECK(lines_of(slurp("cli_cfg_b.csv")).size() == 22);
}

TEST_CASE("malformed invocations fail loudly") {
    CHECK(run_cli("density --bogus-flag 3") != 0);
    CHECK(run_cli("sumrule --rule bogus --out cli_bogus.json") != 0);
    CHECK(run_cli("") != 0);  // a subcommand is required
    CHECK(run_cli("density --override not-a-triple --out cli_bad.csv --plot cli_bad.dat") !=
          0);
    // Domain errors surface as a clean diagnostic and exit code 2, never as an
    // uncaught exception (which would abort with 134).
    CHECK(run_cli("perturb --perturbation bogus --out cli_bad.json") == 2);
    CHECK(run_cli("perturb --perturbation a-pair --site 40 --c 1e-4 --d 1e-9 "
                  "--out cli_bad.json") == 2);  // pair ratio outside the window
}
