#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "minegame/cli.hpp"

using namespace minegame;
using Catch::Approx;

namespace {

int cli(std::initializer_list<std::string> args, std::string* out_s = nullptr,
        std::string* err_s = nullptr) {
    std::ostringstream out, err;
    int rc = run_cli(std::vector<std::string>(args), out, err);
    if (out_s) *out_s = out.str();
    if (err_s) *err_s = err.str();
    return rc;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with code 2", "[cli]") {
    std::string out, err;

    CHECK(cli({"solve", "--model", "immediate", "--p", "1.5", "--d", "4"}, &out, &err) == 2);
    CHECK(err.find("p out of range") != std::string::npos);

    CHECK(cli({"solve", "--model", "immediate", "--p", "0.3", "--d", "4", "--a-max", "9"}, &out,
              &err) == 2);
    CHECK(err.find("a-max") != std::string::npos);

    CHECK(cli({"solve", "--model", "selfish", "--p", "0.3", "--d", "4"}, &out, &err) == 2);
    CHECK(cli({"solve", "--p", "0.3", "--d", "4"}, &out, &err) == 2);
    CHECK(cli({"conquer"}, &out, &err) == 2);
    CHECK(cli({}, &out, &err) == 2);
    CHECK(cli({"simulate", "--model", "immediate", "--p", "0.3", "--d", "3", "--policy",
               "frontier", "--levels", "9999"},
              &out, &err) == 2);
}

TEST_CASE("help exits cleanly", "[cli]") {
    std::string out;
    CHECK(cli({"--help"}, &out) == 0);
    CHECK(out.find("solve") != std::string::npos);
    CHECK(cli({"solve", "--help"}, &out) == 0);
}

TEST_CASE("solve emits a json report on stdout", "[cli]") {
    std::string out, err;
    REQUIRE(cli({"solve", "--model", "immediate", "--p", "0.3", "--d", "4"}, &out, &err) == 0);
    CHECK(err.empty());  // diagnostics are opt-in via MINEGAME_LOG

    ojson j = ojson::parse(out);
    CHECK(j["kind"] == "solve_report");
    CHECK(j["model"] == "immediate");
    CHECK(j["g_star"].get<double>() == Approx(0.3).margin(1e-8));
    CHECK(j["frontier_is_best_response"] == true);
    CHECK(j["manifest"]["command"] ==
          "solve --model immediate --p 0.3 --d 4 --tol 1e-12 --max-iters 1000000 --format json");
    CHECK(j["manifest"]["tool_version"] == tool_version);

    // csv variant carries the same potential table shape
    REQUIRE(cli({"solve", "--model", "immediate", "--p", "0.3", "--d", "4", "--format", "csv"},
                &out, &err) == 0);
    CHECK(out.find("a,b,phi\n") != std::string::npos);
    CHECK(out.find("# g_star ") != std::string::npos);
}

TEST_CASE("solve writes to a file with --out", "[cli]") {
    const std::string path = "cli_test_solve.json";
    std::remove(path.c_str());
    std::string out, err;
    REQUIRE(cli({"solve", "--model", "strategic", "--p", "0.25", "--d", "4", "--out", path}, &out,
                &err) == 0);
    CHECK(out.empty());
    ojson j = ojson::parse(slurp(path));
    CHECK(j["kind"] == "solve_report");
    CHECK(j["a_max"] == 10);
    CHECK(j["g_star"].get<double>() == Approx(0.25).margin(1e-8));
    std::remove(path.c_str());
}

TEST_CASE("repeated simulate runs are byte identical", "[cli]") {
    std::string first, second, err;
    REQUIRE(cli({"simulate", "--model", "immediate", "--p", "0.3", "--d", "3", "--policy",
                 "frontier", "--levels", "10000", "--trials", "2", "--seed", "5"},
                &first, &err) == 0);
    REQUIRE(cli({"simulate", "--model", "immediate", "--p", "0.3", "--d", "3", "--policy",
                 "frontier", "--levels", "10000", "--trials", "2", "--seed", "5"},
                &second, &err) == 0);
    CHECK(first == second);

    ojson j = ojson::parse(first);
    CHECK(j["kind"] == "sim_report");
    CHECK(j["policy"] == "frontier");
    CHECK(j["trials"] == 2);
    CHECK(j["per_trial_gain"].size() == 2);
    CHECK(j["manifest"]["seed"] == 5);
}

TEST_CASE("simulate accepts a policy file", "[cli]") {
    GameParams gp{Model::immediate, 0.455, 3, 0};
    const std::string path = "cli_test_policy.json";
    {
        std::ofstream f(path, std::ios::binary);
        REQUIRE(f);
        f << policy_to_string(load_builtin("deviator-d3", gp));
    }

    std::string out, err;
    REQUIRE(cli({"simulate", "--model", "immediate", "--p", "0.455", "--d", "3", "--policy", path,
                 "--levels", "10000", "--seed", "11"},
                &out, &err) == 0);
    ojson j = ojson::parse(out);
    CHECK(j["policy"] == path);
    CHECK(j["empirical_gain"].get<double>() > 0.40);

    // the file pins d = 3, so asking for d = 4 is rejected
    CHECK(cli({"simulate", "--model", "immediate", "--p", "0.455", "--d", "4", "--policy", path,
               "--levels", "10000"},
              &out, &err) == 2);
    CHECK(err.find("inconsisten") != std::string::npos);

    CHECK(cli({"simulate", "--model", "immediate", "--p", "0.455", "--d", "3", "--policy",
               "no_such_policy.json", "--levels", "10000"},
              &out, &err) == 2);
    std::remove(path.c_str());
}

TEST_CASE("simulate writes plot data on request", "[cli]") {
    const std::string path = "cli_test_plot.csv";
    std::remove(path.c_str());
    std::string out, err;
    REQUIRE(cli({"simulate", "--model", "immediate", "--p", "0.3", "--d", "3", "--policy",
                 "frontier", "--levels", "10000", "--trials", "3", "--emit-plot-data", path},
                &out, &err) == 0);
    const std::string csv = slurp(path);
    CHECK(csv.rfind("trial,gain\n", 0) == 0);
    CHECK(csv.find("\n0,") != std::string::npos);
    CHECK(csv.find("\n2,") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("verify exit codes reflect the outcome", "[cli]") {
    std::string out, err;
    REQUIRE(cli({"verify", "--suite", "sol", "--p", "0.30", "--range", "15"}, &out, &err) == 0);
    CHECK(err.find("[PASS]") != std::string::npos);
    ojson j = ojson::parse(out);
    CHECK(j["kind"] == "verify_summary");
    CHECK(j["pass"] == true);

    REQUIRE(cli({"verify", "--suite", "sol", "--p", "0.32", "--range", "15"}, &out, &err) == 1);
    CHECK(err.find("[FAIL]") != std::string::npos);
    CHECK(ojson::parse(out)["pass"] == false);

    REQUIRE(cli({"verify", "--suite", "rinf", "--p", "0.3"}, &out, &err) == 0);
    j = ojson::parse(out);
    CHECK(j["pass"] == true);
    CHECK(j["suites"][0]["suite"] == "rinf");
}

TEST_CASE("table emits the requested rows", "[cli]") {
    std::string out, err;
    REQUIRE(cli({"table", "--model", "immediate", "--d-list", "2,3"}, &out, &err) == 0);
    CHECK(out.find("d,threshold,bracket_low,bracket_high\n") != std::string::npos);
    CHECK(out.find("\n2,0.5") != std::string::npos);
    CHECK(out.find("\n3,0.45") != std::string::npos);

    REQUIRE(cli({"table", "--model", "immediate", "--d-list", "2", "--format", "json"}, &out,
                &err) == 0);
    ojson j = ojson::parse(out);
    CHECK(j["kind"] == "threshold_table");
    CHECK(j["rows"][0]["d"] == 2);
    CHECK(j["rows"][0]["threshold"].get<double>() == Approx(0.5).margin(2e-3));
}

TEST_CASE("threshold reports the strategic lead cap", "[cli]") {
    std::string out, err;
    REQUIRE(cli({"threshold", "--model", "strategic", "--d", "4"}, &out, &err) == 0);
    ojson j = ojson::parse(out);
    CHECK(j["kind"] == "threshold_result");
    CHECK(j["a_max"] == 10);
    double p_hat = j["threshold"].get<double>();
    CHECK(p_hat > 0.28);
    CHECK(p_hat < 0.40);
    CHECK(j["bracket_high"].get<double>() - j["bracket_low"].get<double>() <= 1e-4 + 1e-12);
}
