#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rsde/cli.hpp"

using namespace rsde;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "rsde");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rsde_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::vector<std::vector<double>> numeric_rows(const std::string& csv) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == exit_usage);
    CHECK(run({"frobnicate"}).code == exit_usage);
    CHECK(run({"study"}).code == exit_usage);
    CHECK(run({"study", "nope", "--set", "n_paths=2"}).code == exit_usage);
    const auto bad = run({"simulate", "--set", "n_fine=10"});
    CHECK(bad.code == exit_usage);
    CHECK(bad.err.find("dyadic") != std::string::npos);
    CHECK(run({"simulate", "--config", "/nonexistent/cfg"}).code == exit_usage);
    CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("skorohod subcommand") {
    const auto dir = scratch("skorohod");
    spit(dir / "in.csv", "t,y\n0,0.5\n0.25,-0.25\n0.5,0.25\n0.75,-1\n1,0\n");
    const auto r = run({"skorohod", "--input", (dir / "in.csv").string(), "--output", (dir / "out.csv").string()});
    REQUIRE(r.code == exit_ok);
    const auto text = slurp(dir / "out.csv");
    CHECK(text.rfind("t,x,k\n", 0) == 0);
    const auto rows = numeric_rows(text);
    REQUIRE(rows.size() == 5);
    const std::vector<double> k{0, 0.25, 0.25, 1, 1};
    const std::vector<double> x{0.5, 0, 0.5, 0, 1};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(rows[i][1] == x[i]);
        CHECK(rows[i][2] == k[i]);
    }
    spit(dir / "neg.csv", "t,y\n0,-1\n1,0\n");
    CHECK(run({"skorohod", "--input", (dir / "neg.csv").string(), "--output", (dir / "o.csv").string()}).code ==
          exit_usage);
    spit(dir / "junk.csv", "t,y\n0,abc\n");
    CHECK(run({"skorohod", "--input", (dir / "junk.csv").string()}).code == exit_usage);
}

TEST_CASE("simulate with no noise is constant") {
    const auto dir = scratch("simulate");
    const auto r = run({"simulate", "--set", "sigma=zero", "--set", "x0=2", "--set", "n_fine=64", "--set",
                        "levels=0,0,0", "--set", "two_point.levels=0,0,0", "--output",
                        (dir / "sim.csv").string()});
    // Level 0 is rejected: levels must be >= 1.
    CHECK(r.code == exit_usage);
    const auto ok = run({"simulate", "--set", "sigma=zero", "--set", "x0=2", "--set", "n_fine=512", "--set",
                         "levels=1,2,3", "--set", "two_point.levels=1,2,3", "--set", "time.gaps_log2=2,3,4",
                         "--output", (dir / "sim.csv").string()});
    REQUIRE(ok.code == exit_ok);
    const auto rows = numeric_rows(slurp(dir / "sim.csv"));
    REQUIRE(rows.size() == 513);
    for (const auto& row : rows) {
        CHECK(row[1] == 2.0);
        CHECK(row[2] == 0.0);
    }
}

TEST_CASE("decompose with constant sigma") {
    const auto r = run({"decompose", "--set", "sigma=constant", "--set", "sigma_param=0.8", "--set", "n_fine=1024",
                        "--set", "levels=2,3,4", "--set", "two_point.levels=2,3,4", "--set", "time.gaps_log2=2,3,4"});
    REQUIRE(r.code == exit_ok);
    const auto rows = numeric_rows(r.out);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        for (std::size_t i = 2; i <= 5; ++i) CHECK(std::abs(row[i]) <= 1e-12);
        CHECK(std::abs(row[8]) <= 1e-12);
    }
}

TEST_CASE("study runs are byte-identical and honour the output directory") {
    const auto dir = scratch("study");
    const std::string cfg = (dir / "c.cfg").string();
    spit(cfg, "n_fine = 1024\nn_paths = 30\nlevels = 2, 3, 4\n[two_point]\nlevels = 2, 4\n");
    const auto a = run({"study", "riemann", "--config", cfg, "--output-dir", (dir / "a").string()});
    const auto b = run({"study", "riemann", "--config", cfg, "--output-dir", (dir / "b").string()});
    CHECK(a.code == b.code);
    CHECK((a.code == exit_ok || a.code == exit_threshold_failed));
    CHECK(a.out.find("study riemann:") == 0);
    const auto ca = slurp(dir / "a" / "riemann.csv");
    CHECK(!ca.empty());
    CHECK(ca == slurp(dir / "b" / "riemann.csv"));
    CHECK(slurp(dir / "a" / "riemann.summary.json").find("\"format\": \"rsde-study/1\"") != std::string::npos);
    CHECK(!fs::exists(dir / "a" / "riemann.csv.tmp"));

    ::setenv("RSDE_OUTPUT_DIR", (dir / "env").string().c_str(), 1);
    run({"study", "time", "--config", cfg});
    ::unsetenv("RSDE_OUTPUT_DIR");
    CHECK(fs::exists(dir / "env" / "time.csv"));
}

TEST_CASE("threshold failure exits with 1") {
    const auto dir = scratch("fail");
    const auto r = run({"study", "time", "--set", "n_fine=1024", "--set", "n_paths=30", "--set", "levels=2,3,4",
                        "--set", "two_point.levels=2,4", "--set", "time.min_slope=0.59", "--set",
                        "time.max_slope=0.6", "--set", "time.min_r2=0.99999", "--output-dir", dir.string()});
    CHECK(r.code == exit_threshold_failed);
    CHECK(r.out.find("FAIL") != std::string::npos);
}
