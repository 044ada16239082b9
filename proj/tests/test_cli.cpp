#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef MODSUM_CLI_PATH
#define MODSUM_CLI_PATH "modsum"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + MODSUM_CLI_PATH + " " + args +
                      " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string strip_timing(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("timing ", 0) != 0) out << line << "\n";
    return out.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("modsum_cli_test_" +
                                                  std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("verify subcommand") {
    auto r = run("verify shao-mod15");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("report version=1") == 0);
    CHECK(r.out.find("status result=pass exit=0") != std::string::npos);

    CHECK(run("verify problem66b --p 7").exit_code == 0);
    CHECK(run("verify doubling --k 3").exit_code == 0);
    CHECK(run("verify problem66b --p 5").exit_code == 2);  // 5 divides 30
    CHECK(run("verify problem66b").exit_code == 2);        // missing --p
    CHECK(run("verify no-such-thing").exit_code == 2);
    CHECK(run("").exit_code == 2);  // subcommand required
}

TEST_CASE("search subcommand") {
    auto r = run("search --m 15 --h 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("max_size=5") != std::string::npos);
    CHECK(r.out.find("witness=1,2,4,7,13") != std::string::npos);

    auto tiny = run("search --m 15 --h 3 --max-nodes 4");
    CHECK(tiny.exit_code == 3);
    CHECK(tiny.out.find("status result=incomplete exit=3") != std::string::npos);

    CHECK(run("search --m 21 --h 3").exit_code == 0);
    CHECK(run("search --m 15 --h 4").exit_code == 2);
}

TEST_CASE("shen subcommand") {
    auto pass = run("shen --m 15 --sizes 6,5,5");
    CHECK(pass.exit_code == 0);
    auto fail = run("shen --m 15 --sizes 5,5,5");
    CHECK(fail.exit_code == 1);
    CHECK(fail.out.find("status result=fail exit=1") != std::string::npos);
    CHECK(fail.out.find("witness=") != std::string::npos);
}

TEST_CASE("density subcommand with CSV and determinism") {
    TempDir tmp;
    std::string csv = (tmp.path / "density.csv").string();
    std::string args = "density --limit 200000 --mod 15 --classes 1,2,4,7,13 --csv " + csv;
    auto r1 = run(args);
    CHECK(r1.exit_code == 0);
    REQUIRE(fs::exists(csv));
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,count,value");

    auto r2 = run(args);
    CHECK(strip_timing(r1.out) == strip_timing(r2.out));

    CHECK(run("density --limit 1000 --checkpoints 2000").exit_code == 2);
}

TEST_CASE("density cache via environment variable") {
    TempDir tmp;
    std::string env = "MODSUM_CACHE=" + tmp.path.string();
    auto r1 = run("density --limit 100000", env);
    CHECK(r1.exit_code == 0);
    CHECK(fs::exists(tmp.path / "primes_100000.mspt"));
    auto r2 = run("density --limit 100000", env);
    CHECK(r2.exit_code == 0);
    CHECK(strip_timing(r1.out) == strip_timing(r2.out));
}

TEST_CASE("reps subcommand") {
    auto r = run("reps --targets 10,11,4 --list-pairs --three");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("id=reps.10") != std::string::npos);
    CHECK(r.out.find("t=2") != std::string::npos);
    CHECK(r.out.find("3+7;5+5") != std::string::npos);
    CHECK(r.out.find("id=three.10") != std::string::npos);
}

TEST_CASE("construct-q subcommand") {
    TempDir tmp;
    std::string cfg = (tmp.path / "sched.cfg").string();
    {
        std::ofstream out(cfg);
        out << "rule = geometric\nratio = 8\nx1 = 100\ncheckpoints = 5\n";
    }
    std::string csvdir = tmp.path.string();
    auto r = run("construct-q --config " + cfg + " --csv-dir " + csvdir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("id=pruning-completeness status=pass") != std::string::npos);
    CHECK(r.out.find("id=fact2.x3.6419 status=pass") != std::string::npos);
    CHECK(r.out.find("id=fact2.x5.410819 status=pass") != std::string::npos);
    REQUIRE(fs::exists(tmp.path / "checkpoints.csv"));
    REQUIRE(fs::exists(tmp.path / "ledger.csv"));

    auto neg = run("construct-q --config " + cfg + " --skip-pruning");
    CHECK(neg.exit_code == 1);
    CHECK(neg.out.find("id=pruning-completeness status=fail") != std::string::npos);
    CHECK(neg.out.find("status result=fail exit=1") != std::string::npos);

    // determinism of the full report
    auto r2 = run("construct-q --config " + cfg);
    auto r3 = run("construct-q --config " + cfg);
    CHECK(strip_timing(r2.out) == strip_timing(r3.out));

    std::string bad = (tmp.path / "bad.cfg").string();
    {
        std::ofstream out(bad);
        out << "rule = geometric\nchaos = yes\n";
    }
    CHECK(run("construct-q --config " + bad).exit_code == 2);
    CHECK(run("construct-q --config " + (tmp.path / "missing.cfg").string()).exit_code == 2);
}

TEST_CASE("degenerate trim schedule warns but completes") {
    TempDir tmp;
    std::string cfg = (tmp.path / "deg.cfg").string();
    {
        std::ofstream out(cfg);
        out << "rule = explicit\npoints = 100, 800, 1229, 2000\n";
    }
    auto r = run("construct-q --config " + cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("warning id=interval.2.trim") != std::string::npos);
    CHECK(r.out.find("degenerate") != std::string::npos);
}

TEST_CASE("report schema subcommand") {
    auto r = run("report-schema");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("modsum report schema") != std::string::npos);
    CHECK(run("--version").out.find("modsum") != std::string::npos);
}
