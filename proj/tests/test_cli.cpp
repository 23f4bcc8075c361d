#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
    int exitCode = -1;
    std::string out;
};

// stdout only; stderr goes to /dev/null unless the command redirects it.
Run run(const std::string& args) {
    const std::string cmd = std::string(ADDPERM_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fixture(const char* name) { return std::string(ADDPERM_FIXTURES) + "/" + name; }

}  // namespace

TEST_CASE("perm prints the permanent") {
    CHECK(run("perm --algo brute " + fixture("identity3.txt")).out == "1\n");
    CHECK(run("perm " + fixture("ones4.txt")).out == "24\n");
    CHECK(run("perm --algo gray " + fixture("ones4.txt")).out == "24\n");
    CHECK(run("perm --algo mono " + fixture("tridiagonal4.mtx")).out == "5\n");
    CHECK(run("perm " + fixture("zero_row.txt")).out == "0\n");
}

TEST_CASE("early abstraction matches Gray code on a sparse instance") {
    const Run gray = run("perm --algo gray " + fixture("sparse10.txt"));
    const Run early = run("perm --algo early --heuristic bm-list --order mcs " + fixture("sparse10.txt"));
    const Run be = run("perm --algo early --heuristic be --order index " + fixture("sparse10.txt"));
    CHECK(gray.exitCode == 0);
    CHECK(gray.out == "93\n");
    CHECK(early.out == gray.out);
    CHECK(be.out == gray.out);
}

TEST_CASE("encode writes DIMACS") {
    const Run r = run("encode " + fixture("identity3.txt"));
    CHECK(r.exitCode == 0);
    CHECK(r.out.find("p cnf 3 6\n") != std::string::npos);
    CHECK(r.out.find("c map 1 1 1\n") < r.out.find("p cnf"));
}

TEST_CASE("exit codes") {
    CHECK(run("perm").exitCode == 2);
    CHECK(run("perm --algo nope " + fixture("ones4.txt")).exitCode == 2);
    CHECK(run("perm " + fixture("does_not_exist.txt")).exitCode != 0);
    CHECK(run("perm --format mm " + fixture("ones4.txt")).exitCode == 3);
    CHECK(run("perm --format dense " + fixture("tridiagonal4.mtx")).exitCode == 3);
    CHECK(run("perm --algo mono --node-budget 5 " + fixture("ones4.txt")).exitCode == 5);
    CHECK(run("perm --algo brute --brute-limit 3 " + fixture("ones4.txt")).exitCode == 2);
}

TEST_CASE("gen is deterministic and bench reads what it writes") {
    std::random_device rd;
    const fs::path a = fs::temp_directory_path() / ("addperm_cli_a_" + std::to_string(rd()));
    const fs::path b = fs::temp_directory_path() / ("addperm_cli_b_" + std::to_string(rd()));
    const std::string common = "gen --family similar --n 8 --cf 1 --rho 0.5 --count 3 --seed 11 --out-dir ";
    const Run ga = run(common + a.string());
    const Run gb = run(common + b.string());
    CHECK(ga.exitCode == 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        const fs::path twin = b / e.path().filename();
        REQUIRE(fs::exists(twin));
        CHECK(fs::file_size(twin) == fs::file_size(e.path()));
        CHECK(run("perm --algo brute " + e.path().string()).out == run("perm " + twin.string()).out);
    }
    CHECK(files == 3);

    const fs::path csv = a / "out.csv";
    const Run bench = run("bench " + a.string() + " --configs gray,early --out " + csv.string());
    CHECK(bench.exitCode == 0);
    CHECK(fs::exists(csv));
    CHECK(fs::file_size(csv) > 0);

    CHECK(run("gen --family similar --n 8 --cf 1 --out-dir " + a.string()).exitCode == 2);  // rho missing

    fs::remove_all(a);
    fs::remove_all(b);
}
